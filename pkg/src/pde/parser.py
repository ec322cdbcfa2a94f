"""Tokenizer and structural parser for code blocks.

A block is `PDE` followed by one or more sentences. Terminators attach to the
final code of a sentence: "." ends a sentence, ".." ends the sentence and the
block. The parser also accepts the spaced spellings ". ." and "code ." and
normalizes them away.

Sentence structure is driven by the 2-character control codes:

    rN / GN   consume the next N word codes into one noun phrase (last = head)
    xN        concatenate the next N raw codes into one extended compound
    uN        bind the following noun phrase as a relation (1 = on, 2 = after)
    j1        mark the preceding noun phrase as the subject
    o1        mark the following noun phrase as the object
    tn / nG   set the past / negated flags on the clause
    Cp        comparison between the preceding and following phrases
    iN        intensity level for the following emotion code
    dN        demonstrative for the following noun phrase
    st        colloquial style flag

Free vocabulary codes route by category: an action code becomes the verb,
bare background/time/emotion codes fill the attribute slots, anything else
becomes the subject (before the verb) or the object (after it). A sentence
made entirely of numbers and operators parses as an arithmetic clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Iterable

from . import numeric
from .errors import PdeError
from .lexicon import Code, CodeClass, LexiconError, SemanticCategory, validate_code


class TokenizeError(PdeError):
    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} (at {span[0]}..{span[1]})")
        self.span = span


class UnknownTokenError(TokenizeError):
    pass


class DanglingPeriodError(TokenizeError):
    pass


class ParseError(PdeError):
    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.span = span


class MissingPrefixError(ParseError):
    pass


class ArityUnderflowError(ParseError):
    def __init__(self, control: str, needed: int, available: int, span=None):
        super().__init__(
            f"{control} needs {needed} following codes, only {available} left", span
        )
        self.control = control
        self.needed = needed
        self.available = available


class DoubleSubjectError(ParseError):
    pass


class UnterminatedSentenceError(ParseError):
    pass


class TrailingTokensError(ParseError):
    pass


class UnknownControlError(ParseError):
    def __init__(self, raw: str, span=None):
        super().__init__(f"unknown control code {raw!r}", span)
        self.raw = raw


class TokenKind(Enum):
    PDE_PREFIX = auto()
    CODE = auto()
    NUMBER = auto()
    OPERATOR = auto()
    FUNC = auto()
    LPAREN = auto()
    RPAREN = auto()
    SENTENCE_END = auto()
    BLOCK_END = auto()


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: tuple[int, int] = field(compare=False)
    code: Code | None = None
    value: int | None = None


_EXPR_KINDS = frozenset(
    {TokenKind.NUMBER, TokenKind.OPERATOR, TokenKind.FUNC, TokenKind.LPAREN, TokenKind.RPAREN}
)
# Token kinds a sentence terminator may follow.
_PERIOD_AFTER = frozenset({TokenKind.CODE, TokenKind.NUMBER, TokenKind.RPAREN})


def _is_ascii_alnum(ch: str) -> bool:
    return "0" <= ch <= "9" or "a" <= ch <= "z" or "A" <= ch <= "Z"


def tokenize(text: str) -> list[Token]:
    """Split source text into tokens; raises on characters outside the language."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch == "#":
            i += 1
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j == i:
                raise UnknownTokenError("'#' must be followed by digits", (start, i))
            digits = text[i:j]
            tokens.append(Token(TokenKind.NUMBER, digits, (start, j), value=int(digits)))
            i = j
        elif _is_ascii_alnum(ch):
            j = i
            while j < n and _is_ascii_alnum(text[j]):
                j += 1
            run = text[i:j]
            span = (start, j)
            if run.isdigit():
                tokens.append(Token(TokenKind.NUMBER, run, span, value=int(run)))
            elif run == "PDE" and not tokens:
                tokens.append(Token(TokenKind.PDE_PREFIX, run, span))
            elif run in numeric.FUNCTIONS:
                tokens.append(Token(TokenKind.FUNC, run, span))
            else:
                try:
                    code = validate_code(run)
                except LexiconError as exc:
                    raise UnknownTokenError(f"invalid code {run!r}: {exc}", span) from exc
                tokens.append(Token(TokenKind.CODE, run, span, code=code))
            i = j
        elif ch in "+-*/^":
            tokens.append(Token(TokenKind.OPERATOR, ch, (start, i + 1)))
            i += 1
        elif ch == "(":
            tokens.append(Token(TokenKind.LPAREN, ch, (start, i + 1)))
            i += 1
        elif ch == ")":
            tokens.append(Token(TokenKind.RPAREN, ch, (start, i + 1)))
            i += 1
        elif ch == ".":
            span = (start, i + 1)
            prev = tokens[-1].kind if tokens else None
            if prev in _PERIOD_AFTER:
                tokens.append(Token(TokenKind.SENTENCE_END, ".", span))
            elif prev is TokenKind.SENTENCE_END:
                tokens.append(Token(TokenKind.BLOCK_END, ".", span))
            else:
                raise DanglingPeriodError("period with no preceding code", span)
            i += 1
        else:
            raise UnknownTokenError(f"unexpected character {ch!r}", (start, i + 1))
    return tokens


def join_tokens(tokens: Iterable[Token]) -> str:
    """Canonical source spelling: single spaces, terminators attached, no
    space after a function name or '(' and none before ')'."""
    out: list[str] = []
    prev: Token | None = None
    for tok in tokens:
        if out and _space_before(prev, tok):
            out.append(" ")
        out.append(tok.lexeme)
        prev = tok
    return "".join(out)


def _space_before(prev: Token | None, tok: Token) -> bool:
    if prev is None:
        return False
    if tok.kind in (TokenKind.SENTENCE_END, TokenKind.BLOCK_END, TokenKind.RPAREN):
        return False
    if prev.kind in (TokenKind.FUNC, TokenKind.LPAREN):
        return False
    return True


class ControlKind(Enum):
    GROUP = auto()
    MOD_GROUP = auto()
    EXTEND = auto()
    RELATION = auto()
    SUBJECT_MARK = auto()
    OBJECT_MARK = auto()
    PAST_TENSE = auto()
    NEGATION = auto()
    COMPARISON = auto()
    INTENSITY = auto()
    COLLOQUIAL = auto()
    DEMONSTRATIVE = auto()


@dataclass(frozen=True)
class ControlCode:
    kind: ControlKind
    arg: int | None = None  # arity for groups/extends, variant/level otherwise


_EXACT_CONTROLS = {
    "j1": ControlKind.SUBJECT_MARK,
    "o1": ControlKind.OBJECT_MARK,
    "tn": ControlKind.PAST_TENSE,
    "nG": ControlKind.NEGATION,
    "Cp": ControlKind.COMPARISON,
    "st": ControlKind.COLLOQUIAL,
}
_PREFIX_CONTROLS = {
    "r": ControlKind.GROUP,
    "G": ControlKind.MOD_GROUP,
    "x": ControlKind.EXTEND,
    "u": ControlKind.RELATION,
    "i": ControlKind.INTENSITY,
    "d": ControlKind.DEMONSTRATIVE,
}
_ARITY_KINDS = (ControlKind.GROUP, ControlKind.MOD_GROUP, ControlKind.EXTEND)


def parse_arity(control_raw: str) -> ControlCode:
    """Decode a 2-character control code into kind and numeric argument."""
    kind = _EXACT_CONTROLS.get(control_raw)
    if kind is not None:
        return ControlCode(kind)
    if len(control_raw) == 2 and control_raw[1].isdigit():
        kind = _PREFIX_CONTROLS.get(control_raw[0])
        if kind is not None:
            arg = int(control_raw[1])
            low = 2 if kind in _ARITY_KINDS else 1
            if arg >= low:
                return ControlCode(kind, arg)
    raise UnknownControlError(control_raw)


@dataclass(frozen=True)
class NounPhrase:
    head: Code
    modifiers: tuple[Code, ...] = ()
    demonstrative: int | None = None

    def to_dict(self) -> dict:
        return {
            "head": self.head.raw,
            "modifiers": [m.raw for m in self.modifiers],
            "demonstrative": self.demonstrative,
        }


@dataclass(frozen=True)
class Clause:
    subject: NounPhrase | None = None
    verb: Code | None = None
    object: NounPhrase | None = None
    past: bool = False
    negated: bool = False
    colloquial: bool = False
    relations: tuple[tuple[int, NounPhrase], ...] = ()
    background: Code | None = None
    time: Code | None = None
    emotions: tuple[tuple[Code, int | None], ...] = ()
    comparison: tuple[NounPhrase, NounPhrase] | None = None
    numeric: numeric.ExprTree | None = None

    def to_dict(self) -> dict:
        return {
            "subject": self.subject.to_dict() if self.subject else None,
            "verb": self.verb.raw if self.verb else None,
            "object": self.object.to_dict() if self.object else None,
            "past": self.past,
            "negated": self.negated,
            "colloquial": self.colloquial,
            "relations": [
                {"relation": variant, "phrase": phrase.to_dict()}
                for variant, phrase in self.relations
            ],
            "background": self.background.raw if self.background else None,
            "time": self.time.raw if self.time else None,
            "emotions": [
                {"code": code.raw, "intensity": level} for code, level in self.emotions
            ],
            "comparison": (
                {"left": self.comparison[0].to_dict(), "right": self.comparison[1].to_dict()}
                if self.comparison
                else None
            ),
            "numeric": (
                numeric.render_expr(self.numeric, "symbols") if self.numeric else None
            ),
        }


@dataclass(frozen=True)
class Block:
    clauses: tuple[Clause, ...]
    block_end: bool = False
    source_span: tuple[int, int] | None = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "clauses": [c.to_dict() for c in self.clauses],
            "block_end": self.block_end,
        }


@dataclass
class _FreeItem:
    phrase: NounPhrase
    intensity: int | None
    after_verb: bool


_WORD_CLASSES = (CodeClass.VOCABULARY, CodeClass.EXTENDED_COMPOUND)


class _SentenceParser:
    """Single pass over one sentence's tokens with one deferred free phrase.

    Routing of the most recent unclaimed phrase is delayed until the next
    phrase starts (or the sentence ends) so that a following j1 or Cp can
    still claim it.
    """

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.subject: NounPhrase | None = None
        self.verb: Code | None = None
        self.object: NounPhrase | None = None
        self.past = False
        self.negated = False
        self.colloquial = False
        self.relations: list[tuple[int, NounPhrase]] = []
        self.background: Code | None = None
        self.time: Code | None = None
        self.emotions: list[tuple[Code, int | None]] = []
        self.comparison: tuple[NounPhrase, NounPhrase] | None = None
        self.free: _FreeItem | None = None
        self.pending_relation: int | None = None
        self.pending_object = False
        self.pending_compare: NounPhrase | None = None
        self.pending_intensity: int | None = None
        self.pending_demonstrative: int | None = None

    def parse(self) -> Clause:
        if any(t.kind in _EXPR_KINDS for t in self.tokens):
            return self._parse_arithmetic()
        while self.i < len(self.tokens):
            tok = self.tokens[self.i]
            if tok.kind is not TokenKind.CODE:
                raise ParseError(f"unexpected token {tok.lexeme!r}", tok.span)
            assert tok.code is not None
            if tok.code.code_class is CodeClass.SYNTAX_CONTROL:
                self._apply_control(tok)
            else:
                self._on_atom(tok.code, tok.span)
            self.i += 1
        return self._finish()

    def _parse_arithmetic(self) -> Clause:
        items: list[numeric.ExprItem] = []
        for tok in self.tokens:
            if tok.kind is TokenKind.NUMBER:
                items.append(("number", tok.value, tok.span[0]))
            elif tok.kind is TokenKind.OPERATOR:
                items.append(("op", tok.lexeme, tok.span[0]))
            elif tok.kind is TokenKind.FUNC:
                items.append(("func", tok.lexeme, tok.span[0]))
            elif tok.kind is TokenKind.LPAREN:
                items.append(("lparen", tok.lexeme, tok.span[0]))
            elif tok.kind is TokenKind.RPAREN:
                items.append(("rparen", tok.lexeme, tok.span[0]))
            else:
                raise ParseError(
                    "arithmetic may not mix with codes in one sentence", tok.span
                )
        return Clause(numeric=numeric.parse_expr_items(items))

    # -- control handling ---------------------------------------------------

    def _apply_control(self, tok: Token):
        control = parse_arity(tok.lexeme)
        kind = control.kind
        if kind in (ControlKind.GROUP, ControlKind.MOD_GROUP):
            codes = self._consume_codes(tok, control.arg, word_only=True)
            self._on_phrase(
                NounPhrase(codes[-1], tuple(codes[:-1]), self._take_demonstrative())
            )
        elif kind is ControlKind.EXTEND:
            codes = self._consume_codes(tok, control.arg, word_only=False)
            raw = "".join(c.raw for c in codes)
            try:
                compound = validate_code(raw)
            except LexiconError as exc:
                raise ParseError(f"invalid extended compound {raw!r}: {exc}", tok.span)
            self._on_atom(compound, tok.span)
        elif kind is ControlKind.RELATION:
            if self.pending_relation is not None:
                raise ParseError("relation marker without a phrase", tok.span)
            self.pending_relation = control.arg
        elif kind is ControlKind.SUBJECT_MARK:
            self._claim_subject(tok)
        elif kind is ControlKind.OBJECT_MARK:
            if self.pending_object:
                raise ParseError("object marker without a phrase", tok.span)
            self.pending_object = True
        elif kind is ControlKind.PAST_TENSE:
            self.past = True
        elif kind is ControlKind.NEGATION:
            self.negated = True
        elif kind is ControlKind.COMPARISON:
            self._claim_comparison_left(tok)
        elif kind is ControlKind.INTENSITY:
            if self.pending_intensity is not None:
                raise ParseError("intensity marker without an emotion code", tok.span)
            self.pending_intensity = control.arg
        elif kind is ControlKind.COLLOQUIAL:
            self.colloquial = True
        else:  # DEMONSTRATIVE
            if self.pending_demonstrative is not None:
                raise ParseError("demonstrative without a phrase", tok.span)
            self.pending_demonstrative = control.arg

    def _consume_codes(self, tok: Token, count: int, word_only: bool) -> list[Code]:
        remaining = self.tokens[self.i + 1 : self.i + 1 + count]
        if len(remaining) < count:
            raise ArityUnderflowError(tok.lexeme, count, len(remaining), tok.span)
        codes = []
        for t in remaining:
            if t.kind is not TokenKind.CODE:
                raise ParseError(
                    f"{tok.lexeme} may only consume codes, found {t.lexeme!r}", t.span
                )
            assert t.code is not None
            if word_only and t.code.code_class not in _WORD_CLASSES:
                raise ParseError(
                    f"{tok.lexeme} may only group word codes, found {t.lexeme!r}", t.span
                )
            codes.append(t.code)
        self.i += count
        return codes

    def _claim_subject(self, tok: Token):
        if self.free is None:
            raise ParseError("subject marker must follow a noun phrase", tok.span)
        if self.subject is not None:
            raise DoubleSubjectError("sentence already has a subject", tok.span)
        if self.free.intensity is not None:
            raise ParseError("intensity may only mark an emotion code", tok.span)
        self.subject = self.free.phrase
        self.free = None

    def _claim_comparison_left(self, tok: Token):
        if self.comparison is not None or self.pending_compare is not None:
            raise ParseError("sentence already has a comparison", tok.span)
        if self.free is None:
            raise ParseError("comparison must follow a phrase", tok.span)
        if self.free.intensity is not None:
            raise ParseError("intensity may only mark an emotion code", tok.span)
        self.pending_compare = self.free.phrase
        self.free = None

    # -- word handling ------------------------------------------------------

    def _on_atom(self, code: Code, span: tuple[int, int]):
        no_pendings = (
            self.pending_relation is None
            and not self.pending_object
            and self.pending_compare is None
            and self.pending_demonstrative is None
            and self.pending_intensity is None
        )
        if code.category is SemanticCategory.ACTION and self.verb is None and no_pendings:
            self.verb = code
            return
        self._on_phrase(NounPhrase(code, (), self._take_demonstrative()))

    def _take_demonstrative(self) -> int | None:
        dem = self.pending_demonstrative
        self.pending_demonstrative = None
        return dem

    def _on_phrase(self, phrase: NounPhrase):
        if phrase.head.code_class not in _WORD_CLASSES:
            raise ParseError(f"{phrase.head.raw!r} cannot head a noun phrase")
        if self.pending_relation is not None:
            self.relations.append((self.pending_relation, phrase))
            self.pending_relation = None
            return
        if self.pending_object:
            if self.object is not None:
                raise ParseError("sentence already has an object")
            self.object = phrase
            self.pending_object = False
            return
        if self.pending_compare is not None:
            self.comparison = (self.pending_compare, phrase)
            self.pending_compare = None
            return
        if self.free is not None:
            self._route(self.free)
        intensity = self.pending_intensity
        self.pending_intensity = None
        self.free = _FreeItem(phrase, intensity, after_verb=self.verb is not None)

    def _route(self, item: _FreeItem):
        phrase = item.phrase
        bare = not phrase.modifiers and phrase.demonstrative is None
        category = phrase.head.category
        if bare and category is SemanticCategory.EMOTION:
            self.emotions.append((phrase.head, item.intensity))
            return
        if item.intensity is not None:
            raise ParseError("intensity may only mark an emotion code")
        if bare and category is SemanticCategory.BACKGROUND:
            self.background = phrase.head  # last one wins
        elif bare and category is SemanticCategory.TIME:
            self.time = phrase.head
        elif not item.after_verb:
            if self.subject is not None:
                raise DoubleSubjectError("sentence already has a subject")
            self.subject = phrase
        else:
            if self.object is not None:
                raise ParseError("unexpected extra phrase after the verb")
            self.object = phrase

    def _finish(self) -> Clause:
        if self.free is not None:
            self._route(self.free)
            self.free = None
        if self.pending_relation is not None:
            raise ParseError("relation marker without a phrase")
        if self.pending_object:
            raise ParseError("object marker without a phrase")
        if self.pending_compare is not None:
            raise ParseError("comparison missing its right-hand phrase")
        if self.pending_intensity is not None:
            raise ParseError("intensity marker without an emotion code")
        if self.pending_demonstrative is not None:
            raise ParseError("demonstrative without a phrase")
        if self.comparison is not None and (
            self.verb is not None
            or self.subject is not None
            or self.object is not None
            or self.relations
        ):
            raise ParseError("comparison cannot mix with a verb-centered sentence")
        return Clause(
            subject=self.subject,
            verb=self.verb,
            object=self.object,
            past=self.past,
            negated=self.negated,
            colloquial=self.colloquial,
            relations=tuple(self.relations),
            background=self.background,
            time=self.time,
            emotions=tuple(self.emotions),
            comparison=self.comparison,
        )


def parse_block(tokens: list[Token]) -> Block:
    """Parse a token list (from tokenize) into a Block."""
    if not tokens or tokens[0].kind is not TokenKind.PDE_PREFIX:
        raise MissingPrefixError("block must start with the PDE prefix")
    sentences: list[list[Token]] = []
    current: list[Token] = []
    block_end = False
    for index, tok in enumerate(tokens[1:], start=1):
        if block_end:
            raise TrailingTokensError(
                f"unexpected {tok.lexeme!r} after block end", tok.span
            )
        if tok.kind is TokenKind.SENTENCE_END:
            sentences.append(current)
            current = []
        elif tok.kind is TokenKind.BLOCK_END:
            block_end = True
        elif tok.kind is TokenKind.PDE_PREFIX:
            raise ParseError("unexpected prefix inside a block", tok.span)
        else:
            current.append(tok)
    if current:
        raise UnterminatedSentenceError("sentence does not end with '.'")
    if not sentences:
        raise UnterminatedSentenceError("block has no sentences")
    clauses = tuple(_SentenceParser(sentence).parse() for sentence in sentences)
    span = (tokens[0].span[0], tokens[-1].span[1])
    return Block(clauses, block_end, span)


def parse_text(text: str) -> Block:
    return parse_block(tokenize(text))


def parse_fragment(text: str) -> Clause:
    """Parse a snippet of codes (no prefix, terminator optional) as one clause."""
    tokens = tokenize(text)
    if tokens and tokens[0].kind is TokenKind.PDE_PREFIX:
        tokens = tokens[1:]
    if tokens and tokens[-1].kind is TokenKind.BLOCK_END:
        tokens = tokens[:-1]
    if tokens and tokens[-1].kind is TokenKind.SENTENCE_END:
        tokens = tokens[:-1]
    for tok in tokens:
        if tok.kind in (TokenKind.SENTENCE_END, TokenKind.BLOCK_END, TokenKind.PDE_PREFIX):
            raise ParseError("fragment must be a single sentence", tok.span)
    if not tokens:
        raise ParseError("empty fragment")
    return _SentenceParser(tokens).parse()


@dataclass(frozen=True)
class ExtractedBlock:
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: tuple[int, int]


@dataclass(frozen=True)
class ExtractionResult:
    blocks: tuple[ExtractedBlock, ...]
    diagnostics: tuple[Diagnostic, ...]


_PREFIX_RE = re.compile(r"\bPDE\b")
_TERMINATOR_RE = re.compile(r"\. ?\.")


def extract_blocks(document: str) -> ExtractionResult:
    """Find embedded blocks in a host document by pure pattern match.

    A candidate starts at a word-boundary PDE and never crosses a line break.
    It ends at the first ".." (or ". ."); a candidate whose line ends with a
    single "." is accepted as a block without the block terminator. Anything
    else is reported as an unterminated candidate.
    """
    blocks: list[ExtractedBlock] = []
    diagnostics: list[Diagnostic] = []
    pos = 0
    for match in _PREFIX_RE.finditer(document):
        if match.start() < pos:
            continue
        line_end = document.find("\n", match.start())
        if line_end == -1:
            line_end = len(document)
        segment = document[match.start() : line_end]
        terminator = _TERMINATOR_RE.search(segment)
        if terminator:
            end = match.start() + terminator.end()
        else:
            trimmed = segment.rstrip()
            if trimmed.endswith("."):
                end = match.start() + len(trimmed)
            else:
                diagnostics.append(
                    Diagnostic("unterminated block candidate", (match.start(), line_end))
                )
                pos = line_end
                continue
        blocks.append(ExtractedBlock(document[match.start() : end], (match.start(), end)))
        pos = end
    return ExtractionResult(tuple(blocks), tuple(diagnostics))
