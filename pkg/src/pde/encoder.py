"""Structural inverse of the parser: frames to canonical code lines.

The parser accepts liberal orderings; the encoder always emits one canonical
order per sentence:

    [st] [relations] [subject] j1 [tn] [nG] [verb] [o1 object]
    [background] [time] [intensity emotions]

Phrases with modifiers are emitted with GN; rN is never auto-emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from . import numeric
from .errors import InvalidCodeError, PdeError
from .lexicon import Code, CodeClass, LexiconError, SemanticCategory, validate_code
from .parser import Block, Clause


class EncodeError(PdeError):
    pass


class EmptyFrameError(EncodeError):
    pass


@dataclass(frozen=True)
class Phrase:
    head: str
    modifiers: tuple[str, ...] = ()
    demonstrative: int | None = None


@dataclass(frozen=True)
class SemanticFrame:
    """Language-neutral clause content, mirroring the parsed Clause shape."""

    subject: Phrase | None = None
    verb: str | None = None
    object: Phrase | None = None
    past: bool = False
    negated: bool = False
    colloquial: bool = False
    relations: tuple[tuple[int, Phrase], ...] = ()
    background: str | None = None
    time: str | None = None
    emotions: tuple[tuple[str, int | None], ...] = ()
    comparison: tuple[Phrase, Phrase] | None = None
    numeric: numeric.ExprTree | None = None

    def is_empty(self) -> bool:
        return self == SemanticFrame()


_ATTRIBUTE_CATEGORIES = (
    SemanticCategory.BACKGROUND,
    SemanticCategory.TIME,
    SemanticCategory.EMOTION,
)


def _checked(raw: str) -> Code:
    try:
        return validate_code(raw)
    except LexiconError as exc:
        raise InvalidCodeError(raw, exc) from exc


def _check_variant(kind: str, value: int):
    if not 1 <= value <= 9:
        raise EncodeError(f"{kind} must be between 1 and 9, got {value}")


def _check_category(raw: str, expected: SemanticCategory, slot: str):
    code = _checked(raw)
    if code.code_class is not CodeClass.VOCABULARY or code.category is not expected:
        raise EncodeError(f"{slot} code {raw!r} must have category {expected.value}")


def _phrase_codes(phrase: Phrase, slot: str, frame: SemanticFrame) -> list[str]:
    parts: list[str] = []
    if phrase.demonstrative is not None:
        _check_variant("demonstrative", phrase.demonstrative)
        parts.append(f"d{phrase.demonstrative}")
    head = _checked(phrase.head)
    if head.code_class is CodeClass.SYNTAX_CONTROL:
        raise EncodeError(f"{slot} head {phrase.head!r} is a control code, not a word")
    for modifier in phrase.modifiers:
        mod = _checked(modifier)
        if mod.code_class is CodeClass.SYNTAX_CONTROL:
            raise EncodeError(f"modifier {modifier!r} is a control code, not a word")
    if phrase.modifiers:
        arity = len(phrase.modifiers) + 1
        if arity > 9:
            raise EncodeError("a phrase may carry at most 8 modifiers")
        parts.append(f"G{arity}")
        parts.extend(phrase.modifiers)
    parts.append(phrase.head)
    # A bare subject is routed by category on the way back in, so categories
    # that route elsewhere cannot round-trip as a bare subject.
    if slot == "subject" and not phrase.modifiers and phrase.demonstrative is None:
        if head.category is SemanticCategory.ACTION:
            raise EncodeError("a bare action code cannot be the subject")
        if head.category in _ATTRIBUTE_CATEGORIES and frame.verb is None:
            raise EncodeError(
                f"a bare {head.category.value} code cannot be a verbless subject"
            )
    return parts


def encode_sentence(frame: SemanticFrame) -> str:
    """Canonical code sequence for one sentence, without prefix or terminator."""
    if frame.is_empty():
        raise EmptyFrameError("frame has no content to encode")
    if frame.numeric is not None:
        if frame != SemanticFrame(numeric=frame.numeric):
            raise EncodeError("an arithmetic sentence cannot carry other fields")
        return numeric.render_expr(frame.numeric, "symbols")
    parts: list[str] = []
    if frame.colloquial:
        parts.append("st")
    if frame.comparison is not None:
        if frame.subject or frame.verb or frame.object or frame.relations:
            raise EncodeError("a comparison sentence cannot mix with a verb sentence")
        left, right = frame.comparison
        parts.extend(_phrase_codes(left, "comparison", frame))
        parts.append("Cp")
        parts.extend(_phrase_codes(right, "comparison", frame))
    else:
        for variant, phrase in frame.relations:
            _check_variant("relation", variant)
            parts.append(f"u{variant}")
            parts.extend(_phrase_codes(phrase, "relation", frame))
        if frame.subject is not None:
            parts.extend(_phrase_codes(frame.subject, "subject", frame))
            if frame.verb is not None:
                parts.append("j1")
        if frame.past:
            parts.append("tn")
        if frame.negated:
            parts.append("nG")
        if frame.verb is not None:
            verb = _checked(frame.verb)
            if verb.category is not SemanticCategory.ACTION:
                raise EncodeError(f"verb {frame.verb!r} must be an action code")
            parts.append(frame.verb)
        if frame.object is not None:
            parts.append("o1")
            parts.extend(_phrase_codes(frame.object, "object", frame))
    if frame.background is not None:
        _check_category(frame.background, SemanticCategory.BACKGROUND, "background")
        parts.append(frame.background)
    if frame.time is not None:
        _check_category(frame.time, SemanticCategory.TIME, "time")
        parts.append(frame.time)
    for code, level in frame.emotions:
        _check_category(code, SemanticCategory.EMOTION, "emotion")
        if level is not None:
            _check_variant("intensity", level)
            parts.append(f"i{level}")
        parts.append(code)
    if not parts:
        raise EmptyFrameError("frame has no content to encode")
    return " ".join(parts)


def encode_frame(frame: SemanticFrame) -> str:
    """One complete sentence line: prefix, canonical codes, terminator."""
    return f"PDE {encode_sentence(frame)}."


def canonicalize(block: Block, block_end: bool | None = None) -> str:
    """Re-emit a parsed block in canonical spelling (a fixed point for
    canonical input). The terminator follows the parsed block unless forced."""
    frames = [frame_from_clause(clause) for clause in block.clauses]
    sentences = [encode_sentence(frame) for frame in frames]
    end = block.block_end if block_end is None else block_end
    return "PDE " + ". ".join(sentences) + (".." if end else ".")


def _phrase_from_np(np) -> Phrase:
    return Phrase(np.head.raw, tuple(m.raw for m in np.modifiers), np.demonstrative)


def frame_from_clause(clause: Clause) -> SemanticFrame:
    return SemanticFrame(
        subject=_phrase_from_np(clause.subject) if clause.subject else None,
        verb=clause.verb.raw if clause.verb else None,
        object=_phrase_from_np(clause.object) if clause.object else None,
        past=clause.past,
        negated=clause.negated,
        colloquial=clause.colloquial,
        relations=tuple((v, _phrase_from_np(ph)) for v, ph in clause.relations),
        background=clause.background.raw if clause.background else None,
        time=clause.time.raw if clause.time else None,
        emotions=tuple((code.raw, level) for code, level in clause.emotions),
        comparison=(
            (_phrase_from_np(clause.comparison[0]), _phrase_from_np(clause.comparison[1]))
            if clause.comparison
            else None
        ),
        numeric=clause.numeric,
    )


# -- JSON frame shape --------------------------------------------------------

_FRAME_KEYS = {f.name for f in fields(SemanticFrame)}


def _phrase_from_json(value, where: str) -> Phrase:
    if isinstance(value, str):
        return Phrase(value)
    if isinstance(value, dict):
        unknown = set(value) - {"head", "modifiers", "demonstrative"}
        if unknown:
            raise EncodeError(f"unknown phrase fields in {where}: {sorted(unknown)}")
        if "head" not in value:
            raise EncodeError(f"phrase in {where} is missing its head")
        return Phrase(
            value["head"],
            tuple(value.get("modifiers") or ()),
            value.get("demonstrative"),
        )
    raise EncodeError(f"{where} must be a code string or a phrase object")


def _relation_variant(value) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.startswith("u") and value[1:].isdigit():
        return int(value[1:])
    raise EncodeError(f"relation must be an integer or 'uN' string, got {value!r}")


def frame_from_json(data: dict) -> SemanticFrame:
    """Build a frame from the documented JSON shape. Unknown keys are errors."""
    if not isinstance(data, dict):
        raise EncodeError("frame must be a JSON object")
    unknown = set(data) - _FRAME_KEYS
    if unknown:
        raise EncodeError(f"unknown frame fields: {sorted(unknown)}")
    emotions = []
    for entry in data.get("emotions") or ():
        if isinstance(entry, str):
            emotions.append((entry, None))
        elif isinstance(entry, dict) and set(entry) <= {"code", "intensity"}:
            emotions.append((entry["code"], entry.get("intensity")))
        else:
            raise EncodeError(f"bad emotion entry {entry!r}")
    relations = []
    for entry in data.get("relations") or ():
        if not isinstance(entry, dict) or set(entry) != {"relation", "phrase"}:
            raise EncodeError(f"bad relation entry {entry!r}")
        relations.append(
            (_relation_variant(entry["relation"]), _phrase_from_json(entry["phrase"], "relation"))
        )
    comparison = None
    if data.get("comparison") is not None:
        entry = data["comparison"]
        if not isinstance(entry, dict) or set(entry) != {"left", "right"}:
            raise EncodeError("comparison must be an object with left and right")
        comparison = (
            _phrase_from_json(entry["left"], "comparison"),
            _phrase_from_json(entry["right"], "comparison"),
        )
    tree = None
    if data.get("numeric") is not None:
        if not isinstance(data["numeric"], str):
            raise EncodeError("numeric must be an expression string")
        tree = numeric.parse_expr(data["numeric"])
    return SemanticFrame(
        subject=_phrase_from_json(data["subject"], "subject") if data.get("subject") else None,
        verb=data.get("verb"),
        object=_phrase_from_json(data["object"], "object") if data.get("object") else None,
        past=bool(data.get("past", False)),
        negated=bool(data.get("negated", False)),
        colloquial=bool(data.get("colloquial", False)),
        relations=tuple(relations),
        background=data.get("background"),
        time=data.get("time"),
        emotions=tuple(emotions),
        comparison=comparison,
        numeric=tree,
    )


def _phrase_to_json(phrase: Phrase) -> dict:
    return {
        "head": phrase.head,
        "modifiers": list(phrase.modifiers),
        "demonstrative": phrase.demonstrative,
    }


def frame_to_json(frame: SemanticFrame) -> dict:
    return {
        "subject": _phrase_to_json(frame.subject) if frame.subject else None,
        "verb": frame.verb,
        "object": _phrase_to_json(frame.object) if frame.object else None,
        "past": frame.past,
        "negated": frame.negated,
        "colloquial": frame.colloquial,
        "relations": [
            {"relation": variant, "phrase": _phrase_to_json(phrase)}
            for variant, phrase in frame.relations
        ],
        "background": frame.background,
        "time": frame.time,
        "emotions": [
            {"code": code, "intensity": level} for code, level in frame.emotions
        ],
        "comparison": (
            {
                "left": _phrase_to_json(frame.comparison[0]),
                "right": _phrase_to_json(frame.comparison[1]),
            }
            if frame.comparison
            else None
        ),
        "numeric": numeric.render_expr(frame.numeric, "symbols") if frame.numeric else None,
    }
