"""Code alphabet: legibility policy, length classes, and semantic prefixes.

Codes are case-sensitive and purely ASCII-alphanumeric. Nine letters are
banned because they are easily misread on degraded media; each has a fixed
substitute of the opposite case (shipped as data/character_policy.tsv so
external tooling can audit the table). Length alone decides the functional
class: 2 characters is a syntax control code, 3 a vocabulary code, 5 or more
an extended compound. Length 1 and 4 are invalid.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .errors import PdeError


class LexiconError(PdeError):
    pass


class ExcludedCharacterError(LexiconError):
    def __init__(self, position: int, char: str):
        super().__init__(f"excluded character {char!r} at position {position}")
        self.position = position
        self.char = char


class NonAlphanumericError(LexiconError):
    def __init__(self, position: int, char: str):
        super().__init__(f"non-alphanumeric character {char!r} at position {position}")
        self.position = position
        self.char = char


class BadLengthError(LexiconError):
    def __init__(self, length: int):
        super().__init__(f"no code class has length {length}")
        self.length = length


class NotVocabularyError(LexiconError):
    def __init__(self, raw: str):
        super().__init__(f"{raw!r} is not a vocabulary code")
        self.raw = raw


class CodeClass(Enum):
    SYNTAX_CONTROL = "syntax_control"
    VOCABULARY = "vocabulary"
    EXTENDED_COMPOUND = "extended_compound"


class SemanticCategory(Enum):
    PERSON = "Person"
    COLOR = "Color"
    SHAPE = "Shape"
    BACKGROUND = "Background"
    TIME = "Time"
    ACTION = "Action"
    EMOTION = "Emotion"
    OTHER = "Other"


# Longest prefix wins: bG before b-anything, e0 before e-anything.
CATEGORY_PREFIXES: tuple[tuple[str, SemanticCategory], ...] = (
    ("bG", SemanticCategory.BACKGROUND),
    ("e0", SemanticCategory.EMOTION),
    ("p", SemanticCategory.PERSON),
    ("C", SemanticCategory.COLOR),
    ("s", SemanticCategory.SHAPE),
    ("t", SemanticCategory.TIME),
    ("a", SemanticCategory.ACTION),
)


@dataclass(frozen=True)
class CharacterPolicy:
    """Banned characters and their fixed substitutes."""

    excluded: frozenset[str]
    substitution: dict[str, str]

    def __post_init__(self):
        if set(self.substitution) != set(self.excluded):
            raise ValueError("substitution domain must equal the excluded set")
        image = set(self.substitution.values())
        if image & set(self.excluded):
            raise ValueError("substitution image contains an excluded character")
        if len(image) != len(self.substitution):
            raise ValueError("substitution must be injective")

    @classmethod
    def from_table(cls, text: str) -> "CharacterPolicy":
        """Parse the tab-separated excluded->substitute table."""
        pairs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            excluded, substitute = line.split("\t")
            pairs[excluded] = substitute
        return cls(excluded=frozenset(pairs), substitution=pairs)


def load_default_policy() -> CharacterPolicy:
    text = resources.files("pde").joinpath("data/character_policy.tsv").read_text("utf-8")
    return CharacterPolicy.from_table(text)


POLICY = load_default_policy()


@dataclass(frozen=True)
class Code:
    """A validated code: raw string, length class, and prefix category.

    category is None for syntax control codes and extended compounds; the
    prefix convention only applies to 3-character vocabulary codes.
    """

    raw: str
    code_class: CodeClass
    category: SemanticCategory | None


def classify_length(length: int) -> CodeClass:
    if length == 2:
        return CodeClass.SYNTAX_CONTROL
    if length == 3:
        return CodeClass.VOCABULARY
    if length >= 5:
        return CodeClass.EXTENDED_COMPOUND
    raise BadLengthError(length)


def _is_ascii_alnum(ch: str) -> bool:
    return "0" <= ch <= "9" or "a" <= ch <= "z" or "A" <= ch <= "Z"


def _prefix_category(raw: str) -> SemanticCategory:
    for prefix, category in CATEGORY_PREFIXES:
        if raw.startswith(prefix):
            return category
    return SemanticCategory.OTHER


def validate_code(raw: str) -> Code:
    """Validate a raw code string and classify it.

    Raises NonAlphanumericError, ExcludedCharacterError, or BadLengthError.
    """
    if not raw:
        raise BadLengthError(0)
    for position, ch in enumerate(raw):
        if not _is_ascii_alnum(ch):
            raise NonAlphanumericError(position, ch)
        if ch in POLICY.excluded:
            raise ExcludedCharacterError(position, ch)
    code_class = classify_length(len(raw))
    category = _prefix_category(raw) if code_class is CodeClass.VOCABULARY else None
    return Code(raw, code_class, category)


def suggest_substitution(raw: str) -> str:
    """Replace every excluded character with its substitute. Idempotent."""
    return "".join(POLICY.substitution.get(ch, ch) for ch in raw)


def category_of(code: Code) -> SemanticCategory:
    """Prefix category of a vocabulary code; OTHER when no prefix matches."""
    if code.code_class is not CodeClass.VOCABULARY:
        raise NotVocabularyError(code.raw)
    assert code.category is not None
    return code.category
