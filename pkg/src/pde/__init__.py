"""PDE: a compact visual code language.

Parse code blocks, render them to natural language, encode semantic frames
back to canonical code lines, evaluate the arithmetic notation, and manage
the code-to-meaning dictionary as an append-only hash chain.
"""

from .encoder import (
    EmptyFrameError,
    EncodeError,
    Phrase,
    SemanticFrame,
    canonicalize,
    encode_frame,
    frame_from_clause,
    frame_from_json,
    frame_to_json,
)
from .errors import InvalidCodeError, PdeError
from .expansion import (
    ENGLISH_SOV,
    ENGLISH_SVO,
    OrderProfile,
    SurfaceForms,
    UnresolvedCodeError,
    render_block,
    render_fragment,
    render_phrase,
)
from .ledger import (
    GENESIS_HASH,
    ChainVerdict,
    DefinitionRecord,
    Dictionary,
    DictionaryVersion,
    Fork,
    load_dictionary,
    save_dictionary,
    verify_chain,
)
from .lexicon import (
    Code,
    CodeClass,
    SemanticCategory,
    category_of,
    suggest_substitution,
    validate_code,
)
from .numeric import ExprTree, eval_expr, parse_expr, render_expr
from .parser import (
    Block,
    Clause,
    NounPhrase,
    Token,
    extract_blocks,
    parse_arity,
    parse_block,
    parse_fragment,
    parse_text,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "ChainVerdict",
    "Clause",
    "Code",
    "CodeClass",
    "DefinitionRecord",
    "Dictionary",
    "DictionaryVersion",
    "EmptyFrameError",
    "EncodeError",
    "ENGLISH_SOV",
    "ENGLISH_SVO",
    "ExprTree",
    "Fork",
    "GENESIS_HASH",
    "InvalidCodeError",
    "NounPhrase",
    "OrderProfile",
    "PdeError",
    "Phrase",
    "SemanticFrame",
    "SurfaceForms",
    "Token",
    "UnresolvedCodeError",
    "canonicalize",
    "category_of",
    "encode_frame",
    "eval_expr",
    "extract_blocks",
    "frame_from_clause",
    "frame_from_json",
    "frame_to_json",
    "load_dictionary",
    "parse_arity",
    "parse_block",
    "parse_expr",
    "parse_fragment",
    "parse_text",
    "render_block",
    "render_expr",
    "render_fragment",
    "render_phrase",
    "save_dictionary",
    "suggest_substitution",
    "tokenize",
    "validate_code",
    "verify_chain",
]
