"""A small dependent type theory interpreted in natural models."""

from .elaborate import (
    Denotation,
    ElabError,
    Environment,
    SCtx,
    SType,
    Verdict,
    check_equal,
    elaborate,
    typecheck,
)
from .parser import ParseError, parse, parse_judgment, parse_term, parse_type
from .syntax import Judgment, shift, show, subst

__all__ = [
    "Denotation", "ElabError", "Environment", "Judgment", "ParseError", "SCtx", "SType", "Verdict",
    "check_equal", "elaborate", "parse", "parse_judgment", "parse_term", "parse_type", "shift", "show",
    "subst", "typecheck",
]
