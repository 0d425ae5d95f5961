"""Pattern-typed monads and do-notation on a small Wolfram-style term rewriter."""

from .desugar import desugar, expand
from .errors import (
    BoundExceeded,
    BudgetExhausted,
    DuplicateMonad,
    MalformedDo,
    MalformedLhs,
    MonadTypeError,
    NoSuchPole,
    ParseError,
    UnknownMonad,
    WLError,
)
from .expr import Compound, Expr, Integer, Sequence, String, Symbol, substitute, to_string
from .matcher import match, match_all, matches
from .monads import MonadDef, MonadRegistry, check_laws
from .parser import parse, parse_program
from .rewriter import Engine, EvalConfig
from .stdlib import make_tower, move_discs_1, move_discs_n, replay, standard_engine

__all__ = [
    "BoundExceeded", "BudgetExhausted", "Compound", "DuplicateMonad", "Engine", "EvalConfig",
    "Expr", "Integer", "MalformedDo", "MalformedLhs", "MonadDef", "MonadRegistry",
    "MonadTypeError", "NoSuchPole", "ParseError", "Sequence", "String", "Symbol",
    "UnknownMonad", "WLError", "check_laws", "desugar", "expand", "make_tower", "match",
    "match_all", "matches", "move_discs_1", "move_discs_n", "parse", "parse_program",
    "replay", "standard_engine", "substitute", "to_string",
]
