"""Deliberately wrong monads, for checking that the law harness can fail."""

from __future__ import annotations

from .expr import Compound
from .monads import MonadDef
from .stdlib import HT, HT_PATTERN, grab, rest, return_hT

# Which log a broken bind throws away.
DROP_CONTINUATION = "continuation"   # keep only the log of ma
DROP_INPUT = "input"                 # keep only the log of aTomb[grab[ma]]


def log_dropping_hT(drop: str = DROP_CONTINUATION, name: str = "hT") -> MonadDef:
    """An hT monad whose bind forgets one of the two move logs.

    Dropping the continuation's log breaks left identity; dropping the
    input's log breaks right identity.  Associativity survives either way,
    since both sides of that law lose the same log.
    """
    if drop == DROP_CONTINUATION:
        def bind(ma, f):
            val = f(grab(ma))
            return Compound(HT, (grab(val), rest(ma)))
    elif drop == DROP_INPUT:
        def bind(ma, f):
            val = f(grab(ma))
            return Compound(HT, (grab(val), rest(val)))
    else:
        raise ValueError(f"unknown drop mode {drop!r}")
    return MonadDef(name, (HT_PATTERN,), return_hT, bind)
