"""do-notation desugaring.

``do[m][s1, ..., sn]`` is reduced from the right: the last two statements
``y, r`` become ``chk[m][bind[m][rhs, Function[v, r]]]`` where ``v`` is the
arrow variable of ``y`` (or a fresh symbol when ``y`` is a plain statement).
The single remaining statement is wrapped in one more ``chk[m]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import MalformedDo
from .expr import (
    FUNCTION,
    LEFT_ARROW,
    Compound,
    Expr,
    Symbol,
    fresh_symbol,
    to_string,
)

DO = Symbol("do")
CHK = Symbol("chk")
BIND = Symbol("bind")


@dataclass(frozen=True)
class Arrow:
    var: Symbol
    rhs: Expr


@dataclass(frozen=True)
class Plain:
    expr: Expr


@dataclass(frozen=True)
class DoBlock:
    monad: Expr
    statements: tuple

    @classmethod
    def from_expr(cls, e: Expr) -> "DoBlock":
        if not is_do(e):
            raise MalformedDo(f"not a do block: {to_string(e)}")
        if len(e.head.args) != 1:
            raise MalformedDo(f"do takes exactly one monad name: {to_string(e.head)}")
        if not e.args:
            raise MalformedDo("empty do block")
        stmts = []
        for s in e.args:
            if isinstance(s, Compound) and s.head == LEFT_ARROW and len(s.args) == 2:
                if not isinstance(s.args[0], Symbol):
                    raise MalformedDo(f"arrow target must be a symbol: {to_string(s)}")
                stmts.append(Arrow(s.args[0], s.args[1]))
            else:
                stmts.append(Plain(s))
        if isinstance(stmts[-1], Arrow):
            raise MalformedDo(f"last statement of a do block cannot be an arrow: {to_string(e.args[-1])}")
        return cls(e.head.args[0], tuple(stmts))


def is_do(e: Expr) -> bool:
    return (
        isinstance(e, Compound)
        and isinstance(e.head, Compound)
        and e.head.head == DO
    )


def chk_of(m: Expr, e: Expr) -> Compound:
    return Compound(Compound(CHK, (m,)), (e,))


def bind_of(m: Expr, ma: Expr, f: Expr) -> Compound:
    return Compound(Compound(BIND, (m,)), (ma, f))


def desugar(block: DoBlock | Expr, fresh: Callable[[str], Symbol] = fresh_symbol) -> Expr:
    if not isinstance(block, DoBlock):
        block = DoBlock.from_expr(block)
    m = block.monad
    stmts = list(block.statements)
    r = stmts.pop().expr
    while stmts:
        y = stmts.pop()
        if isinstance(y, Arrow):
            var, rhs = y.var, y.rhs
        else:
            var, rhs = fresh("do"), y.expr
        r = chk_of(m, bind_of(m, rhs, Compound(FUNCTION, (var, r))))
    return chk_of(m, r)


def expand(e: Expr, fresh: Callable[[str], Symbol] = fresh_symbol) -> Expr:
    """Desugar every do block inside ``e``, innermost first."""
    if not isinstance(e, Compound):
        return e
    head = expand(e.head, fresh)
    args = tuple(expand(a, fresh) for a in e.args)
    if head is not e.head or any(a is not b for a, b in zip(args, e.args)):
        e = Compound(head, args)
    if is_do(e):
        return desugar(DoBlock.from_expr(e), fresh)
    return e


def expand_in_place(program: list[Expr], positions: list[tuple[int, int]] | None = None,
                    fresh: Callable[[str], Symbol] = fresh_symbol) -> list[Expr]:
    out = []
    for i, e in enumerate(program):
        try:
            out.append(expand(e, fresh))
        except MalformedDo as exc:
            if positions is not None:
                line, col = positions[i]
                raise type(exc)(f"{line}:{col}: {exc}") from None
            raise
    return out
