"""Monads as (type pattern, return, bind) triples plus a law-checking harness."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import DuplicateMonad, MonadTypeError, UnknownMonad, WLError
from .expr import Compound, Expr, Symbol, fresh_symbol, identity_memo, to_string
from .matcher import matches


class Kleisli:
    """A function from a plain value to a monadic one.

    ``expr`` keeps the expression form when there is one, so that monads
    defined in scripts can hand the arrow back to the evaluator.
    """

    __slots__ = ("fn", "expr")

    def __init__(self, fn: Callable[[Expr], Expr], expr: Expr | None = None):
        self.fn = fn
        self.expr = expr

    def __call__(self, x: Expr) -> Expr:
        return self.fn(x)

    def __repr__(self):
        return f"Kleisli({to_string(self.expr) if self.expr is not None else self.fn!r})"


def as_kleisli(f) -> Kleisli:
    return f if isinstance(f, Kleisli) else Kleisli(f)


@dataclass(frozen=True)
class MonadDef:
    name: str
    patterns: tuple[Expr, ...]
    return_impl: Callable[[Expr], Expr]
    bind_impl: Callable[[Expr, Kleisli], Expr]

    def __post_init__(self):
        if isinstance(self.patterns, Expr):
            object.__setattr__(self, "patterns", (self.patterns,))
        if not self.patterns:
            raise ValueError("a monad needs at least one type pattern")

    def accepts(self, v: Expr) -> bool:
        return _accepts(self.patterns, v)

    def pattern_text(self) -> str:
        return " | ".join(to_string(p) for p in self.patterns)


@identity_memo(1 << 16)
def _accepts(patterns: tuple[Expr, ...], v: Expr) -> bool:
    # the same monadic value is checked at several sites (bind input, output, do-final)
    return any(matches(p, v) for p in patterns)


class MonadRegistry:
    def __init__(self):
        self._defs: dict[str, MonadDef] = {}

    def register(self, d: MonadDef) -> None:
        if d.name in self._defs:
            raise DuplicateMonad(f"monad {d.name!r} is already registered")
        self._defs[d.name] = d

    def __contains__(self, name: str) -> bool:
        return name in self._defs

    def __getitem__(self, name: str) -> MonadDef:
        try:
            return self._defs[name]
        except KeyError:
            raise UnknownMonad(f"monad {name!r} is not registered") from None

    def names(self) -> list[str]:
        return sorted(self._defs)

    def chk(self, m: str, v: Expr, site: str = "do-final") -> Expr:
        d = self[m]
        if not d.accepts(v):
            raise MonadTypeError(m, to_string(v), d.pattern_text(), site)
        return v

    def return_checked(self, m: str, x: Expr) -> Expr:
        return self.chk(m, self[m].return_impl(x), "return")

    def bind_checked(self, m: str, ma: Expr, f) -> Expr:
        d = self[m]
        self.chk(m, ma, "bind-input")
        return self.chk(m, d.bind_impl(ma, as_kleisli(f)), "bind-output")


# -- law harness ------------------------------------------------------------------

@dataclass(frozen=True)
class LawCase:
    x: Expr
    ma: Expr
    f: Kleisli
    g: Kleisli


Generator = Callable[[random.Random], LawCase]

LAWS = ("left identity", "right identity", "associativity")


@dataclass
class LawResult:
    law: str
    cases: int = 0
    failures: int = 0
    counterexample: str | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0


@dataclass
class LawReport:
    monad: str
    results: list[LawResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def __getitem__(self, law: str) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)

    def table(self) -> str:
        rows = [("law", "cases", "failures", "first-counterexample")]
        rows += [(r.law, str(r.cases), str(r.failures), r.counterexample or "-") for r in self.results]
        widths = [max(len(row[i]) for row in rows) for i in range(3)]
        lines = []
        for row in rows:
            cells = [row[i].ljust(widths[i]) for i in range(3)] + [row[3]]
            lines.append(" | ".join(cells))
        return "\n".join(lines)


def _describe(case: LawCase, lhs, rhs) -> str:
    def show(v):
        return to_string(v) if isinstance(v, Expr) else str(v)
    return (f"x={to_string(case.x)} ma={to_string(case.ma)} f={case.f!r} g={case.g!r}: "
            f"{show(lhs)} != {show(rhs)}")


def _law_sides(reg: MonadRegistry, m: str, law: str, c: LawCase):
    bind = reg.bind_checked
    # arrows keep an expression form so that script-defined binds can use them
    mon = Symbol(m)
    ret = Kleisli(lambda v: reg.return_checked(m, v), Compound(Symbol("return"), (mon,)))
    if law == "left identity":
        return bind(m, reg.return_checked(m, c.x), c.f), c.f(c.x)
    if law == "right identity":
        return bind(m, c.ma, ret), c.ma
    composed = None
    if c.f.expr is not None and c.g.expr is not None:
        v = fresh_symbol("v")
        body = Compound(Compound(Symbol("bind"), (mon,)), (Compound(c.f.expr, (v,)), c.g.expr))
        composed = Compound(Symbol("Function"), (v, body))
    return (bind(m, bind(m, c.ma, c.f), c.g),
            bind(m, c.ma, Kleisli(lambda v: bind(m, c.f(v), c.g), composed)))


def check_laws(reg: MonadRegistry, m: str, gen: Generator, cases: int = 1000, seed: int = 0) -> LawReport:
    """Run the three monad laws on ``cases`` generated inputs; equality is structural."""
    reg[m]
    rng = random.Random(seed)
    report = LawReport(m, [LawResult(law) for law in LAWS])
    for _ in range(cases):
        case = gen(rng)
        for res in report.results:
            res.cases += 1
            try:
                lhs, rhs = _law_sides(reg, m, res.law, case)
                ok = lhs == rhs
            except WLError as exc:
                lhs, rhs, ok = f"<{type(exc).__name__}: {exc}>", "-", False
            if not ok:
                res.failures += 1
                if res.counterexample is None:
                    res.counterexample = _describe(case, lhs, rhs)
    return report


def registry_from(defs: Iterable[MonadDef]) -> MonadRegistry:
    reg = MonadRegistry()
    for d in defs:
        reg.register(d)
    return reg
