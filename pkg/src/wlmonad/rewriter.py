"""Guarded term rewriting.

Definitions fire only when their left-hand side matches; an application that
no definition accepts is a normal form and stays symbolic.  That is what lets
a recursive ``moveDiscs`` sit untouched until its tower argument is concrete.
"""

from __future__ import annotations

import gc
import itertools
import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Union

from .desugar import BIND, CHK, DO, desugar, is_do
from .errors import BudgetExhausted, MalformedLhs, WLError
from .expr import (
    BLANK,
    BLANK_NULL_SEQUENCE,
    EXCEPT,
    FUNCTION,
    PATTERN,
    REPEATED_NULL,
    SEQUENCE,
    SET_DELAYED,
    Compound,
    Expr,
    Sequence,
    Symbol,
    _mark_nf,
    fresh_symbol,
    root_symbol,
    substitute,
    symbol_names,
    to_string,
)
from .matcher import arity_shape, compile_match, fits_shape
from .monads import Kleisli, MonadDef, MonadRegistry

log = logging.getLogger(__name__)

RETURN = Symbol("return")
PATTERN_OF = Symbol("pattern")

_PATTERN_HEADS = {s.name for s in (PATTERN, BLANK, BLANK_NULL_SEQUENCE, REPEATED_NULL, EXCEPT)}

_ALWAYS_ACTIVE = frozenset({"do", "Function"})

Native = Callable[["Engine", dict], Union[Expr, None]]


@dataclass(frozen=True)
class EvalConfig:
    budget: int = 1_000_000
    trace: bool = False
    hold_heads: frozenset = frozenset({"do", "Function"})
    hold_first: frozenset = frozenset({"Pattern"})

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("step budget must be at least 1")


_gc_lock = threading.Lock()
_gc_depth = 0
_gc_owned = False


@contextmanager
def _gc_paused():
    # Expressions are immutable and acyclic, so refcounting frees everything an
    # evaluation allocates; the cycle collector only rescans the heap.  Paused
    # while any evaluation runs, left alone if the caller already disabled it.
    global _gc_depth, _gc_owned
    with _gc_lock:
        if _gc_depth == 0:
            _gc_owned = gc.isenabled()
            if _gc_owned:
                gc.disable()
        _gc_depth += 1
    try:
        yield
    finally:
        with _gc_lock:
            _gc_depth -= 1
            if _gc_depth == 0 and _gc_owned:
                gc.enable()


@dataclass(frozen=True)
class Definition:
    head: str
    lhs: Expr
    rhs: Union[Expr, Native]
    index: int
    rule_id: str = field(init=False, repr=False, compare=False)
    native: bool = field(init=False, repr=False, compare=False)
    shape: tuple = field(init=False, repr=False, compare=False)
    matcher: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # read on every rewrite attempt, so computed once
        object.__setattr__(self, "rule_id", f"{self.head}#{self.index}")
        object.__setattr__(self, "native", not isinstance(self.rhs, Expr))
        object.__setattr__(self, "shape", arity_shape(self.lhs))
        object.__setattr__(self, "matcher", compile_match(self.lhs))


@dataclass(frozen=True)
class Step:
    rule_id: str
    before: Expr
    after: Expr


def format_trace(steps: list[Step]) -> str:
    return "\n".join(
        f"#{i} {s.rule_id}: {to_string(s.before)} ==> {to_string(s.after)}"
        for i, s in enumerate(steps, 1)
    )


@dataclass
class _Run:
    cfg: EvalConfig
    token: object
    steps: int = 0
    trace: list = field(default_factory=list)

    def step(self, rule_id: str, before: Expr, after: Expr) -> None:
        self.steps += 1
        if self.steps > self.cfg.budget:
            raise BudgetExhausted(f"rewrite budget of {self.cfg.budget} steps exhausted")
        if self.cfg.trace:
            self.trace.append(Step(rule_id, before, after))


def _alpha_rename(e: Expr) -> Expr:
    """Give every Function parameter in a template a fresh ``$`` name."""
    if not isinstance(e, Compound):
        return e
    if e.head == FUNCTION and len(e.args) == 2 and isinstance(e.args[0], Symbol) \
            and not e.args[0].name.startswith("$"):
        v = e.args[0]
        nv = fresh_symbol(v.name)
        body = substitute(e.args[1], {v.name: nv})
        return Compound(FUNCTION, (nv, _alpha_rename(body)))
    head = _alpha_rename(e.head)
    args = tuple(_alpha_rename(a) for a in e.args)
    if head is e.head and all(a is b for a, b in zip(args, e.args)):
        return e
    return Compound(head, args)


class Engine:
    """A definition store plus the evaluator that rewrites against it."""

    def __init__(self, config: EvalConfig | None = None):
        self.config = config or EvalConfig()
        self.monads = MonadRegistry()
        self._defs: dict[str, list[Definition]] = {}
        self._index = itertools.count()
        self._tokens: dict = {}
        self._local = threading.local()
        self._active = _ALWAYS_ACTIVE

    # -- definitions ----------------------------------------------------------

    def _invalidate(self) -> None:
        self._tokens = {}
        # symbols that can start a rewrite; a term mentioning none of them is inert
        active = set(_ALWAYS_ACTIVE) | set(self._defs)
        if self.monads.names():
            active |= {CHK.name, BIND.name, RETURN.name}
        self._active = frozenset(active)

    def define(self, lhs: Expr, rhs: Union[Expr, Native]) -> int:
        if isinstance(lhs, Symbol):
            head = lhs.name
        elif isinstance(lhs, Compound):
            root = root_symbol(lhs)
            if root is None or root.name in _PATTERN_HEADS:
                raise MalformedLhs(f"left-hand side has no head symbol: {to_string(lhs)}")
            head = root.name
        else:
            raise MalformedLhs(f"cannot define an atom: {to_string(lhs)}")
        if isinstance(rhs, Expr):
            rhs = _alpha_rename(rhs)
        idx = next(self._index)
        self._defs.setdefault(head, []).append(Definition(head, lhs, rhs, idx))
        self._invalidate()
        return idx

    def definitions(self, head: str | None = None) -> list[Definition]:
        if head is not None:
            return list(self._defs.get(head, ()))
        return sorted((d for ds in self._defs.values() for d in ds), key=lambda d: d.index)

    def register_monad(self, d: MonadDef) -> None:
        self.monads.register(d)
        self._invalidate()

    def resolve_lhs(self, lhs: Expr) -> Expr:
        """Evaluate the argument positions of a definition's left-hand side.

        ``grab[ma : pattern[hT]]`` becomes ``grab[ma : hT[{_List,...},...]]``;
        the application chain itself is left alone.
        """
        if not isinstance(lhs, Compound):
            return lhs
        head = self.resolve_lhs(lhs.head) if isinstance(lhs.head, Compound) else lhs.head
        return Compound(head, tuple(self.evaluate(a) for a in lhs.args))

    @staticmethod
    def is_definition(stmt: Expr) -> bool:
        return isinstance(stmt, Compound) and stmt.head is SET_DELAYED and len(stmt.args) == 2

    def execute(self, stmt: Expr) -> Expr | None:
        """Run one top-level statement: ``lhs := rhs`` defines, anything else evaluates."""
        if self.is_definition(stmt):
            lhs = self.resolve_lhs(stmt.args[0])
            self.define(lhs, stmt.args[1])
            if isinstance(lhs, Compound) and lhs.head == PATTERN_OF and len(lhs.args) == 1 \
                    and isinstance(lhs.args[0], Symbol):
                self._register_script_monad(lhs.args[0].name)
            return None
        return self.evaluate(stmt)

    def load(self, program: list[Expr]) -> list[Expr]:
        results = []
        for stmt in program:
            r = self.execute(stmt)
            if r is not None:
                results.append(r)
        return results

    def _register_script_monad(self, name: str) -> None:
        m = Symbol(name)
        pattern = self.evaluate(Compound(PATTERN_OF, (m,)))

        def ret(x: Expr) -> Expr:
            return self.rewrite_with_definitions(Compound(Compound(RETURN, (m,)), (x,)))

        def bind(ma: Expr, f: Kleisli) -> Expr:
            if f.expr is None:
                raise WLError(f"monad {name} is defined by a script; its bind needs an expression-valued arrow")
            return self.rewrite_with_definitions(Compound(Compound(BIND, (m,)), (ma, f.expr)))

        self.register_monad(MonadDef(name, (pattern,), ret, bind))

    # -- evaluation -------------------------------------------------------------

    def _token(self, cfg: EvalConfig):
        key = (cfg.hold_heads, cfg.hold_first)
        tok = self._tokens.get(key)
        if tok is None:
            tok = self._tokens[key] = object()
        return tok

    def _current(self) -> _Run | None:
        return getattr(self._local, "run", None)

    def _start(self, cfg: EvalConfig | None) -> tuple[_Run, bool]:
        run = self._current()
        if run is not None:
            return run, False
        cfg = cfg or self.config
        run = _Run(cfg, self._token(cfg))
        self._local.run = run
        return run, True

    @contextmanager
    def _session(self, cfg: EvalConfig | None):
        run, outer = self._start(cfg)
        if not outer:
            yield run, False
            return
        try:
            with _gc_paused():
                yield run, True
        finally:
            self._local.run = None

    def evaluate(self, e: Expr, cfg: EvalConfig | None = None) -> Expr:
        with self._session(cfg) as (run, outer):
            try:
                return self._eval(e, run)
            except WLError as exc:
                if outer and run.cfg.trace and run.trace:
                    tail = format_trace(run.trace[-10:])
                    exc.args = (f"{exc.args[0] if exc.args else exc}\nlast rewrites:\n{tail}",)
                raise

    def trace(self, e: Expr, cfg: EvalConfig | None = None) -> list[Step]:
        return self.evaluate_traced(e, cfg)[1]

    def evaluate_traced(self, e: Expr, cfg: EvalConfig | None = None) -> tuple[Expr, list[Step]]:
        """Evaluate with tracing on; on failure the partial trace is attached as ``exc.trace``."""
        cfg = cfg or self.config
        if not cfg.trace:
            cfg = EvalConfig(cfg.budget, True, cfg.hold_heads, cfg.hold_first)
        with self._session(cfg) as (run, _):
            try:
                return self._eval(e, run), run.trace
            except WLError as exc:
                exc.trace = list(run.trace)
                raise

    def evaluate_with_steps(self, e: Expr, cfg: EvalConfig | None = None) -> tuple[Expr, int]:
        with self._session(cfg) as (run, _):
            return self._eval(e, run), run.steps

    def apply(self, f: Expr, x: Expr) -> Expr:
        return self.evaluate(Compound(f, (x,)))

    def kleisli(self, f: Expr) -> Kleisli:
        return Kleisli(lambda x: self.apply(f, x), f)

    def rewrite_with_definitions(self, e: Expr) -> Expr:
        """Try only user definitions on ``e`` (no monad built-ins), then evaluate."""
        with self._session(None) as (run, _):
            root = root_symbol(e)
            defs = self._defs.get(root.name) if root is not None else None
            after = self._apply_definitions(e, defs, run) if defs else None
            return e if after is None else self._eval(after, run)

    def _eval(self, e: Expr, run: _Run) -> Expr:
        tok = run.token
        cfg = run.cfg
        while True:
            if e._nf is tok:
                return e
            t = type(e)
            if t is Symbol:
                defs = self._defs.get(e.name)
                if defs:
                    after = self._apply_definitions(e, defs, run)
                    if after is not None:
                        e = after
                        continue
                _mark_nf(e, tok)
                return e
            if t is not Compound:
                _mark_nf(e, tok)
                return e
            syms = e._syms
            if syms is None:
                syms = symbol_names(e)
            if syms.isdisjoint(self._active):
                _mark_nf(e, tok)
                return e
            h = e.head
            if type(h) is Compound and h.head is DO:
                after = desugar(e)
                run.step("do", e, after)
                e = after
                continue
            h2 = self._eval(h, run)
            name = h2.name if type(h2) is Symbol else None
            args = e.args
            if name in cfg.hold_heads:
                pass
            elif name in cfg.hold_first:
                args = args[:1] + tuple(self._eval(a, run) for a in args[1:])
                if all(a is b for a, b in zip(args, e.args)):
                    args = e.args
            else:
                new = None
                for i, a in enumerate(args):
                    if a._nf is not tok:
                        v = self._eval(a, run)
                        if v is not a:
                            if new is None:
                                new = list(args)
                            new[i] = v
                if new is not None:
                    args = tuple(new)
            if h2 is not h or args is not e.args:
                e = Compound(h2, args)
            after = self._rewrite(e, run)
            if after is None:
                _mark_nf(e, tok)
                return e
            e = after

    def _rewrite(self, e: Compound, run: _Run) -> Expr | None:
        h = e.head
        if type(h) is Compound:
            if h.head == FUNCTION and len(h.args) == 2 and type(h.args[0]) is Symbol and len(e.args) == 1:
                after = substitute(h.args[1], {h.args[0].name: e.args[0]})
                if isinstance(after, Sequence):
                    after = Compound(SEQUENCE, after.items)
                run.step("beta", e, after)
                return after
            if len(h.args) == 1 and type(h.args[0]) is Symbol and h.args[0].name in self.monads:
                after = self._monad_builtin(h.head, h.args[0].name, e, run)
                if after is not None:
                    run.step(h.head.name, e, after)
                    return after
        while type(h) is Compound:
            h = h.head
        if type(h) is not Symbol:
            return None
        defs = self._defs.get(h.name)
        return self._apply_definitions(e, defs, run) if defs else None

    def _monad_builtin(self, op: Expr, m: str, e: Compound, run: _Run) -> Expr | None:
        n = len(e.args)
        if op == CHK and n == 1:
            return self.monads.chk(m, e.args[0], "do-final")
        if op == RETURN and n == 1:
            return self.monads.return_checked(m, e.args[0])
        if op == BIND and n == 2:
            f = e.args[1]
            k = Kleisli(lambda x: self._eval(Compound(f, (x,)), run), f)
            return self.monads.bind_checked(m, e.args[0], k)
        return None

    def _apply_definitions(self, e: Expr, defs: list[Definition], run: _Run) -> Expr | None:
        for d in defs:
            if not fits_shape(d.shape, e):
                continue
            res = d.matcher(e)
            if not res.success:
                continue
            if d.native:
                after = d.rhs(self, res.bindings)
                if after is None:
                    continue
            else:
                after = substitute(d.rhs, res.bindings)
                if isinstance(after, Sequence):
                    after = Compound(SEQUENCE, after.items)
            run.step(d.rule_id, e, after)
            return after
        return None
