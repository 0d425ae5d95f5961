"""Structural pattern matching: patterns are types, matching is membership.

Supported pattern forms::

    _ / _h                 Blank[] / Blank[h]            one expression (with head h)
    ___ / ___h             BlankNullSequence[...]        zero or more arguments
    x_  x___  x:p          Pattern[x, p]                 capture under the name x
    p...                   RepeatedNull[p]               zero or more arguments matching p
    Except[p]                                            one expression not matching p

Anything else matches literally and structurally.

:func:`match` is a backtracking matcher returning the first solution in
shortest-first order.  :func:`match_all` is a deliberately naive enumerator
(every split, every combination, then a sort) used as its oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

from .errors import BoundExceeded
from .expr import (
    BLANK,
    BLANK_NULL_SEQUENCE,
    EXCEPT,
    PATTERN,
    REPEATED_NULL,
    Bindings,
    Compound,
    Expr,
    Sequence,
    Symbol,
    head_of,
    identity_memo,
)

DEFAULT_ARITY_BOUND = 16


@dataclass(frozen=True)
class MatchResult:
    success: bool
    bindings: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.success


_FAIL = MatchResult(False)


def _is_blank(p: Expr) -> bool:
    return type(p) is Compound and p.head == BLANK and len(p.args) <= 1


def _is_blank_seq(p: Expr) -> bool:
    return type(p) is Compound and p.head == BLANK_NULL_SEQUENCE and len(p.args) <= 1


def _is_named(p: Expr) -> bool:
    return type(p) is Compound and p.head == PATTERN and len(p.args) == 2 and isinstance(p.args[0], Symbol)


def _is_repeat(p: Expr) -> bool:
    return type(p) is Compound and p.head == REPEATED_NULL and len(p.args) == 1


def _is_except(p: Expr) -> bool:
    return type(p) is Compound and p.head == EXCEPT and len(p.args) == 1


@lru_cache(maxsize=1 << 16)
def is_sequence_pattern(p: Expr) -> bool:
    """True for patterns that consume a run of arguments rather than one."""
    if _is_blank_seq(p) or _is_repeat(p):
        return True
    return _is_named(p) and is_sequence_pattern(p.args[1])


@lru_cache(maxsize=1 << 16)
def is_ground(p: Expr) -> bool:
    """No named captures anywhere, so the outcome depends only on (p, e)."""
    if _is_named(p):
        return False
    if type(p) is Compound:
        return is_ground(p.head) and all(is_ground(a) for a in p.args)
    return True


def _bind(b: dict, name: str, value) -> dict | None:
    old = b.get(name)
    if old is None:
        nb = dict(b)
        nb[name] = value
        return nb
    return b if old == value else None


# -- fast path ----------------------------------------------------------------

@identity_memo(1 << 16)
def _ground_match(p: Expr, e: Expr) -> bool:
    for _ in _one(p, e, {}, use_cache=False):
        return True
    return False


@lru_cache(maxsize=1 << 16)
def is_simple(p: Expr) -> bool:
    """No sequence patterns outside Except: at most one way to match."""
    if type(p) is not Compound:
        return True
    if is_sequence_pattern(p):
        return False
    if _is_except(p) or _is_blank(p):
        return True
    if not is_simple(p.head):
        return False
    # a single variable-length slot still splits the arguments in one way only
    slots = 0
    for a in p.args:
        if is_sequence_pattern(a):
            slots += 1
            if slots > 1 or not _simple_slot(a):
                return False
        elif not is_simple(a):
            return False
    return True


def _simple_slot(p: Expr) -> bool:
    while _is_named(p):
        p = p.args[1]
    if _is_blank_seq(p):
        return True
    return _is_repeat(p) and is_simple(p.args[0])


def _simple(p: Expr, e: Expr, b: dict) -> dict | None:
    return _compile_simple(p)(e, b)


def _has_pattern_syntax(p: Expr) -> bool:
    if type(p) is not Compound:
        return False
    if _is_blank(p) or _is_named(p) or _is_except(p) or is_sequence_pattern(p):
        return True
    return _has_pattern_syntax(p.head) or any(_has_pattern_syntax(a) for a in p.args)


@lru_cache(maxsize=1 << 14)
def _compile_simple(p: Expr):
    """Turn a simple pattern into a function ``(e, bindings) -> bindings | None``."""
    if not _has_pattern_syntax(p):
        return lambda e, b: b if (e is p or e == p) else None
    if _is_blank(p):
        if not p.args:
            return lambda e, b: b
        h = p.args[0]
        return lambda e, b: b if head_of(e) == h else None
    if _is_named(p):
        sub, name = _compile_simple(p.args[1]), p.args[0].name

        def named(e, b):
            b = sub(e, b)
            return None if b is None else _bind(b, name, e)
        return named
    if _is_except(p):
        q = p.args[0]

        def except_(e, b):
            for _ in _one(q, e, {}):
                return None
            return b
        return except_
    head = _compile_simple(p.head)
    slot = next((i for i, a in enumerate(p.args) if is_sequence_pattern(a)), None)
    if slot is not None:
        return _compile_slotted(head, p.args, slot)
    parts = tuple(_compile_simple(a) for a in p.args)
    n = len(parts)

    def compound(e, b):
        if type(e) is not Compound or len(e.args) != n:
            return None
        b = head(e.head, b)
        for m, a in zip(parts, e.args):
            if b is None:
                return None
            b = m(a, b)
        return b
    return compound


_KNOWN_LIMIT = 1 << 16


def _compile_run(p: Expr):
    """Matcher for an exact run of arguments against a simple sequence pattern."""
    if _is_named(p):
        sub, name = _compile_run(p.args[1]), p.args[0].name

        def named(run, b):
            b = sub(run, b)
            return None if b is None else _bind(b, name, Sequence(run))
        return named
    if _is_blank_seq(p):
        if not p.args:
            return lambda run, b: b
        h = p.args[0]
        return lambda run, b: b if all(head_of(e) == h for e in run) else None
    q = p.args[0]
    if is_ground(q):
        # keyed by identity: equal but separately built elements would cost a deep compare
        known: dict = {}

        def each_ground(run, b):
            # move logs grow by concatenation, so most elements were seen before
            get = known.get
            for e in run:
                if get(id(e)) is not e:
                    if not _ground_match(q, e):
                        return None
                    if len(known) >= _KNOWN_LIMIT:
                        known.clear()
                    known[id(e)] = e
            return b
        return each_ground
    m = _compile_simple(q)

    def each(run, b):
        for e in run:
            b = m(e, b)
            if b is None:
                return None
        return b
    return each


def _compile_slotted(head, ps: tuple, slot: int):
    before = tuple(_compile_simple(a) for a in ps[:slot])
    after = tuple(_compile_simple(a) for a in ps[slot + 1:])
    mid = _compile_run(ps[slot])
    fixed = len(before) + len(after)

    def slotted(e, b):
        if type(e) is not Compound or len(e.args) < fixed:
            return None
        b = head(e.head, b)
        args = e.args
        k = len(args) - len(after)
        for m, a in zip(before, args):
            if b is None:
                return None
            b = m(a, b)
        if b is None:
            return None
        b = mid(args[slot:k], b)
        for m, a in zip(after, args[k:]):
            if b is None:
                return None
            b = m(a, b)
        return b
    return slotted


def _one(p: Expr, e: Expr, b: dict, use_cache: bool = True) -> Iterator[dict]:
    if is_simple(p):
        r = _simple(p, e, b)
        if r is not None:
            yield r
        return
    if type(p) is not Compound:
        if p == e:
            yield b
        return
    if _is_blank(p):
        if not p.args or head_of(e) == p.args[0]:
            yield b
        return
    if use_cache and is_ground(p):
        if _ground_match(p, e):
            yield b
        return
    if is_sequence_pattern(p):
        yield from _run(p, (e,), b)
        return
    if _is_named(p):
        name = p.args[0].name
        for b1 in _one(p.args[1], e, b):
            b2 = _bind(b1, name, e)
            if b2 is not None:
                yield b2
        return
    if _is_except(p):
        for _ in _one(p.args[0], e, {}):
            return
        yield b
        return
    if type(e) is not Compound:
        return
    for b1 in _one(p.head, e.head, b):
        yield from _seq(p.args, 0, e.args, 0, b1)


@lru_cache(maxsize=1 << 14)
def _suffix_bounds(ps: tuple) -> tuple[tuple[int, int | None], ...]:
    """(min, max) number of subject arguments consumed by ps[i:], for every i."""
    out: list[tuple[int, int | None]] = [(0, 0)]
    lo, hi = 0, 0
    for p in reversed(ps):
        if is_sequence_pattern(p):
            hi = None
        else:
            lo += 1
            hi = None if hi is None else hi + 1
        out.append((lo, hi))
    return tuple(reversed(out))


def _feasible_run(p: Expr, es: tuple, j: int, limit: int) -> int:
    """Upper bound on how many arguments starting at j the sequence pattern p can take."""
    while _is_named(p):
        p = p.args[1]
    if _is_blank_seq(p) and p.args:
        k = 0
        while k < limit and head_of(es[j + k]) == p.args[0]:
            k += 1
        return k
    if _is_repeat(p) and is_ground(p.args[0]):
        q = p.args[0]
        k = 0
        while k < limit and _ground_match(q, es[j + k]):
            k += 1
        return k
    return limit


def _seq(ps: tuple, i: int, es: tuple, j: int, b: dict) -> Iterator[dict]:
    if i == len(ps):
        if j == len(es):
            yield b
        return
    p = ps[i]
    remaining = len(es) - j
    rest_lo, rest_hi = _suffix_bounds(ps)[i + 1]
    if not is_sequence_pattern(p):
        if remaining < 1 + rest_lo or (rest_hi is not None and remaining > 1 + rest_hi):
            return
        for b1 in _one(p, es[j], b):
            yield from _seq(ps, i + 1, es, j + 1, b1)
        return
    lo = 0 if rest_hi is None else max(0, remaining - rest_hi)
    hi = remaining - rest_lo
    if hi < lo:
        return
    hi = min(hi, _feasible_run(p, es, j, hi))
    for k in range(lo, hi + 1):
        for b1 in _run(p, es[j:j + k], b):
            yield from _seq(ps, i + 1, es, j + k, b1)


def _run(p: Expr, run: tuple, b: dict) -> Iterator[dict]:
    """Match a sequence pattern against an exact run of arguments."""
    if _is_blank_seq(p):
        if not p.args or all(head_of(e) == p.args[0] for e in run):
            yield b
        return
    if _is_repeat(p):
        yield from _each(p.args[0], run, 0, b)
        return
    # named sequence pattern
    name = p.args[0].name
    for b1 in _run(p.args[1], run, b):
        b2 = _bind(b1, name, Sequence(run))
        if b2 is not None:
            yield b2


def _each(q: Expr, run: tuple, idx: int, b: dict) -> Iterator[dict]:
    """Every element of run[idx:] matches q, with consistent captures."""
    n = len(run)
    if idx == n:
        yield b
        return
    if is_ground(q):
        # _feasible_run has usually just checked these, so this is all cache hits
        if all(_ground_match(q, e) for e in run[idx:]):
            yield b
        return
    # explicit stack: runs can be far longer than the recursion limit
    stack = [_one(q, run[idx], b)]
    while stack:
        b1 = next(stack[-1], None)
        if b1 is None:
            stack.pop()
        elif idx + len(stack) == n:
            yield b1
        else:
            stack.append(_one(q, run[idx + len(stack)], b1))


def iter_matches(p: Expr, e: Expr) -> Iterator[dict]:
    """All solutions, lazily, in shortest-first order."""
    if is_sequence_pattern(p):
        return _seq((p,), 0, (e,), 0, {})
    return _one(p, e, {})


@lru_cache(maxsize=1 << 14)
def arity_shape(p: Expr) -> tuple:
    """Argument counts along the head chain of a literal compound pattern.

    ``None`` marks a level whose width is not fixed (it holds a sequence
    pattern) or a pattern that is not a literal compound at all.  Used to
    reject impossible subjects without running the matcher.
    """
    shape = []
    while type(p) is Compound and not (_is_blank(p) or _is_named(p) or _is_except(p)
                                       or is_sequence_pattern(p)):
        fixed = not any(is_sequence_pattern(a) for a in p.args)
        shape.append(len(p.args) if fixed else None)
        p = p.head
    return tuple(shape)


def fits_shape(shape: tuple, e: Expr) -> bool:
    for width in shape:
        if type(e) is not Compound:
            return False
        if width is not None and len(e.args) != width:
            return False
        e = e.head
    return True


def match(p: Expr, e: Expr) -> MatchResult:
    """Is ``e`` in the type denoted by ``p``?  Returns the first binding set."""
    if is_simple(p):
        b = _simple(p, e, {})
        return _FAIL if b is None else MatchResult(True, b)
    if is_ground(p):
        return MatchResult(True, {}) if _ground_match(p, e) else _FAIL
    for b in iter_matches(p, e):
        return MatchResult(True, b)
    return _FAIL


def compile_match(p: Expr) -> Callable[[Expr], MatchResult]:
    """``match`` specialised to one pattern, for callers that reuse it many times."""
    if is_simple(p):
        m = _compile_simple(p)

        def simple(e):
            b = m(e, {})
            return _FAIL if b is None else MatchResult(True, b)
        return simple
    if is_ground(p):
        return lambda e: MatchResult(True, {}) if _ground_match(p, e) else _FAIL
    return lambda e: match(p, e)


def matches(p: Expr, e: Expr) -> bool:
    if is_ground(p):
        return _ground_match(p, e)
    if is_simple(p):
        return _simple(p, e, {}) is not None
    for _ in iter_matches(p, e):
        return True
    return False


# -- brute-force oracle ---------------------------------------------------------

def _merge(*parts: Bindings) -> dict | None:
    out: dict = {}
    for part in parts:
        for k, v in part.items():
            if k in out and out[k] != v:
                return None
            out[k] = v
    return out


def _all_one(p: Expr, e: Expr) -> list[dict]:
    if type(p) is not Compound:
        return [{}] if p == e else []
    if p.head == BLANK and len(p.args) <= 1:
        return [{}] if not p.args or head_of(e) == p.args[0] else []
    if is_sequence_pattern(p):
        return _all_run(p, (e,))
    if p.head == PATTERN and len(p.args) == 2 and isinstance(p.args[0], Symbol):
        out = []
        for sol in _all_one(p.args[1], e):
            m = _merge(sol, {p.args[0].name: e})
            if m is not None:
                out.append(m)
        return out
    if p.head == EXCEPT and len(p.args) == 1:
        return [] if _all_one(p.args[0], e) else [{}]
    if type(e) is not Compound:
        return []
    out = []
    for hs in _all_one(p.head, e.head):
        for sa in _all_seq(p.args, e.args):
            m = _merge(hs, sa)
            if m is not None:
                out.append(m)
    return out


def _all_run(p: Expr, run: tuple) -> list[dict]:
    if p.head == BLANK_NULL_SEQUENCE:
        return [{}] if not p.args or all(head_of(e) == p.args[0] for e in run) else []
    if p.head == REPEATED_NULL:
        per = [_all_one(p.args[0], e) for e in run]
        out = []
        for combo in itertools.product(*per):
            m = _merge(*combo)
            if m is not None:
                out.append(m)
        return out
    out = []
    for sol in _all_run(p.args[1], run):
        m = _merge(sol, {p.args[0].name: Sequence(run)})
        if m is not None:
            out.append(m)
    return out


def _compositions(ps: tuple, total: int):
    seq_positions = [i for i, p in enumerate(ps) if is_sequence_pattern(p)]
    fixed = len(ps) - len(seq_positions)
    free = total - fixed
    if free < 0:
        return
    for lengths in itertools.product(range(free + 1), repeat=len(seq_positions)):
        if sum(lengths) != free:
            continue
        sizes = [1] * len(ps)
        for pos, k in zip(seq_positions, lengths):
            sizes[pos] = k
        yield sizes


def _all_seq(ps: tuple, es: tuple) -> list[dict]:
    keyed = []
    for sizes in _compositions(ps, len(es)):
        pieces, j = [], 0
        for p, k in zip(ps, sizes):
            piece = es[j:j + k]
            j += k
            pieces.append(_all_run(p, piece) if is_sequence_pattern(p) else _all_one(p, piece[0]))
        for combo in itertools.product(*(list(enumerate(s)) for s in pieces)):
            m = _merge(*(sol for _, sol in combo))
            if m is None:
                continue
            key = tuple(x for k, (idx, _) in zip(sizes, combo) for x in (k, idx))
            keyed.append((key, m))
    keyed.sort(key=lambda kv: kv[0])
    return [m for _, m in keyed]


def match_all(p: Expr, e: Expr, arity_bound: int = DEFAULT_ARITY_BOUND) -> list[dict]:
    """Every solution, by exhaustive enumeration, in the order :func:`match` visits them."""
    for x in _walk_compounds(e):
        if len(x.args) > arity_bound:
            raise BoundExceeded(f"compound of arity {len(x.args)} exceeds bound {arity_bound}")
    return _all_seq((p,), (e,))


def _walk_compounds(e: Expr):
    stack = [e]
    while stack:
        x = stack.pop()
        if type(x) is Compound:
            yield x
            stack.append(x.head)
            stack.extend(x.args)
