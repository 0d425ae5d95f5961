"""Standard definitions: a small prelude, the maybe and list monads, and the
tower-of-Hanoi writer monad ``hT`` with its recursive solver.

maybe and list use the textbook formulations::

    maybe:  return x = just[x];   nothing >>= f = nothing;   just[x] >>= f = f x
    list:   return x = {x};       xs >>= f = concatenation of f over xs
"""

from __future__ import annotations

import random
from typing import Callable

from .desugar import expand
from .errors import NoSuchPole
from .expr import (
    LIST,
    REPEATED_NULL,
    RULE,
    Compound,
    Expr,
    Integer,
    Symbol,
    fresh_symbol,
    is_list,
    lift,
    lst,
)
from .matcher import matches
from .monads import Generator, Kleisli, LawCase, MonadDef
from .parser import parse
from .rewriter import Engine

TRUE = Symbol("True")
FALSE = Symbol("False")

NOTHING = Symbol("nothing")
JUST = Symbol("just")

HT = Symbol("hT")
GRAB = Symbol("grab")
REST = Symbol("rest")
JOIN = Symbol("join")
MOVE_DISCS = Symbol("moveDiscs")
MAKE_TOWER = Symbol("makeTower")
OTHER = Symbol("other")

TOWERS = parse("{_List, _List, _List}")
MOVE = parse("{_ -> _, {_List, _List, _List}}")
MOVES = Compound(LIST, (Compound(REPEATED_NULL, (MOVE,)),))
HT_PATTERN = Compound(HT, (TOWERS, MOVES))

# The single-disc rule is native; the general rule is written with do-notation
# and desugared when installed.
MOVE_DISCS_N_SOURCE = """
moveDiscs[from_, to_, n_][tower : towers] :=
   do[hT][
      toOther <- moveDiscs[from, other[from, to], Subtract[n, 1]][tower],
      toGoal <- moveDiscs[from, to, 1][toOther],
      finalMove <- moveDiscs[other[from, to], to, Subtract[n, 1]][toGoal],
      return[hT][finalMove]
   ]
"""


def _ints(b: dict, name: str) -> list[int]:
    return [x.value for x in b[name].items]


# -- prelude ----------------------------------------------------------------------

def _part(e: Expr, idx: list[int]) -> Expr | None:
    for i in idx:
        if not isinstance(e, Compound):
            return None
        if i == 0:
            e = e.head
        elif 1 <= abs(i) <= len(e.args):
            e = e.args[i - 1] if i > 0 else e.args[i]
        else:
            return None
    return e


def _replace_part(e: Compound, i: int, v: Expr) -> Expr | None:
    if not 1 <= i <= len(e.args):
        return None
    args = list(e.args)
    args[i - 1] = v
    return Compound(e.head, args)


def install_prelude(engine: Engine) -> None:
    """Integer arithmetic, list surgery and MatchQ, enough to write scripts with."""
    d = engine.define
    d(parse("Plus[xs___Integer]"), lambda ev, b: Integer(sum(_ints(b, "xs"))))
    d(parse("Times[xs___Integer]"), lambda ev, b: Integer(_product(_ints(b, "xs"))))
    d(parse("Subtract[a_Integer, b_Integer]"), lambda ev, b: Integer(b["a"].value - b["b"].value))
    d(parse("Join[xs___List]"),
      lambda ev, b: Compound(LIST, [a for x in b["xs"].items for a in x.args]))
    d(parse("Length[xs_List]"), lambda ev, b: Integer(len(b["xs"].args)))
    d(parse("Range[n_Integer]"), lambda ev, b: lst(*range(1, b["n"].value + 1)))
    d(parse("Take[xs_List, n_Integer]"),
      lambda ev, b: Compound(LIST, b["xs"].args[:b["n"].value]) if b["n"].value >= 0 else None)
    d(parse("Drop[xs_List, n_Integer]"),
      lambda ev, b: Compound(LIST, b["xs"].args[b["n"].value:]) if b["n"].value >= 0 else None)
    d(parse("Part[e_, is___Integer]"), lambda ev, b: _part(b["e"], _ints(b, "is")))
    d(parse("ReplacePart[e_List, i_Integer -> v_]"),
      lambda ev, b: _replace_part(b["e"], b["i"].value, b["v"]))
    d(parse("MatchQ[e_, p_]"), lambda ev, b: TRUE if matches(b["p"], b["e"]) else FALSE)


def _product(xs: list[int]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


# -- maybe and list -----------------------------------------------------------------

def just(x) -> Compound:
    return Compound(JUST, (lift(x),))


def maybe_return(x: Expr) -> Expr:
    return Compound(JUST, (x,))


def maybe_bind(ma: Expr, f: Callable[[Expr], Expr]) -> Expr:
    if ma == NOTHING:
        return NOTHING
    return f(ma.args[0])


MAYBE = MonadDef("maybe", (NOTHING, parse("just[_]")), maybe_return, maybe_bind)


def list_return(x: Expr) -> Expr:
    return Compound(LIST, (x,))


def list_bind(xs: Expr, f: Callable[[Expr], Expr]) -> Expr:
    parts = [f(x) for x in xs.args]
    if all(is_list(p) for p in parts):
        return Compound(LIST, [a for p in parts for a in p.args])
    return Compound(Symbol("Join"), parts)


LIST_MONAD = MonadDef("list", (parse("_List"),), list_return, list_bind)


# -- Hanoi --------------------------------------------------------------------------

def make_tower(n: int) -> Expr:
    """``{{1,...,n},{},{}}``"""
    if n < 0:
        raise ValueError("tower size must be non-negative")
    return lst(list(range(1, n + 1)), [], [])


def other(i: int, j: int) -> int:
    """The pole that is neither i nor j."""
    if i not in (1, 2, 3) or j not in (1, 2, 3) or i == j:
        raise NoSuchPole(f"no third pole for ({i}, {j})")
    return 6 - i - j


def return_hT(x: Expr) -> Expr:
    return Compound(HT, (x, Compound(LIST, ())))


def grab(ma: Expr) -> Expr:
    if matches(HT_PATTERN, ma):
        return ma.args[0]
    return Compound(GRAB, (ma,))


def rest(ma: Expr) -> Expr:
    if matches(HT_PATTERN, ma):
        return ma.args[1]
    return Compound(REST, (ma,))


def join(a: Expr, b: Expr) -> Expr:
    """Concatenate two move logs; stays symbolic until both are concrete logs."""
    if matches(MOVES, a) and matches(MOVES, b):
        return Compound(LIST, a.args + b.args)
    return Compound(JOIN, (a, b))


def bind_hT(ma: Expr, f: Callable[[Expr], Expr]) -> Expr:
    val = f(grab(ma))
    return Compound(HT, (grab(val), join(rest(ma), rest(val))))


def move_discs_1(frm: int, to: int, tower: Expr) -> Expr:
    """Move the top disc of pole ``frm`` onto pole ``to`` and log it.

    No legality check is made: an empty source pole or a larger disc on a
    smaller one produce a record that a replay validator will reject.
    """
    poles = [list(p.args) for p in tower.args]
    moved = poles[frm - 1][:1]
    poles[to - 1] = moved + poles[to - 1]
    poles[frm - 1] = poles[frm - 1][1:]
    newtower = Compound(LIST, [Compound(LIST, p) for p in poles])
    record = Compound(LIST, (Compound(RULE, (Integer(frm), Integer(to))), newtower))
    return Compound(HT, (newtower, Compound(LIST, (record,))))


def move_discs_n(frm: int, to: int, n: int, tower: Expr, engine: Engine | None = None) -> Expr:
    """Evaluate ``moveDiscs[frm, to, n][tower]`` with the recursive do-notation rule."""
    if n < 1:
        raise ValueError("moveDiscs has no rule for fewer than one disc")
    engine = engine or standard_engine()
    e = Compound(Compound(MOVE_DISCS, (Integer(frm), Integer(to), Integer(n))), (tower,))
    return engine.evaluate(e)


def _pole(b: dict, name: str) -> int | None:
    v = b[name]
    return v.value if isinstance(v, Integer) and v.value in (1, 2, 3) else None


def _native_move_1(ev: Engine, b: dict) -> Expr | None:
    frm, to = _pole(b, "from"), _pole(b, "to")
    if frm is None or to is None or frm == to:
        return None
    return move_discs_1(frm, to, b["tower"])


def _native_other(ev: Engine, b: dict) -> Expr:
    return Integer(other(b["i"].value, b["j"].value))


def _native_make_tower(ev: Engine, b: dict) -> Expr | None:
    n = b["n"].value
    return make_tower(n) if n >= 0 else None


HT_MONAD = MonadDef("hT", (HT_PATTERN,), return_hT, bind_hT)


def install_hanoi(engine: Engine, monad: MonadDef = HT_MONAD) -> None:
    engine.register_monad(monad)
    d = engine.define
    d(Symbol("towers"), TOWERS)
    d(Symbol("move"), MOVE)
    d(Compound(Symbol("pattern"), (HT,)), HT_PATTERN)
    d(Compound(GRAB, (Compound(Symbol("Pattern"), (Symbol("ma"), HT_PATTERN)),)),
      lambda ev, b: b["ma"].args[0])
    d(Compound(REST, (Compound(Symbol("Pattern"), (Symbol("ma"), HT_PATTERN)),)),
      lambda ev, b: b["ma"].args[1])
    d(engine.resolve_lhs(parse("join[a : {move ...}, b : {move ...}]")),
      lambda ev, b: Compound(LIST, b["a"].args + b["b"].args))
    d(parse("other[i_Integer, j_Integer]"), _native_other)
    d(parse("makeTower[n_Integer]"), _native_make_tower)
    d(engine.resolve_lhs(parse("moveDiscs[from_, to_, 1][tower : towers]")), _native_move_1)
    stmt = expand(parse(MOVE_DISCS_N_SOURCE))
    engine.execute(stmt)


def standard_engine(*, hanoi: bool = True, monads: bool = True) -> Engine:
    engine = Engine()
    install_prelude(engine)
    if monads:
        engine.register_monad(MAYBE)
        engine.register_monad(LIST_MONAD)
    if hanoi:
        install_hanoi(engine)
    return engine


# -- Hanoi helpers for checking results ----------------------------------------------

def tower_lists(t: Expr) -> list[list[int]]:
    return [[d.value for d in pole.args] for pole in t.args]


def moves_of(ht: Expr) -> list[tuple[int, int, list[list[int]]]]:
    return [(r.args[0].args[0].value, r.args[0].args[1].value, tower_lists(r.args[1]))
            for r in ht.args[1].args]


def replay(start: list[list[int]], moves) -> list[str]:
    """Replay logged transfers, returning a list of problems (empty if all legal)."""
    poles = [list(p) for p in start]
    problems = []
    for k, (frm, to, snap) in enumerate(moves, 1):
        if frm == to or not (1 <= frm <= 3 and 1 <= to <= 3):
            problems.append(f"move {k}: bad poles {frm}->{to}")
            continue
        src, dst = poles[frm - 1], poles[to - 1]
        if not src:
            problems.append(f"move {k}: pole {frm} is empty")
            continue
        if dst and dst[0] < src[0]:
            problems.append(f"move {k}: disc {src[0]} onto smaller disc {dst[0]}")
        dst.insert(0, src.pop(0))
        if poles != snap:
            problems.append(f"move {k}: snapshot {snap} != replayed {poles}")
    return problems


# -- law generators ----------------------------------------------------------------

def _arrow(engine: Engine, build: Callable[[Symbol], Expr]) -> Kleisli:
    v = fresh_symbol("a")
    return engine.kleisli(Compound(Symbol("Function"), (v, build(v))))


def maybe_generator(engine: Engine) -> Generator:
    def arrows(rng: random.Random) -> Kleisli:
        c = Integer(rng.randint(-5, 5))
        kind = rng.randrange(4)
        if kind == 0:
            return _arrow(engine, lambda v: Compound(JUST, (Compound(Symbol("Plus"), (v, c)),)))
        if kind == 1:
            return _arrow(engine, lambda v: NOTHING)
        if kind == 2:
            return _arrow(engine, lambda v: Compound(JUST, (Compound(Symbol("Times"), (v, c)),)))
        return _arrow(engine, lambda v: Compound(JUST, (Compound(LIST, (v, c)),)))

    def gen(rng: random.Random) -> LawCase:
        x = Integer(rng.randint(-20, 20))
        ma = NOTHING if rng.random() < 0.3 else just(rng.randint(-20, 20))
        return LawCase(x, ma, arrows(rng), arrows(rng))

    return gen


def list_generator(engine: Engine) -> Generator:
    def arrows(rng: random.Random) -> Kleisli:
        c = Integer(rng.randint(-5, 5))
        kind = rng.randrange(4)
        if kind == 0:
            return _arrow(engine, lambda v: Compound(LIST, (v, Compound(Symbol("Plus"), (v, c)))))
        if kind == 1:
            return _arrow(engine, lambda v: Compound(LIST, ()))
        if kind == 2:
            return _arrow(engine, lambda v: Compound(LIST, (Compound(Symbol("Times"), (v, c)),)))
        return _arrow(engine, lambda v: Compound(LIST, (c, v, c)))

    def gen(rng: random.Random) -> LawCase:
        x = Integer(rng.randint(-20, 20))
        ma = lst(*(rng.randint(-20, 20) for _ in range(rng.randint(0, 4))))
        return LawCase(x, ma, arrows(rng), arrows(rng))

    return gen


def random_tower(rng: random.Random, discs: int) -> Expr:
    poles: list[list[int]] = [[], [], []]
    for disc in range(1, discs + 1):
        poles[rng.randrange(3)].append(disc)
    return lst(*poles)


def hanoi_generator(engine: Engine, monad: str = "hT") -> Generator:
    """Random legal tower states, random move logs, and moveDiscs-derived arrows."""
    ret = Compound(Symbol("return"), (Symbol(monad),))

    def arrows(rng: random.Random) -> Kleisli:
        if rng.random() < 0.15:
            return engine.kleisli(ret)
        i, j = rng.sample((1, 2, 3), 2)
        k = rng.choice((1, 1, 2))
        return engine.kleisli(Compound(MOVE_DISCS, (Integer(i), Integer(j), Integer(k))))

    def gen(rng: random.Random) -> LawCase:
        x = random_tower(rng, rng.randint(0, 4))
        start = random_tower(rng, rng.randint(0, 4))
        ma = return_hT(start)
        for _ in range(rng.randint(0, 3)):
            i, j = rng.sample((1, 2, 3), 2)
            ma = bind_hT(ma, lambda t, i=i, j=j: move_discs_1(i, j, t))
        return LawCase(x, ma, arrows(rng), arrows(rng))

    return gen


LAW_GENERATORS: dict[str, Callable[[Engine], Generator]] = {
    "maybe": maybe_generator,
    "list": list_generator,
    "hT": hanoi_generator,
}
