import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlmonad.errors import BoundExceeded
from wlmonad.expr import LIST, Compound, Integer, Sequence, lst, sym
from wlmonad.matcher import arity_shape, fits_shape, iter_matches, match, match_all, matches
from wlmonad.parser import parse

P = parse


@pytest.mark.parametrize("pattern, subject, ok", [
    ("_", "f[x]", True),
    ("_Integer", "3", True),
    ("_Integer", "x", False),
    ("_List", "{1, 2}", True),
    ("_List", "f[1]", False),
    ("_String", '"s"', True),
    ("_Symbol", "x", True),
    ("f[_, _]", "f[1, 2]", True),
    ("f[_, _]", "f[1]", False),
    ("f[___]", "f[]", True),
    ("{___Integer}", "{1, 2, x}", False),
    ("{_ -> _, {_List, _List, _List}}", "{1 -> 3, {{2, 3}, {}, {1}}}", True),
    ("Except[_Integer]", "x", True),
    ("Except[_Integer]", "4", False),
    ("{Except[0]...}", "{1, 2, 3}", True),
    ("{Except[0]...}", "{1, 0, 3}", False),
    ("a", "a", True),
    ("a", "b", False),
])
def test_membership(pattern, subject, ok):
    assert matches(P(pattern), P(subject)) is ok


def test_empty_list_matches_repeated_moves():
    move = P("{_ -> _, {_List, _List, _List}}")
    p = Compound(LIST, (Compound(sym("RepeatedNull"), (move,)),))
    assert match(p, lst()).success
    assert match(P("{move...}"), lst()).success


def test_named_captures():
    r = match(P("f[x_, y_]"), P("f[1, g[2]]"))
    assert r and r.bindings == {"x": Integer(1), "y": P("g[2]")}


def test_repeated_names_must_agree():
    assert match(P("f[x_, x_]"), P("f[1, 1]")).success
    assert not match(P("f[x_, x_]"), P("f[1, 2]")).success
    assert match(P("{x_...}"), P("{2, 2, 2}")).success
    assert not match(P("{x_...}"), P("{2, 3}")).success


def test_sequences_bind_shortest_first():
    r = match(P("f[xs___, ys___]"), P("f[1, 2, 3]"))
    assert r.bindings == {"xs": Sequence([]), "ys": Sequence(map(Integer, (1, 2, 3)))}
    sols = list(iter_matches(P("f[xs___, ys___]"), P("f[1, 2]")))
    assert [len(b["xs"].items) for b in sols] == [0, 1, 2]


def test_do_statement_pattern():
    p = P("do[m_][x___, y_, r:Except[_LeftArrow]]")
    r = match(p, P("do[hT][a <- e1, b <- e2, ret]"))
    assert r.bindings["y"] == P("b <- e2")
    assert r.bindings["x"] == Sequence([P("a <- e1")])
    assert not match(p, P("do[hT][a <- e1, b <- e2]")).success


def test_except_binds_nothing():
    r = match(P("f[Except[x_]]"), P("f[1]"))
    assert not r.success
    r = match(P("f[Except[g[x_]], y_]"), P("f[1, 2]"))
    assert r.bindings == {"y": Integer(2)}


def test_head_patterns():
    assert match(P("f_[1]"), P("g[1]")).bindings == {"f": sym("g")}
    assert match(P("moveDiscs[a_, b_, 1][t_]"), P("moveDiscs[1, 3, 1][{{1}, {}, {}}]")).success


def test_long_runs_do_not_recurse():
    subject = Compound(LIST, tuple(P("{1 -> 3, {{}, {}, {1}}}") for _ in range(5000)))
    assert match(P("{{_ -> _, {_List, _List, _List}}...}"), subject).success
    assert match(P("{x_...}"), subject).success


def test_match_all_orders_solutions():
    sols = match_all(P("f[x___, y___]"), P("f[1, 2]"))
    assert [(len(b["x"].items), len(b["y"].items)) for b in sols] == [(0, 2), (1, 1), (2, 0)]


def test_match_all_bound():
    wide = Compound(sym("f"), tuple(Integer(i) for i in range(20)))
    with pytest.raises(BoundExceeded):
        match_all(P("f[x___]"), wide)
    assert match_all(P("f[x___]"), wide, arity_bound=32)


def test_arity_shape_quick_reject():
    shape = arity_shape(P("moveDiscs[from_, to_, 1][tower_]"))
    assert shape == (1, 3)
    assert fits_shape(shape, P("moveDiscs[1, 3, 1][t]"))
    assert not fits_shape(shape, P("moveDiscs[1, 3][t]"))
    assert arity_shape(P("f[x___]")) == (None,)


# -- agreement with the oracle on random small cases --------------------------

_leaf = st.sampled_from(["_", "x_", "y_", "x___", "a", "1", "_Integer"])


def _pattern(children):
    return st.one_of(
        children.map(lambda p: f"({p})..."),
        children.map(lambda p: f"Except[{p}]"),
        st.lists(children, max_size=3).map(lambda ps: "{" + ",".join(ps) + "}"),
    )


patterns = st.recursive(_leaf, _pattern, max_leaves=6).map(P)
subjects = st.recursive(
    st.sampled_from(["a", "b", "1", "2"]),
    lambda c: st.lists(c, max_size=4).map(lambda xs: "{" + ",".join(xs) + "}"),
    max_leaves=8,
).map(P)


@given(patterns, subjects)
def test_match_agrees_with_oracle(p, e):
    sols = match_all(p, e)
    r = match(p, e)
    assert r.success == bool(sols)
    if sols:
        assert r.bindings == sols[0]
    assert list(iter_matches(p, e)) == sols


@given(patterns, subjects)
def test_match_is_sound(p, e):
    from wlmonad.matcher import is_ground
    r = match(p, e)
    if r.success and is_ground(p):
        assert r.bindings == {}
    for b in match_all(p, e):
        # every captured name holds something the subject contains
        for v in b.values():
            items = v.items if isinstance(v, Sequence) else (v,)
            for item in items:
                assert item == e or _occurs(item, e)


def _occurs(x, e):
    if x == e:
        return True
    return isinstance(e, Compound) and (_occurs(x, e.head) or any(_occurs(x, a) for a in e.args))
