import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlmonad.errors import NoSuchPole
from wlmonad.expr import Compound, Integer, lst, substitute, sym, to_string
from wlmonad.matcher import matches
from wlmonad.parser import parse
from wlmonad.stdlib import (
    HT_PATTERN,
    bind_hT,
    grab,
    join,
    just,
    list_bind,
    make_tower,
    maybe_bind,
    move_discs_1,
    move_discs_n,
    moves_of,
    other,
    replay,
    rest,
    return_hT,
    standard_engine,
    tower_lists,
)

P = parse

PAPER_RESULT = (
    "hT[{{},{},{1,2,3}},{{1->3,{{2,3},{},{1}}},{1->2,{{3},{2},{1}}},{3->2,{{3},{1,2},{}}},"
    "{1->3,{{},{1,2},{3}}},{2->1,{{1},{2},{3}}},{2->3,{{1},{},{2,3}}},{1->3,{{},{},{1,2,3}}}}]"
)


def iterative_hanoi(n: int) -> list[tuple[int, int]]:
    """Independent oracle: the classic loop solver (smallest disc cycles, then the only other legal move)."""
    poles = [list(range(n, 0, -1)), [], []]   # bottom .. top
    step = (0, 1, 2) if n % 2 == 0 else (0, 2, 1)
    small = 0
    moves = []
    for k in range(2 ** n - 1):
        if k % 2 == 0:
            nxt = step[(step.index(small) + 1) % 3]
            poles[nxt].append(poles[small].pop())
            moves.append((small + 1, nxt + 1))
            small = nxt
        else:
            a, b = [i for i in range(3) if i != small]
            if not poles[a] or (poles[b] and poles[b][-1] < poles[a][-1]):
                a, b = b, a
            poles[b].append(poles[a].pop())
            moves.append((a + 1, b + 1))
    return moves


def test_oracle_matches_the_paper_for_three_discs():
    assert iterative_hanoi(3) == [(1, 3), (1, 2), (3, 2), (1, 3), (2, 1), (2, 3), (1, 3)]


def test_make_tower():
    assert make_tower(0) == P("{{}, {}, {}}")
    assert make_tower(3) == P("{{1, 2, 3}, {}, {}}")
    assert tower_lists(make_tower(5))[0] == [1, 2, 3, 4, 5]


def test_paper_first_move_from_make_tower():
    r = move_discs_1(1, 3, make_tower(3))
    assert r == P("hT[{{2,3},{},{1}}, {{1->3,{{2,3},{},{1}}}}]")


@pytest.mark.parametrize("frm, to, before, after", [
    (3, 2, "{{3},{2},{1}}", "{{3},{1,2},{}}"),
    (2, 1, "{{},{1,2},{3}}", "{{1},{2},{3}}"),
    (1, 3, "{{},{1,2},{3}}", "{{},{1,2},{3}}"),
])
def test_move_discs_1_snapshots(frm, to, before, after):
    r = move_discs_1(frm, to, P(before))
    if frm == 1 and before.startswith("{{}"):
        # empty source pole: no legality check, nothing moves
        assert r.args[0] == P(before)
    else:
        assert r.args[0] == P(after)
        assert r.args[1] == lst(Compound(sym("List"), (P(f"{frm} -> {to}"), P(after))))


@pytest.mark.parametrize("i, j, k", [(1, 3, 2), (1, 2, 3), (2, 3, 1), (3, 1, 2)])
def test_other(i, j, k):
    assert other(i, j) == k


@pytest.mark.parametrize("i, j", [(1, 1), (0, 2), (2, 4)])
def test_other_rejects_bad_poles(i, j):
    with pytest.raises(NoSuchPole):
        other(i, j)


def test_other_in_the_evaluator(engine):
    assert engine.evaluate(P("other[1, 3]")) == Integer(2)
    assert engine.evaluate(P("other[x, 3]")) == P("other[x, 3]")


def test_return_bind_grab_rest():
    t0 = make_tower(1)
    assert return_hT(t0) == P("hT[{{1},{},{}}, {}]")
    ma = P("hT[{{1},{},{}}, {{1->2,{{},{1},{}}}}]")
    assert grab(ma) == P("{{1},{},{}}") and rest(ma) == P("{{1->2,{{},{1},{}}}}")
    r = bind_hT(ma, lambda t: move_discs_1(1, 3, t))
    assert rest(r).args == rest(ma).args + (P("{1->3,{{},{},{1}}}"),)
    assert bind_hT(return_hT(t0), return_hT) == return_hT(t0)


def test_join_stays_symbolic_until_concrete(engine):
    assert join(lst(), lst()) == lst()
    assert join(sym("a"), lst()) == P("join[a, {}]")
    assert engine.evaluate(P("join[{}, b]")) == P("join[{}, b]")
    assert engine.evaluate(P("grab[notHT]")) == P("grab[notHT]")


def test_paper_result_verbatim(engine):
    r = engine.evaluate(P("moveDiscs[1, 3, 3][makeTower[3]]"))
    assert to_string(r) == PAPER_RESULT
    assert r == P(PAPER_RESULT)
    assert move_discs_n(1, 3, 3, make_tower(3)) == r


def test_single_disc_rule(engine):
    r = engine.evaluate(P("moveDiscs[1, 3, 1][{{1}, {}, {}}]"))
    assert r == P("hT[{{},{},{1}}, {{1->3,{{},{},{1}}}}]")


def test_move_discs_n_needs_one_disc():
    with pytest.raises(ValueError):
        move_discs_n(1, 3, 0, make_tower(0))


@pytest.mark.parametrize("n", range(1, 9))
def test_solution_is_legal_and_agrees_with_oracle(engine, n):
    r = engine.evaluate(P(f"moveDiscs[1, 3, {n}][makeTower[{n}]]"))
    assert matches(HT_PATTERN, r)
    moves = moves_of(r)
    assert [(i, j) for i, j, _ in moves] == iterative_hanoi(n)
    assert tower_lists(r.args[0]) == [[], [], list(range(1, n + 1))]
    assert replay(tower_lists(make_tower(n)), moves) == []


def test_general_poles(engine):
    r = engine.evaluate(P("moveDiscs[2, 1, 3][{{}, {1, 2, 3}, {}}]"))
    assert tower_lists(r.args[0]) == [[1, 2, 3], [], []]
    assert replay([[], [1, 2, 3], []], moves_of(r)) == []


def test_replay_flags_illegal_moves():
    start = [[1, 2], [], []]
    assert replay(start, [(1, 2, [[2], [1], []])]) == []
    problems = replay(start, [(1, 2, [[2], [1], []]), (1, 2, [[], [2, 1], []])])
    assert problems and "onto smaller disc" in problems[0]
    assert "is empty" in replay([[], [], []], [(1, 2, [[], [], []])])[0]
    assert "snapshot" in replay(start, [(1, 3, [[2], [], []])])[0]


def test_unbound_tower_stays_unevaluated(engine):
    e = P("moveDiscs[1, 3, 1][s]")
    assert engine.evaluate(e) == e
    done = engine.evaluate(substitute(e, {"s": P("{{1}, {}, {}}")}))
    assert done == P("hT[{{},{},{1}}, {{1->3,{{},{},{1}}}}]")


@given(st.integers(1, 6), st.sampled_from([(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]))
def test_log_concatenation_invariant(n, poles):
    # the log of a bind is the input log followed by the continuation's log
    engine = standard_engine()
    i, j = poles
    first = engine.evaluate(P(f"moveDiscs[1, 3, {n}][makeTower[{n}]]"))
    f = lambda t: engine.evaluate(Compound(P(f"moveDiscs[3, {j if j != 3 else i}, 1]"), (t,)))
    r = bind_hT(first, f)
    assert rest(r).args[:len(rest(first).args)] == rest(first).args
    assert len(rest(r).args) == len(rest(first).args) + 1


def test_maybe_and_list(engine):
    assert maybe_bind(sym("nothing"), lambda x: just(1)) == sym("nothing")
    assert maybe_bind(just(4), lambda x: just(x)) == just(4)
    assert list_bind(lst(1, 2), lambda x: lst(x, Integer(x.value + 10))) == lst(1, 11, 2, 12)
    assert engine.evaluate(P("bind[list][{1, 2}, Function[x, {x, Plus[x, 10]}]]")) == lst(1, 11, 2, 12)
    assert engine.evaluate(P("do[maybe][x <- just[2], return[maybe][x]]")) == just(2)
