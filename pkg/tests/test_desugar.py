import pytest
from hypothesis import given
from hypothesis import strategies as st

from wlmonad.desugar import BIND, CHK, Arrow, DoBlock, Plain, desugar, expand, expand_in_place
from wlmonad.errors import MalformedDo, UnknownMonad
from wlmonad.expr import FreshSupply, Compound, lst, sym, to_string, walk
from wlmonad.parser import parse, parse_program_positions


def _desugar(src: str) -> str:
    return to_string(desugar(parse(src), FreshSupply(1)))


def count_binds(e) -> int:
    return sum(1 for x in walk(e) if isinstance(x, Compound) and x.head == Compound(BIND, (sym("m"),)))


def test_single_statement_is_checked():
    assert _desugar("do[m][mx]") == "chk[m][mx]"


def test_arrow_binds_its_variable():
    assert _desugar("do[m][v <- e, r]") == "chk[m][chk[m][bind[m][e,Function[v,r]]]]"


def test_plain_statement_gets_fresh_variable():
    assert _desugar("do[m][e, r]") == "chk[m][chk[m][bind[m][e,Function[$do1,r]]]]"


def test_three_statements_nest_to_the_right():
    out = _desugar("do[m][a <- e1, e2, r]")
    assert out == ("chk[m][chk[m][bind[m][e1,Function[a,"
                   "chk[m][bind[m][e2,Function[$do1,r]]]]]]]")


@given(st.lists(st.booleans(), min_size=0, max_size=12))
def test_n_statements_give_n_minus_one_binds(arrows):
    stmts = [f"v{i} <- e{i}" if is_arrow else f"e{i}" for i, is_arrow in enumerate(arrows)]
    stmts.append("r")
    out = desugar(parse("do[m][" + ", ".join(stmts) + "]"), FreshSupply(1))
    assert count_binds(out) == len(stmts) - 1


def test_block_structure():
    block = DoBlock.from_expr(parse("do[hT][x <- a, b, c]"))
    assert block.monad == sym("hT")
    assert block.statements == (Arrow(sym("x"), sym("a")), Plain(sym("b")), Plain(sym("c")))


@pytest.mark.parametrize("src", [
    "do[m][]",
    "do[m][a <- e]",
    "do[m][f[a] <- e, r]",
    "do[m, n][r]",
    "do[][r]",
    "f[x]",
])
def test_malformed_blocks(src):
    with pytest.raises(MalformedDo):
        desugar(parse(src))


def test_unknown_monad_is_a_malformed_do():
    assert issubclass(UnknownMonad, MalformedDo)


def test_nested_blocks_expand_innermost_first():
    e = parse("do[list][x <- do[list][y <- {1}, {y}], {x}]")
    out = expand(e, FreshSupply(1))
    assert "do[" not in to_string(out)
    assert to_string(out).count("bind[list]") == 2


def test_expand_leaves_other_code_alone():
    e = parse("f[x, g[y]]")
    assert expand(e) is e


def test_expand_in_place_reports_statement_position():
    located = parse_program_positions("a := 1\n  do[m][x <- e]")
    prog = [e for e, _ in located]
    with pytest.raises(MalformedDo, match=r"^2:3: "):
        expand_in_place(prog, [p for _, p in located])


def test_evaluated_do_captures_arrow_variable(engine):
    assert engine.evaluate(parse("do[list][x <- {1, 2}, return[list][x]]")) == lst(1, 2)
    assert engine.evaluate(parse("do[list][x <- {1, 2}, y <- {10, 20}, return[list][Plus[x, y]]]")) \
        == lst(11, 21, 12, 22)
    assert engine.evaluate(parse("do[maybe][x <- just[2], return[maybe][x]]")) == parse("just[2]")
    assert engine.evaluate(parse("do[maybe][x <- nothing, return[maybe][x]]")) == sym("nothing")


def test_desugaring_is_deterministic_per_supply():
    src = "do[m][e1, e2, r]"
    assert _desugar(src) == _desugar(src)
    assert CHK == sym("chk")
