import random

import pytest

from wlmonad.errors import DuplicateMonad, MonadTypeError, UnknownMonad
from wlmonad.expr import Integer, lst, sym
from wlmonad.monads import LAWS, Kleisli, LawCase, MonadDef, check_laws, registry_from
from wlmonad.parser import parse
from wlmonad.stdlib import (
    HT_MONAD,
    LAW_GENERATORS,
    LIST_MONAD,
    MAYBE,
    install_hanoi,
    standard_engine,
)
from wlmonad.testing import DROP_CONTINUATION, DROP_INPUT, log_dropping_hT

P = parse


@pytest.fixture
def reg():
    return registry_from([MAYBE, LIST_MONAD, HT_MONAD])


def test_registry_lookup(reg):
    assert reg.names() == ["hT", "list", "maybe"]
    assert "maybe" in reg and "state" not in reg
    with pytest.raises(UnknownMonad):
        reg["state"]
    with pytest.raises(DuplicateMonad):
        reg.register(MAYBE)


def test_monad_needs_a_pattern():
    with pytest.raises(ValueError):
        MonadDef("m", (), lambda x: x, lambda ma, f: ma)


def test_chk_is_identity_on_members(reg):
    v = P("just[3]")
    assert reg.chk("maybe", v) is v
    assert reg.chk("maybe", reg.chk("maybe", v)) is v
    assert reg.chk("maybe", sym("nothing")) == sym("nothing")


@pytest.mark.parametrize("monad, value", [
    ("maybe", "3"),
    ("maybe", "just[1, 2]"),
    ("list", "f[1]"),
    ("hT", "hT[{{}, {}}, {}]"),
    ("hT", "hT[{{}, {}, {}}, {bad}]"),
])
def test_chk_rejects_non_members(reg, monad, value):
    with pytest.raises(MonadTypeError) as info:
        reg.chk(monad, P(value), "bind-output")
    assert info.value.site == "bind-output" and info.value.monad == monad


def test_type_error_sites():
    with pytest.raises(ValueError):
        MonadTypeError("m", "v", "p", "somewhere")


def test_return_and_bind_are_checked(reg):
    assert reg.return_checked("list", Integer(1)) == lst(1)
    assert reg.bind_checked("list", lst(1, 2), lambda x: lst(x, x)) == lst(1, 1, 2, 2)
    with pytest.raises(MonadTypeError) as info:
        reg.bind_checked("list", P("f[1]"), lambda x: lst(x))
    assert info.value.site == "bind-input"
    with pytest.raises(MonadTypeError) as info:
        reg.bind_checked("maybe", P("just[1]"), lambda x: x)
    assert info.value.site == "bind-output"


def test_bind_in_evaluator_reports_site(engine):
    with pytest.raises(MonadTypeError) as info:
        engine.evaluate(P("bind[maybe][just[1], Function[x, x]]"))
    assert info.value.site == "bind-output"
    with pytest.raises(MonadTypeError) as info:
        engine.evaluate(P("do[maybe][x <- just[1], x]"))
    assert info.value.site == "bind-output"
    with pytest.raises(MonadTypeError) as info:
        engine.evaluate(P("do[maybe][3]"))
    assert info.value.site == "do-final"


@pytest.mark.parametrize("name", ["maybe", "list", "hT"])
def test_stdlib_monads_satisfy_the_laws(name):
    engine = standard_engine()
    report = check_laws(engine.monads, name, LAW_GENERATORS[name](engine), cases=300, seed=11)
    assert report.ok, report.table()
    assert [r.law for r in report.results] == list(LAWS)
    assert all(r.cases == 300 for r in report.results)


@pytest.mark.parametrize("drop, law", [
    (DROP_CONTINUATION, "left identity"),
    (DROP_INPUT, "right identity"),
])
def test_log_dropping_bind_is_caught(drop, law):
    engine = standard_engine(hanoi=False)
    install_hanoi(engine, log_dropping_hT(drop))
    report = check_laws(engine.monads, "hT", LAW_GENERATORS["hT"](engine), cases=200, seed=3)
    assert not report.ok
    assert report[law].failures > 0
    assert " != " in report[law].counterexample
    assert report["associativity"].ok


def test_law_report_table_layout(reg):
    gen = lambda rng: LawCase(Integer(1), P("just[2]"), Kleisli(lambda x: P("just[5]")),
                              Kleisli(lambda x: sym("nothing")))
    report = check_laws(reg, "maybe", gen, cases=3)
    lines = report.table().splitlines()
    assert lines[0].split(" | ") == ["law           ", "cases", "failures", "first-counterexample"]
    assert len(lines) == 4


def test_broken_monad_counterexample_text():
    # bind ignores the wrapped value, so left identity fails whenever x != 0
    just = sym("just")
    bad = MonadDef("bad", (P("just[_]"),), lambda x: just[x], lambda ma, f: f(Integer(0)))
    wrap = Kleisli(lambda x: just[x])
    gen = lambda rng: LawCase(Integer(rng.randint(1, 9)), P("just[2]"), wrap, wrap)
    report = check_laws(registry_from([bad]), "bad", gen, cases=20, seed=0)
    assert report["left identity"].failures == 20
    assert report["left identity"].counterexample.startswith("x=")


def test_laws_are_seed_deterministic():
    engine = standard_engine()
    gen = LAW_GENERATORS["list"](engine)
    a = check_laws(engine.monads, "list", gen, cases=50, seed=5).table()
    b = check_laws(engine.monads, "list", gen, cases=50, seed=5).table()
    assert a == b
    rng = random.Random(1)
    assert gen(rng).ma == LAW_GENERATORS["list"](engine)(random.Random(1)).ma
