"""Command-line front end.

    wlmonad run FILE [--stdlib]
    wlmonad eval EXPR
    wlmonad desugar EXPR
    wlmonad hanoi N [--format text|json]
    wlmonad laws MONAD [--cases N] [--seed S] [--load FILE]

Global flags ``--trace`` (rewrite trace on stderr) and ``--budget N`` go
before the subcommand.  Exit codes: 0 ok, 1 evaluation / law / usage
failure, 2 parse error, 3 monad type error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from .desugar import expand, expand_in_place, is_do
from .errors import MonadTypeError, ParseError, WLError
from .expr import Compound, Expr, FreshSupply, Integer, to_string
from .monads import check_laws
from .parser import parse, parse_program_positions
from .rewriter import Engine, EvalConfig, format_trace
from .stdlib import (
    LAW_GENERATORS,
    MOVE_DISCS,
    install_prelude,
    make_tower,
    moves_of,
    standard_engine,
    tower_lists,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_TYPE = 0, 1, 2, 3
MAX_DISCS = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which here means "parse error in the input"
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    command: str
    source: str | None = None
    fmt: str = "text"
    trace: bool = False
    budget: int | None = None
    seed: int = 0
    cases: int = 1000
    stdlib: bool = False
    load: str | None = None
    monad: str | None = None
    discs: int | None = None
    pretty: bool = False

    def __post_init__(self):
        if self.budget is not None and self.budget < 1:
            raise UsageError("--budget must be at least 1")
        if self.cases < 1:
            raise UsageError("--cases must be at least 1")

    def eval_config(self) -> EvalConfig:
        base = EvalConfig()
        return EvalConfig(budget=self.budget or base.budget, trace=self.trace)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wlmonad", description="Pattern-typed monads and do-notation on a small term rewriter.")
    p.add_argument("--trace", action="store_true", help="print the rewrite trace on stderr")
    p.add_argument("--budget", type=int, default=None, help="rewrite step budget (default 1000000)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a script")
    run.add_argument("file")
    run.add_argument("--stdlib", action="store_true", help="preload the maybe, list and hT monads")

    ev = sub.add_parser("eval", help="evaluate an expression (standard library loaded)")
    ev.add_argument("expr")

    ds = sub.add_parser("desugar", help="print the desugared form of a do block")
    ds.add_argument("expr")

    hn = sub.add_parser("hanoi", help="solve the towers of Hanoi in the hT monad")
    hn.add_argument("n", type=int)
    hn.add_argument("--format", choices=("text", "json"), default="text")
    hn.add_argument("--pretty", action="store_true", help="multi-line text layout")

    lw = sub.add_parser("laws", help="check the monad laws on random cases")
    lw.add_argument("monad")
    lw.add_argument("--cases", type=int, default=1000)
    lw.add_argument("--seed", type=int, default=0)
    lw.add_argument("--load", default=None, help="script defining the monad (replaces the built-in one)")
    return p


def config_from_args(args: argparse.Namespace) -> CliConfig:
    c = args.command
    return CliConfig(
        command=c,
        source=getattr(args, "file", None) or getattr(args, "expr", None),
        fmt=getattr(args, "format", "text"),
        trace=args.trace,
        budget=args.budget,
        seed=getattr(args, "seed", 0),
        cases=getattr(args, "cases", 1000),
        stdlib=getattr(args, "stdlib", False),
        load=getattr(args, "load", None),
        monad=getattr(args, "monad", None),
        discs=getattr(args, "n", None),
        pretty=getattr(args, "pretty", False),
    )


class _Session:
    """One command invocation: the engine, the streams and the trace plumbing."""

    def __init__(self, cfg: CliConfig, engine: Engine, out, err):
        self.cfg, self.engine, self.out, self.err = cfg, engine, out, err

    def evaluate(self, e: Expr) -> Expr:
        if not self.cfg.trace:
            return self.engine.evaluate(e)
        try:
            result, steps = self.engine.evaluate_traced(e)
        except WLError as exc:
            steps = getattr(exc, "trace", [])
            if steps:
                print(format_trace(steps), file=self.err)
            raise
        if steps:
            print(format_trace(steps), file=self.err)
        return result

    def run_program(self, src: str, echo: bool = True) -> None:
        located = parse_program_positions(src)
        program = [e for e, _ in located]
        positions = [pos for _, pos in located]
        program = expand_in_place(program, positions)
        for stmt, (line, col) in zip(program, positions):
            try:
                if self.engine.is_definition(stmt):
                    self.engine.execute(stmt)
                else:
                    result = self.evaluate(stmt)
                    if echo:
                        print(to_string(result), file=self.out)
            except WLError as exc:
                exc.args = (f"{line}:{col}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
                raise


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_run(s: _Session) -> int:
    s.run_program(_read(s.cfg.source))
    return EXIT_OK


def cmd_eval(s: _Session) -> int:
    s.run_program(s.cfg.source)
    return EXIT_OK


def cmd_desugar(s: _Session) -> int:
    e = parse(s.cfg.source)
    if not is_do(e):
        raise UsageError(f"not a do block: {to_string(e)}")
    print(to_string(expand(e, FreshSupply(1))), file=s.out)
    return EXIT_OK


def hanoi_json(result: Expr) -> dict:
    return {
        "final": tower_lists(result.args[0]),
        "moves": [{"from": i, "to": j, "state": state} for i, j, state in moves_of(result)],
    }


def cmd_hanoi(s: _Session) -> int:
    n = s.cfg.discs
    if not 1 <= n <= MAX_DISCS:
        raise UsageError(f"number of discs must be between 1 and {MAX_DISCS}, got {n}")
    goal = Compound(Compound(MOVE_DISCS, (Integer(1), Integer(3), Integer(n))), (make_tower(n),))
    result = s.evaluate(goal)
    if s.cfg.fmt == "json":
        print(json.dumps(hanoi_json(result)), file=s.out)
    else:
        print(to_string(result, pretty=s.cfg.pretty), file=s.out)
    return EXIT_OK


def cmd_laws(s: _Session) -> int:
    name = s.cfg.monad
    if s.cfg.load:
        s.run_program(_read(s.cfg.load), echo=False)
    if name not in s.engine.monads:
        raise UsageError(f"unknown monad {name!r}; registered: {', '.join(s.engine.monads.names()) or 'none'}")
    if name not in LAW_GENERATORS:
        raise UsageError(f"no random case generator for monad {name!r}")
    gen = LAW_GENERATORS[name](s.engine)
    report = check_laws(s.engine.monads, name, gen, cases=s.cfg.cases, seed=s.cfg.seed)
    print(report.table(), file=s.out)
    return EXIT_OK if report.ok else EXIT_FAIL


COMMANDS = {
    "run": cmd_run,
    "eval": cmd_eval,
    "desugar": cmd_desugar,
    "hanoi": cmd_hanoi,
    "laws": cmd_laws,
}


def engine_for(cfg: CliConfig) -> Engine:
    if cfg.command == "run" and not cfg.stdlib:
        # scripts normally bring their own monads; only arithmetic and lists are preloaded
        engine = Engine()
        install_prelude(engine)
    elif cfg.command == "laws" and cfg.load:
        engine = standard_engine(hanoi=False, monads=False)
    else:
        engine = standard_engine()
    engine.config = EvalConfig(budget=cfg.eval_config().budget)
    return engine


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        session = _Session(cfg, engine_for(cfg), out, err)
        return COMMANDS[cfg.command](session)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_FAIL
    except ParseError as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_PARSE
    except MonadTypeError as exc:
        print(f"monad type error: {exc}", file=err)
        return EXIT_TYPE
    except WLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_FAIL
    except RecursionError:
        print("error: expression nesting too deep", file=err)
        return EXIT_FAIL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
