"""Check the monad laws for maybe, list and hT, then show that a
log-dropping hT bind is caught with a counterexample.

    python scripts/check_laws.py [--cases N] [--seed S]
"""

import argparse

from wlmonad.monads import check_laws
from wlmonad.stdlib import LAW_GENERATORS, install_hanoi, standard_engine
from wlmonad.testing import DROP_CONTINUATION, DROP_INPUT, log_dropping_hT


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    engine = standard_engine()
    ok = True
    for name in ("maybe", "list", "hT"):
        report = check_laws(engine.monads, name, LAW_GENERATORS[name](engine), args.cases, args.seed)
        ok &= report.ok
        print(f"== {name}\n{report.table()}\n")

    for drop in (DROP_CONTINUATION, DROP_INPUT):
        broken = standard_engine(hanoi=False)
        install_hanoi(broken, log_dropping_hT(drop))
        report = check_laws(broken.monads, "hT", LAW_GENERATORS["hT"](broken), args.cases, args.seed)
        print(f"== hT with the {drop} log dropped (expected to fail)\n{report.table()}\n")
        ok &= not report.ok
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
