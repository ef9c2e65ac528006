#!/usr/bin/env python3
"""Print the closed-form sum rules next to the pipeline values.

One line per (problem, bc, order) case: the quadrature pipeline value, the
closed-form reference, and their difference. Everything here should agree to
the quadrature tolerance; this is the quickest end-to-end health check the
package has.
"""

from __future__ import annotations

import argparse
import sys
import time

from sumrules import BoundaryCondition, make_builtin, reference_value, z1, z2


CASES = [
    ("uniform", {}, "neumann"),
    ("uniform", {}, "periodic"),
    ("uniform", {}, "dirichlet"),
    ("borg", {"alpha": 1.0}, "neumann"),
    ("borg", {"alpha": 1.0}, "periodic"),
    ("borg", {"alpha": 1.0}, "dirichlet"),
    ("oscillating", {"eps": 1.0}, "neumann"),
]


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=None, help="override borg alpha")
    args = ap.parse_args(argv)

    cases = list(CASES)
    if args.alpha is not None:
        cases = [
            (p, {"alpha": args.alpha} if p == "borg" else q, bc)
            for p, q, bc in cases
        ]

    print(f"{'problem':<14}{'bc':<11}{'p':>2}  {'pipeline':>22}  {'reference':>22}  {'diff':>10}")
    worst = 0.0
    for problem, params, bc in cases:
        d = make_builtin(problem, **params)
        bcv = BoundaryCondition.coerce(bc)
        for order, rule in ((1, z1), (2, z2)):
            if problem == "oscillating" and order == 2 and params.get("eps") != 1.0:
                continue
            t0 = time.time()
            got = rule(d, bcv).value
            ref = reference_value(problem, order, bc=bcv, **params)
            diff = got - ref
            worst = max(worst, abs(diff))
            print(
                f"{problem:<14}{bcv.value:<11}{order:>2}  {got:>22.15e}  "
                f"{ref:>22.15e}  {diff:>10.1e}  ({time.time() - t0:.2f}s)"
            )
    print(f"\nworst |diff| = {worst:.3e}")
    return 0 if worst < 1e-10 else 1


if __name__ == "__main__":
    sys.exit(main())
