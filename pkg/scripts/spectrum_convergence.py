#!/usr/bin/env python3
"""Show how the numeric sum rule converges as more levels are summed.

Solves a doubling ladder of level counts for one problem, fits the tail at
each count, and prints partial sum, tail estimate, total, and the deviation
from the closed form. The deviation should fall well below the reported
error estimate long before the largest count.
"""

from __future__ import annotations

import argparse
import sys
import time

from sumrules import (
    BoundaryCondition,
    make_builtin,
    numeric_sum_rule,
    reference_value,
    sl_spectrum,
)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", default="borg", choices=("uniform", "borg", "oscillating"))
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--epsilon", type=float, default=1.0)
    ap.add_argument("--bc", default="neumann", choices=("neumann", "dirichlet", "periodic"))
    ap.add_argument("--order", type=int, default=1, choices=(1, 2))
    ap.add_argument("--counts", type=int, nargs="+", default=[125, 250, 500, 1000, 2000])
    args = ap.parse_args(argv)

    params = {}
    if args.problem == "borg":
        params["alpha"] = args.alpha
    elif args.problem == "oscillating":
        params["eps"] = args.epsilon
    d = make_builtin(args.problem, **params)
    bc = BoundaryCondition.coerce(args.bc)
    exact = reference_value(args.problem, args.order, bc=bc, **params)
    print(f"exact Z_{args.order} = {exact:.15e}")
    print(f"{'count':>6}  {'partial':>22}  {'tail':>13}  {'total':>22}  {'dev':>9}  {'err est':>9}")

    top = max(args.counts)
    t0 = time.time()
    s_all = sl_spectrum(d, bc, top)
    solve_t = time.time() - t0
    for count in sorted(args.counts):
        # reuse the one big solve; truncation keeps the ladder cheap
        s = type(s_all)(
            s_all.eigenvalues[:count], s_all.accuracy[:count],
            s_all.bc, s_all.method, s_all.has_zero_mode,
        )
        r = numeric_sum_rule(s, args.order)
        print(
            f"{count:>6}  {r.partial_sum:>22.15e}  {r.tail:>13.6e}  "
            f"{r.value:>22.15e}  {r.value - exact:>9.1e}  {r.error_estimate:>9.1e}"
        )
    print(f"\nsolve time for {top} levels: {solve_t:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
