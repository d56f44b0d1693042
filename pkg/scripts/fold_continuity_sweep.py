"""Sweep a halfspace family and track the folded measure's center.

Quantizes a density on a disk region, folds it into halfspaces H(p, t + 2^-j),
and prints how the center's hyperbolic displacement from the limit halfspace
shrinks with the parameter gap.

Usage: python scripts/fold_continuity_sweep.py [--atoms N] [--seed N]
"""

from __future__ import annotations

import argparse
import math

from hypcenter import (
    SolveOptions,
    Strategy,
    ball_region,
    energy_context,
    fold_map,
    halfspace,
    hyp_distance,
    identity,
    pushforward,
    quantize_density,
    solve_center,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--atoms", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=12)
    parser.add_argument("--t", type=float, default=0.6, dest="t_base")
    args = parser.parse_args()

    region = ball_region([0.25, 0.0], 0.55)
    mu = quantize_density(
        lambda y: math.exp(-6.0 * y[0]), region, 2, args.atoms, seed=args.seed
    )
    weight = identity()
    opts = SolveOptions(tol_residual=1e-12, strategy=Strategy.NEWTON_ACCELERATED)

    def center_for(t: float):
        folded = pushforward(mu, fold_map(halfspace([1.0, 0.0], t)))
        result = solve_center(energy_context(weight, folded), opts)
        assert result.converged
        return result.x_c

    x_limit = center_for(args.t_base)
    print(f"{args.atoms} atoms, base halfspace t = {args.t_base}")
    print(f"limit center: {x_limit.coords.tolist()}")
    prev = None
    for j in range(3, 11):
        xj = center_for(args.t_base + 2.0**-j)
        d = hyp_distance(xj, x_limit)
        ratio = "" if prev is None else f"  (ratio {d / prev:.3f})"
        print(f"  j={j:2d}  gap 2^-{j}   displacement {d:.3e}{ratio}")
        prev = d
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
