"""Trap probability across the number of measurements for one sparsity level.

Prints the trapped fraction (with a Wilson interval) on an alpha grid and
marks where the weak threshold falls.

    python scripts/dichotomy.py --n 200 --beta 0.2 --trials 50
"""

import argparse

import numpy as np

from meshtrap.geometry import ProblemGeometry
from meshtrap.parallel import default_jobs, pmap
from meshtrap.thresholds import weak_threshold
from meshtrap.trap import trap_probability


def _cell(item):
    geom, trials, seed = item
    return trap_probability(geom, trials, seed)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--beta", type=float, default=0.2)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args(argv)

    aw = weak_threshold(args.beta).alpha_w
    alphas = np.round(np.arange(0.1, 0.91, 0.05), 3)
    geoms = [ProblemGeometry.from_ratios(args.n, a, args.beta) for a in alphas]
    stats = pmap(_cell, [(g, args.trials, args.seed + i) for i, g in enumerate(geoms)], args.jobs)
    print(f"alpha_w({args.beta}) = {aw:.4f}")
    for a, g, st in zip(alphas, geoms, stats):
        lo, hi = st.interval
        mark = " <- alpha_w" if abs(a - aw) < 0.025 else ""
        print(f"alpha={a:.3f} m={g.m:4d} trapped={st.rate:.3f} [{lo:.3f}, {hi:.3f}] "
              f"indeterminate={st.indeterminate}{mark}")


if __name__ == "__main__":
    main()
