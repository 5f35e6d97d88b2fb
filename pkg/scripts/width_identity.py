"""Compare the weak threshold with the squared mean width of the descent cone.

    python scripts/width_identity.py --n 4000 --samples 200
"""

import argparse

from meshtrap.cone import ConeSpec, estimate_width
from meshtrap.seeding import derived_seed
from meshtrap.thresholds import weak_threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--betas", type=float, nargs="+", default=[0.05, 0.1, 0.2, 0.3, 0.4, 0.5])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"{'beta':>6} {'alpha_w':>9} {'xi^2/n':>9} {'w^2/n':>9} {'gap':>8} {'sd/mean':>8}")
    for i, beta in enumerate(args.betas):
        cone = ConeSpec(args.n, round(beta * args.n))
        xi = estimate_width(cone, "xi", args.samples, seed=derived_seed(args.seed, i))
        w = estimate_width(cone, "w", args.samples, seed=derived_seed(args.seed, i))
        aw = weak_threshold(beta).alpha_w
        a_xi = xi.mean ** 2 / args.n
        print(f"{beta:6.3f} {aw:9.5f} {a_xi:9.5f} {w.mean ** 2 / args.n:9.5f} "
              f"{a_xi - aw:+8.5f} {xi.concentration_ratio:8.4f}")


if __name__ == "__main__":
    main()
