"""Run a phase sweep from a JSON config and report the fitted crossings.

    python scripts/phase_diagram.py scripts/configs/phase_small.json --jobs 4
"""

import argparse

from meshtrap.parallel import default_jobs
from meshtrap.phase import NoCrossing, SweepConfig, emit, fit_crossing, run_sweep
from meshtrap.thresholds import weak_threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--out", default=None)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    args = ap.parse_args(argv)

    cfg = SweepConfig.load(args.config)
    out = args.out or cfg.out or "runs/phase"
    cells, records = run_sweep(cfg, jobs=args.jobs)
    paths = emit(cells, out, overlay=sorted(set(cfg.betas)) if cfg.overlay else None, fmt=cfg.format,
                 config=cfg, records=records if cfg.trial_log else None)
    for p in paths:
        print("wrote", p)
    if cfg.mode == "trap":
        return
    for beta in sorted(set(cfg.betas)):
        row = [c for c in cells if c.beta_w == beta]
        try:
            mid, (lo, hi) = fit_crossing(row)
            fit = f"alpha_50={mid:.3f} [{lo:.3f}, {hi:.3f}]"
        except (NoCrossing, ValueError) as e:
            fit = f"no fit ({e})"
        print(f"beta={beta:.3f} alpha_w={weak_threshold(beta).alpha_w:.3f} {fit}")


if __name__ == "__main__":
    main()
