"""meshtrap command line: JSON on stdout, files only under --out.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .cone import ConeSpec, summarize_samples, width_samples
from .geometry import ProblemGeometry
from .l1 import recovery_trial
from .parallel import default_jobs, pmap
from .phase import SweepConfig, emit, run_sweep
from .seeding import derived_seed
from .specfn import DomainError
from .thresholds import (EpsilonSet, HypothesisNotMet, NoRootError, alpha_lower_bound, alpha_upper_bound,
                         escape_prob_lower_bound, theta_hat_lower, theta_hat_upper, weak_threshold)
from .trap import TrapOptions, summarize, trap_trial, wilson_interval

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _print(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def cmd_threshold(args) -> dict:
    tp = weak_threshold(args.beta)
    out = dataclasses.asdict(tp)
    if args.eps_file:
        with open(args.eps_file) as fh:
            eps = EpsilonSet.from_dict(json.load(fh))
        out.update(theta_hat_lower=theta_hat_lower(args.beta, eps),
                   alpha_lower_bound=alpha_lower_bound(args.beta, eps),
                   theta_hat_upper=theta_hat_upper(args.beta, eps),
                   alpha_upper_bound=alpha_upper_bound(args.beta, eps))
    return out


def _width_chunk(item):
    n, k, kind, seed, start, stop = item
    # samples are seeded per index, so chunks reproduce the serial stream
    from .cone import w_sample, xi_sample
    from .seeding import rng_for
    cone = ConeSpec(n, k)
    vals, zeros = [], 0
    for i in range(start, stop):
        g = rng_for(seed, i).standard_normal(n)
        if kind == "xi":
            vals.append(xi_sample(cone, g))
        else:
            v, z = w_sample(cone, g)
            vals.append(v)
            zeros += z
    return vals, zeros


def cmd_width(args) -> dict:
    if args.samples < 2:
        raise DomainError("--samples must be at least 2")
    cone = ConeSpec(args.n, args.k)
    if args.jobs <= 1:
        x, zeros = width_samples(cone, args.kind, args.samples, args.seed)
    else:
        step = max(1, math.ceil(args.samples / (4 * args.jobs)))
        chunks = [(args.n, args.k, args.kind, args.seed, s, min(s + step, args.samples))
                  for s in range(0, args.samples, step)]
        parts = pmap(_width_chunk, chunks, args.jobs)
        x = np.array([v for vals, _ in parts for v in vals])
        zeros = sum(z for _, z in parts)
    est = summarize_samples(x, args.kind, zeros)
    return est.to_dict() | {"alpha_estimate": est.mean ** 2 / args.n}


def _geom(args) -> ProblemGeometry:
    g = ProblemGeometry(n=args.n, m=args.m, k=args.k)
    if g.m >= g.n:
        raise DomainError("need m < n")
    return g


def _trap_job(item):
    geom, seed = item
    return trap_trial(geom, seed, TrapOptions()).verdict


def cmd_trap(args) -> dict:
    g = _geom(args)
    verdicts = pmap(_trap_job, [(g, derived_seed(args.seed, i)) for i in range(args.trials)], args.jobs)
    st = summarize(verdicts)
    return dataclasses.asdict(st) | {"n": g.n, "m": g.m, "k": g.k}


def _recover_job(item):
    geom, seed = item
    r = recovery_trial(geom, seed)
    return r.success, r.error


def cmd_recover(args) -> dict:
    g = _geom(args)
    res = pmap(_recover_job, [(g, derived_seed(args.seed, i)) for i in range(args.trials)], args.jobs)
    succ = sum(s for s, _ in res)
    errors = sum(e is not None for _, e in res)
    lo, hi = wilson_interval(succ, args.trials)
    return {"n": g.n, "m": g.m, "k": g.k, "trials": args.trials, "successes": succ,
            "rate": succ / args.trials, "interval": [lo, hi], "errors": errors}


def cmd_phase(args) -> dict:
    cfg = SweepConfig.load(args.config)
    out = args.out or cfg.out
    cells, records = run_sweep(cfg, jobs=args.jobs)
    summary = {"cells": len(cells), "trials": sum(c.trials for c in cells),
               "recovery_successes": sum(c.recovery_successes for c in cells),
               "trapped": sum(c.trapped for c in cells), "escaped": sum(c.escaped for c in cells),
               "indeterminate": sum(c.indeterminate for c in cells),
               "agreement": sum(c.agreement for c in cells)}
    if out:
        paths = emit(cells, out, overlay=sorted(set(cfg.betas)) if cfg.overlay else None, fmt=cfg.format,
                     config=cfg, records=records if cfg.trial_log else None)
        summary["files"] = [p.name for p in paths]
    return summary


def cmd_escape(args) -> dict:
    return {"w_D": args.w_d, "m": args.m, "constant": args.constant,
            "bound": escape_prob_lower_bound(args.w_d, args.m, args.constant)}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meshtrap", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    jobs = dict(type=int, default=default_jobs(), help="worker processes (default $MESHTRAP_JOBS or 1)")

    s = sub.add_parser("threshold", help="weak threshold alpha_w(beta) and perturbed bounds")
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--eps-file", help="JSON object with epsilon constants")
    s.set_defaults(fn=cmd_threshold)

    s = sub.add_parser("width", help="Monte Carlo estimate of xi_D or w_D")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--kind", choices=["xi", "w"], default="xi")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", **jobs)
    s.set_defaults(fn=cmd_width)

    for name, fn, hlp in (("trap", cmd_trap, "null-space / descent-set intersection rate"),
                          ("recover", cmd_recover, "basis pursuit recovery rate")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--m", type=int, required=True)
        s.add_argument("--k", type=int, required=True)
        s.add_argument("--trials", type=int, default=100)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--jobs", **jobs)
        s.set_defaults(fn=fn)

    s = sub.add_parser("phase", help="run a sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="output directory (overrides config)")
    s.add_argument("--jobs", **jobs)
    s.set_defaults(fn=cmd_phase)

    s = sub.add_parser("escape-bound", help="escape probability lower bound")
    s.add_argument("--w-d", type=float, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--constant", type=float, choices=[3.5, 2.5], default=3.5)
    s.set_defaults(fn=cmd_escape)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _print(args.fn(args))
    except (DomainError, HypothesisNotMet, ValueError, OSError) as exc:
        sys.stderr.write(f"meshtrap {args.command}: {exc}\n")
        return EXIT_USAGE
    except (NoRootError, np.linalg.LinAlgError, ArithmeticError) as exc:
        sys.stderr.write(f"meshtrap {args.command}: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
