"""Phase-diagram sweeps over (alpha, beta) with recovery and trap trials."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.optimize
import scipy.special

from . import __version__
from .geometry import ProblemGeometry
from .l1 import BPOptions, _recover, plant, trial_matrix
from .linalg import null_space_basis
from .parallel import pmap
from .seeding import derived_seed
from .thresholds import weak_threshold
from .trap import TrapOptions, Verdict, tau_ball
from .cone import ConeSpec

__all__ = ["ProblemGeometry", "PhaseCell", "SweepConfig", "TrialRecord", "AgreementRecord",
           "NoCrossing", "run_sweep", "fit_crossing", "emit", "recovery_vs_trap"]

CSV_COLUMNS = ["beta", "alpha", "n", "m", "k", "trials", "recovery_successes",
               "trapped", "escaped", "indeterminate", "agreement", "seed_base"]
TRIAL_COLUMNS = ["cell", "trial", "seed", "beta", "alpha", "recovered", "verdict", "comparable", "agree"]
ROUNDING_RULE = "k = round(beta * n), m = round(alpha * n); round half to even"
MODES = ("recovery", "trap", "both")


class NoCrossing(ValueError):
    """Success rates never straddle one half."""


@dataclass(frozen=True)
class SweepConfig:
    n: int
    betas: list[float]
    alphas: list[float]
    trials: int
    mode: str = "both"
    seed: int = 0
    out: str | None = None
    trial_log: bool = False
    overlay: bool = True
    format: str = "csv"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.trials < 1 or self.n < 2:
            raise ValueError("need trials >= 1 and n >= 2")
        for r in [*self.betas, *self.alphas]:
            if not (0.0 < r < 1.0):
                raise ValueError(f"ratio {r} outside (0, 1)")
        for a in self.alphas:
            m = int(round(a * self.n))
            if not (1 <= m < self.n):
                raise ValueError(f"alpha={a} rounds to m={m}, need 1 <= m < n")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        d["betas"] = [float(b) for b in d.get("betas", [])]
        d["alphas"] = [float(a) for a in d.get("alphas", [])]
        return cls(**d)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def geometries(self) -> list[ProblemGeometry]:
        return [ProblemGeometry.from_ratios(self.n, a, b) for b in self.betas for a in self.alphas]


@dataclass
class PhaseCell:
    alpha: float
    beta_w: float
    n: int
    m: int
    k: int
    trials: int = 0
    recovery_successes: int = 0
    trapped: int = 0
    escaped: int = 0
    indeterminate: int = 0
    agreement: int = 0
    seed_base: int = 0
    errors: int = 0

    def row(self) -> list:
        return [self.beta_w, self.alpha, self.n, self.m, self.k, self.trials, self.recovery_successes,
                self.trapped, self.escaped, self.indeterminate, self.agreement, self.seed_base]

    @property
    def success_rate(self) -> float:
        return self.recovery_successes / self.trials if self.trials else math.nan


@dataclass(frozen=True)
class AgreementRecord:
    verdict: Verdict
    recovered: bool
    comparable: bool
    agree: bool | None


@dataclass(frozen=True)
class TrialRecord:
    cell: int
    trial: int
    seed: int
    recovered: bool | None
    verdict: Verdict | None
    error: str | None = None

    @property
    def comparable(self) -> bool:
        return (self.recovered is not None and self.verdict is not None
                and self.verdict is not Verdict.Indeterminate)

    @property
    def agree(self) -> bool | None:
        if not self.comparable:
            return None
        return self.recovered == (self.verdict is Verdict.Escaped)


def recovery_vs_trap(geom: ProblemGeometry, seed: int, bp: BPOptions = BPOptions(),
                     trap: TrapOptions = TrapOptions()) -> AgreementRecord:
    """Recovery and trap test on the same sampled A.

    The two should agree: the planted vector is the unique l1 minimizer iff the
    null space misses the descent set.
    """
    rec, verdict = _run_both(geom, seed, bp, trap)
    comparable = verdict is not Verdict.Indeterminate
    agree = (rec == (verdict is Verdict.Escaped)) if comparable else None
    return AgreementRecord(verdict, rec, comparable, agree)


def _run_both(geom, seed, bp, trap, do_rec=True, do_trap=True):
    A = trial_matrix(geom, seed)
    rec = verdict = None
    if do_rec:
        rec = _recover(A, plant(geom, seed), bp).success
    if do_trap:
        verdict = tau_ball(ConeSpec(geom.n, geom.k), null_space_basis(A), trap).verdict
    return rec, verdict


def _trial_job(item) -> TrialRecord:
    cell, trial, seed, geom, mode = item
    try:
        rec, verdict = _run_both(geom, seed, BPOptions(), TrapOptions(),
                                 mode in ("recovery", "both"), mode in ("trap", "both"))
    except (np.linalg.LinAlgError, ValueError) as exc:
        return TrialRecord(cell, trial, seed, None, None, f"{type(exc).__name__}: {exc}")
    return TrialRecord(cell, trial, seed, rec, verdict)


def run_sweep(config: SweepConfig, jobs: int = 1) -> tuple[list[PhaseCell], list[TrialRecord]]:
    """Run every (beta, alpha) cell; the result does not depend on ``jobs``.

    Cells are ordered beta-major. Trial t of cell c uses the seed
    ``derived_seed(config.seed, c, t)``.
    """
    geoms = config.geometries()
    items = [(c, t, derived_seed(config.seed, c, t), g, config.mode)
             for c, g in enumerate(geoms) for t in range(config.trials)]
    records = pmap(_trial_job, items, jobs)
    cells = []
    for c, g in enumerate(geoms):
        alpha = config.alphas[c % len(config.alphas)]
        beta = config.betas[c // len(config.alphas)]
        cells.append(PhaseCell(alpha=alpha, beta_w=beta, n=g.n, m=g.m, k=g.k,
                               seed_base=derived_seed(config.seed, c)))
    for r in records:
        cell = cells[r.cell]
        cell.trials += 1
        if r.error is not None:
            cell.errors += 1
            if config.mode != "recovery":
                cell.indeterminate += 1
            continue
        cell.recovery_successes += bool(r.recovered)
        if r.verdict is Verdict.Trapped:
            cell.trapped += 1
        elif r.verdict is Verdict.Escaped:
            cell.escaped += 1
        elif r.verdict is Verdict.Indeterminate:
            cell.indeterminate += 1
        cell.agreement += r.agree is True
    return cells, records


def fit_crossing(cells: Sequence[PhaseCell], n_boot: int = 200, seed: int = 0) -> tuple[float, tuple[float, float]]:
    """Logistic fit of recovery rate against alpha for one beta column.

    Returns the 50% crossing and a 95% parametric-bootstrap interval.
    """
    cells = sorted(cells, key=lambda c: c.alpha)
    if len(cells) < 5:
        raise ValueError("need at least 5 cells")
    a = np.array([c.alpha for c in cells])
    n = np.array([c.trials for c in cells], dtype=float)
    s = np.array([c.recovery_successes for c in cells], dtype=float)
    p = s / n
    if not (np.any(p < 0.5) and np.any(p > 0.5)):
        raise NoCrossing("success rate does not cross 1/2")
    lo, hi = float(a[0]), float(a[-1])

    def fit(succ):
        rate = succ / n
        # start at the first interpolated crossing
        i = int(np.argmax(rate >= 0.5)) if np.any(rate >= 0.5) else len(a) - 1
        a0 = a[i] if i == 0 else a[i - 1] + (0.5 - rate[i - 1]) * (a[i] - a[i - 1]) / max(rate[i] - rate[i - 1], 1e-12)
        a0 = min(max(a0, lo), hi)

        def nll(theta):
            z = (a - theta[0]) / math.exp(theta[1])
            return -float(np.sum(succ * -np.logaddexp(0, -z) + (n - succ) * -np.logaddexp(0, z)))

        res = scipy.optimize.minimize(nll, [a0, math.log(0.05)], method="L-BFGS-B",
                                      bounds=[(lo, hi), (math.log(1e-4), 0.0)])
        return float(res.x[0])

    mid = fit(s)
    rng = np.random.default_rng(seed)
    boots = [fit(rng.binomial(n.astype(int), p).astype(float)) for _ in range(n_boot)]
    return mid, (float(np.quantile(boots, 0.025)), float(np.quantile(boots, 0.975)))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


PLOT_SCRIPT = '''"""Plot a phase diagram emitted by meshtrap (requires matplotlib)."""
import csv, sys
import matplotlib.pyplot as plt

d = sys.argv[1] if len(sys.argv) > 1 else "."
rows = list(csv.DictReader(open(f"{d}/phase.csv")))
b = [float(r["beta"]) for r in rows]
a = [float(r["alpha"]) for r in rows]
p = [int(r["recovery_successes"]) / int(r["trials"]) for r in rows]
plt.scatter(b, a, c=p, cmap="viridis", marker="s")
plt.colorbar(label="recovery rate")
try:
    curve = list(csv.DictReader(open(f"{d}/curve.csv")))
    plt.plot([float(r["beta"]) for r in curve], [float(r["alpha_w"]) for r in curve], "r-", label="weak threshold")
    plt.legend()
except FileNotFoundError:
    pass
plt.xlabel("beta = k/n"); plt.ylabel("alpha = m/n")
plt.savefig(f"{d}/phase.png", dpi=150)
'''


def emit(cells: Sequence[PhaseCell], out_dir, overlay: Sequence[float] | None = None, fmt: str = "csv",
         config: SweepConfig | None = None, records: Sequence[TrialRecord] | None = None) -> list[Path]:
    """Write the sweep to ``out_dir``; returns the paths written.

    ``phase.csv`` (or ``phase.json``), optional ``curve.csv`` with the weak
    threshold at the ``overlay`` betas, optional ``trials.csv`` and a
    ``plot_phase.py`` convenience script.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    rows = [c.row() for c in cells]
    meta = {
        "config": dataclasses.asdict(config) if config else None,
        "version": f"v{__version__}",
        "tool": f"meshtrap {__version__}",
        "rounding_rule": ROUNDING_RULE,
        "columns": CSV_COLUMNS,
    }
    if fmt == "csv":
        path = out / "phase.csv"
        path.write_text(_csv_text(CSV_COLUMNS, rows))
        written.append(path)
        path = out / "meta.json"
        path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    elif fmt == "json":
        path = out / "phase.json"
        doc = {"meta": meta,
               "cells": [dict(zip(CSV_COLUMNS, r)) | {"errors": c.errors} for r, c in zip(rows, cells)]}
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        raise ValueError("fmt must be csv or json")
    written.append(path)
    if overlay is not None:
        pts = []
        for b in overlay:
            tp = weak_threshold(b)
            pts.append([b, tp.alpha_w])
        path = out / "curve.csv"
        path.write_text(_csv_text(["beta", "alpha_w"], pts))
        written.append(path)
    if records is not None:
        by_cell = {i: c for i, c in enumerate(cells)}
        trows = []
        for r in records:
            c = by_cell[r.cell]
            trows.append([r.cell, r.trial, r.seed, c.beta_w, c.alpha,
                          "" if r.recovered is None else int(r.recovered),
                          "" if r.verdict is None else r.verdict.value,
                          int(r.comparable), "" if r.agree is None else int(r.agree)])
        path = out / "trials.csv"
        path.write_text(_csv_text(TRIAL_COLUMNS, trows))
        written.append(path)
    path = out / "plot_phase.py"
    path.write_text(PLOT_SCRIPT)
    written.append(path)
    return written
