"""Does the null space of A meet the descent set S?

The sign of ``tau = min f(w) s.t. A w = 0, ||w||_2 <= 1`` decides it; f is
positively homogeneous of degree 1, so the ball and sphere versions share
their sign. With an orthonormal null basis B the problem is
``min_{||z|| <= 1} f(B z)``.

* Trapped: an explicit witness z with ``f(B z) <= -delta`` found by projected
  subgradient descent.
* Escaped: f is the support function of ``C = {s : s_i = 1 (i < k), |s_i| <= 1}``,
  so ``f(B z) >= s.(B z) >= -||B^T s||`` for every s in C. A box-constrained
  least-squares solve gives the best such bound; it is a rigorous certificate.
* Indeterminate: neither certificate at margin delta.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.stats

from .cone import ConeSpec, f_eval
from .geometry import ProblemGeometry
from .linalg import NullBasis, null_space_basis
from .l1 import trial_matrix
from .seeding import derived_seed


class Verdict(str, enum.Enum):
    Trapped = "trapped"
    Escaped = "escaped"
    Indeterminate = "indeterminate"


@dataclass(frozen=True)
class TrapOptions:
    step: float = 0.5
    max_iter: int = 20000
    delta_scale: float = 1e-4  # delta = delta_scale * sqrt(n)
    warm_start: bool = True


@dataclass(frozen=True)
class TrapVerdict:
    verdict: Verdict
    tau_value: float  # best primal objective found (0 is always attainable)
    witness: np.ndarray | None
    iterations: int
    margin: float
    lower_bound: float  # certified lower bound on tau


@dataclass(frozen=True)
class TrapStats:
    rate: float  # trapped / determinate
    interval: tuple[float, float]
    trapped: int
    escaped: int
    indeterminate: int
    trials: int


def _subgradient(cone: ConeSpec, w: np.ndarray) -> np.ndarray:
    s = np.sign(w)
    s[:cone.k] = 1.0
    return s


def dual_bound(cone: ConeSpec, B: np.ndarray) -> tuple[float, np.ndarray]:
    """Return ``(r, s)`` with s in C minimizing ``r = ||B^T s||``; then tau >= -r."""
    k = cone.k
    base = B[:k].sum(axis=0)
    if k == cone.n:
        return float(np.linalg.norm(base)), np.ones(cone.n)
    res = scipy.optimize.lsq_linear(B[k:].T, -base, bounds=(-1.0, 1.0), method="trf",
                                    tol=1e-12, lsmr_tol="auto")
    s = np.concatenate([np.ones(k), np.clip(res.x, -1.0, 1.0)])
    return float(np.linalg.norm(B.T @ s)), s


def tau_ball(cone: ConeSpec, basis: NullBasis, opts: TrapOptions = TrapOptions()) -> TrapVerdict:
    B = basis.matrix
    if B.shape[0] != cone.n:
        raise ValueError(f"basis has {B.shape[0]} rows, cone has n={cone.n}")
    delta = opts.delta_scale * math.sqrt(cone.n)
    d = B.shape[1]
    if d == 0:
        return TrapVerdict(Verdict.Escaped, 0.0, None, 0, delta, 0.0)
    r, s = dual_bound(cone, B)
    if r <= delta / 4.0:
        return TrapVerdict(Verdict.Escaped, 0.0, None, 0, delta, -r)

    # primal: projected subgradient with averaging; the dual residual direction is the
    # minimizer when the dual solve is exact, so it is used as the starting point
    if opts.warm_start:
        z = -(B.T @ s) / r
    else:
        z = np.zeros(d)
        z[0] = 1.0
    best_val, best_z = math.inf, z
    avg = np.zeros(d)
    it = 0
    for it in range(1, opts.max_iter + 1):
        val = f_eval(cone, B @ z)
        if val < best_val:
            best_val, best_z = val, z
        za = avg / (it - 1) if it > 1 else z
        vala = f_eval(cone, B @ za)
        if vala < best_val:
            best_val, best_z = vala, za
        if best_val <= -delta:
            break
        gz = B.T @ _subgradient(cone, B @ z)
        z = z - opts.step / math.sqrt(it) * gz
        nz = np.linalg.norm(z)
        if nz > 1.0:
            z = z / nz
        avg += z
    if best_val <= -delta:
        w = B @ best_z
        w = w / np.linalg.norm(w)
        return TrapVerdict(Verdict.Trapped, best_val, w, it, delta, -r)
    return TrapVerdict(Verdict.Indeterminate, min(best_val, 0.0), None, it, delta, -r)


def trap_trial(geom: ProblemGeometry, seed: int, opts: TrapOptions = TrapOptions()) -> TrapVerdict:
    A = trial_matrix(geom, seed)
    cone = ConeSpec(geom.n, geom.k)
    if geom.m >= geom.n:
        return TrapVerdict(Verdict.Escaped, 0.0, None, 0, opts.delta_scale * math.sqrt(geom.n), 0.0)
    return tau_ball(cone, null_space_basis(A), opts)


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    ci = scipy.stats.binomtest(successes, n).proportion_ci(confidence_level=confidence, method="wilson")
    return (float(ci.low), float(ci.high))


def summarize(verdicts: list[Verdict]) -> TrapStats:
    t = sum(v is Verdict.Trapped for v in verdicts)
    e = sum(v is Verdict.Escaped for v in verdicts)
    i = len(verdicts) - t - e
    det = t + e
    rate = t / det if det else math.nan
    return TrapStats(rate, wilson_interval(t, det), t, e, i, len(verdicts))


def trap_probability(geom: ProblemGeometry, trials: int, seed: int,
                     opts: TrapOptions = TrapOptions()) -> TrapStats:
    """Fraction of Trapped verdicts among determinate trials, with a Wilson interval.

    Trial i uses the derived seed ``(seed, i)``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    return summarize([trap_trial(geom, derived_seed(seed, i), opts).verdict for i in range(trials)])
