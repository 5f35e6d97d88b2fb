"""The l1 descent set and its Gaussian widths.

The set is ``S = {w : ||w||_2 = 1, f(w) <= 0}`` with
``f(w) = sum_{i<k} w_i + sum_{i>=k} |w_i|``; support is the first k
coordinates, sign convention absorbed into f. Two per-sample quantities:

* ``xi_sample``: min over lambda >= 0 of max over the unit sphere of
  ``g.w - lambda f(w)``, solved exactly by a breakpoint sweep.
* ``w_sample``: max of ``g.w`` over S, taken as the norm of the projection of
  g onto the cone ``{f <= 0}`` (found by 1-D root finding).

They agree under strong duality, which holds for this f.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .seeding import rng_for


class WidthKind(str, enum.Enum):
    XiD = "xi"
    WD = "w"


@dataclass(frozen=True)
class ConeSpec:
    n: int
    k: int
    degree: int = 1

    def __post_init__(self):
        if self.n < 1 or not (0 <= self.k <= self.n):
            raise ValueError(f"need n >= 1 and 0 <= k <= n, got n={self.n}, k={self.k}")
        if self.degree != 1:
            raise ValueError("only degree-1 homogeneous f is supported")


@dataclass(frozen=True)
class WidthEstimate:
    mean: float
    std_error: float
    sample_std: float
    num_samples: int
    kind: WidthKind
    concentration_ratio: float
    zero_projections: int = 0

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["kind"] = self.kind.value
        return d


def _vec(cone: ConeSpec, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (cone.n,):
        raise ValueError(f"expected a vector of length {cone.n}, got shape {w.shape}")
    return w


def f_eval(cone: ConeSpec, w) -> float:
    w = _vec(cone, w)
    return float(np.sum(w[:cone.k]) + np.sum(np.abs(w[cone.k:])))


def membership(cone: ConeSpec, w, tol: float = 1e-9) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    w = _vec(cone, w)
    return bool(abs(np.linalg.norm(w) - 1.0) <= tol and f_eval(cone, w) <= tol)


def dual_objective(cone: ConeSpec, g, lam: float) -> float:
    """D(lam): squared sphere-maximum of ``g.w - lam f(w)``."""
    g = _vec(cone, g)
    on = g[:cone.k] - lam
    off = np.maximum(np.abs(g[cone.k:]) - lam, 0.0)
    return float(on @ on + off @ off)


def xi_minimizer(cone: ConeSpec, g) -> float:
    """Exact minimizer lam* >= 0 of the convex piecewise quadratic D."""
    g = _vec(cone, g)
    k = cone.k
    s_on = float(np.sum(g[:k]))
    # breakpoints in decreasing order; on (b[j], b[j-1]) the active off-support set is b[:j]
    b = np.sort(np.abs(g[k:]))[::-1]
    csum = np.concatenate(([0.0], np.cumsum(b)))
    upper = math.inf
    for j in range(len(b) + 1):
        lower = b[j] if j < len(b) else 0.0
        if k + j == 0:
            # D is identically 0 for lam >= max|g|
            if lower < upper:
                return float(lower) if math.isinf(upper) else float(upper)
            continue
        lam = (s_on + csum[j]) / (k + j)
        if lam >= lower and lam <= upper:
            return max(lam, 0.0)
        if lower <= 0.0:
            break
        upper = lower
    # stationary point is negative: D increasing on [0, inf)
    return 0.0


def xi_sample(cone: ConeSpec, g) -> float:
    lam = xi_minimizer(cone, g)
    return math.sqrt(dual_objective(cone, g, lam))


def _shrink(cone: ConeSpec, g: np.ndarray, mu: float) -> np.ndarray:
    w = g.copy()
    w[:cone.k] -= mu
    off = g[cone.k:]
    w[cone.k:] = np.sign(off) * np.maximum(np.abs(off) - mu, 0.0)
    return w


def project_cone(cone: ConeSpec, g) -> np.ndarray:
    """Euclidean projection of g onto the closed convex cone ``{f <= 0}``.

    The projection is ``w(mu) = g - mu * s`` (shift on the support,
    soft-threshold off it) for the unique mu >= 0 with ``f(w(mu)) = 0``.
    mu is bracketed and bisected, then polished by solving the linear
    equation on the active set found by the bisection.
    """
    g = _vec(cone, g)
    k = cone.k
    if f_eval(cone, g) <= 0.0:
        return g.copy()
    absoff = np.abs(g[k:])
    phi = lambda mu: f_eval(cone, _shrink(cone, g, mu))  # noqa: E731
    hi = max(float(absoff.max()) if absoff.size else 0.0, float(np.sum(g[:k])) / k if k else 0.0, 0.0)
    if k == 0:
        # f is the l1 norm; the cone is {0}
        return np.zeros_like(g)
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if phi(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    mu = 0.5 * (lo + hi)
    active = absoff > mu
    mu_exact = (np.sum(g[:k]) + np.sum(absoff[active])) / (k + np.count_nonzero(active))
    # accept the polish only if it keeps the same active set
    if np.array_equal(absoff > mu_exact, active) and mu_exact >= 0.0:
        mu = float(mu_exact)
    else:
        mu = hi
    return _shrink(cone, g, mu)


def w_sample(cone: ConeSpec, g) -> tuple[float, bool]:
    """Return ``(width, zero_flag)``; zero_flag marks a zero cone projection."""
    p = project_cone(cone, g)
    r = float(np.linalg.norm(p))
    if r == 0.0:
        return 0.0, True
    return r, False


def width_samples(cone: ConeSpec, kind: WidthKind | str, num_samples: int, seed: int) -> tuple[np.ndarray, int]:
    kind = WidthKind(kind)
    out = np.empty(num_samples)
    zeros = 0
    for i in range(num_samples):
        g = rng_for(seed, i).standard_normal(cone.n)
        if kind is WidthKind.XiD:
            out[i] = xi_sample(cone, g)
        else:
            out[i], z = w_sample(cone, g)
            zeros += z
    return out, zeros


def estimate_width(cone: ConeSpec, kind: WidthKind | str, num_samples: int, seed: int) -> WidthEstimate:
    """Monte Carlo estimate of xi_D or w_D; sample i uses the stream (seed, i)."""
    if num_samples < 2:
        raise ValueError("num_samples must be at least 2")
    x, zeros = width_samples(cone, kind, num_samples, seed)
    return summarize_samples(x, kind, zeros)


def summarize_samples(x: np.ndarray, kind: WidthKind | str, zeros: int = 0) -> WidthEstimate:
    kind = WidthKind(kind)
    num_samples = len(x)
    mean = float(np.mean(x))
    sd = float(np.std(x, ddof=1))
    ratio = sd / mean if mean > 0 else math.inf
    return WidthEstimate(mean=mean, std_error=sd / math.sqrt(num_samples), sample_std=sd,
                         num_samples=num_samples, kind=kind, concentration_ratio=ratio,
                         zero_projections=zeros)


def concentration_report(cone: ConeSpec, kind: WidthKind | str, num_samples: int, seed: int) -> tuple[float, float, float]:
    est = estimate_width(cone, kind, num_samples, seed)
    return est.mean, est.sample_std, est.concentration_ratio
