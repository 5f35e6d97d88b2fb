"""Weak-threshold equations for fixed-support, fixed-sign l1 recovery.

The unperturbed characterization ties the sparsity ratio ``beta_w = k/n`` to
the critical measurement ratio ``alpha_w = m/n``::

    (1 - beta) sqrt(2/pi) exp(-t^2) / theta - sqrt(2) t = 0,
    t = erfinv((1 - theta) / (1 - beta)).

The epsilon-perturbed versions bound alpha from below (recovery succeeds)
and from above (recovery fails). All roots are found by bracketed
bisection; multiple sign changes are reported rather than silently chosen.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields
from typing import Callable, Sequence

from .specfn import DomainError, erfinv

log = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

SCAN_STEP = 1e-3
LEFT_OFFSET = 1e-9
BISECT_TOL = 1e-12
RESIDUAL_TOL = 1e-10


class NoRootError(RuntimeError):
    """No sign change of a threshold equation inside its bracket."""


class HypothesisNotMet(ValueError):
    """The escape theorem's width condition does not hold; it says nothing."""


@dataclass(frozen=True)
class ThresholdPoint:
    beta_w: float
    alpha_w: float
    residual: float
    sign_changes: int = 1


@dataclass(frozen=True)
class EpsilonSet:
    eps1_c: float = 0.0
    eps2_c: float = 0.0
    eps1_m: float = 0.0
    eps1_g: float = 0.0
    eps3_g: float = 0.0
    eps5_g: float = 0.0
    eps1: float = 0.0
    eps2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (0.0 <= v < 0.5):
                raise ValueError(f"{f.name} must lie in [0, 0.5), got {v!r}")

    @classmethod
    def uniform(cls, eps: float) -> "EpsilonSet":
        return cls(**{f.name: eps for f in fields(cls)})

    @classmethod
    def from_dict(cls, d: dict) -> "EpsilonSet":
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown epsilon keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})


def _check_beta(beta_w: float) -> None:
    if not (0.0 < beta_w < 1.0):
        raise DomainError(f"beta_w must lie in (0, 1), got {beta_w!r}")


def _t(beta_w: float, theta: float) -> float:
    return erfinv((1.0 - theta) / (1.0 - beta_w))


def _perturbed_lhs(beta_w: float, theta: float, lead: float, inner: float) -> float:
    t = _t(beta_w, theta)
    u = erfinv(inner * (1.0 - theta) / (1.0 - beta_w))
    return lead * (1.0 - beta_w) * SQRT_2_OVER_PI * math.exp(-t * t) / theta - math.sqrt(2.0) * u


def fundamental_lhs(beta_w: float, theta: float) -> float:
    """Left-hand side of the characterization equation at ``theta``."""
    if not (0.0 <= beta_w < theta <= 1.0):
        raise DomainError(f"need 0 <= beta_w < theta <= 1, got beta_w={beta_w!r}, theta={theta!r}")
    return _perturbed_lhs(beta_w, theta, 1.0, 1.0)


def _bisect(fn: Callable[[float], float], lo: float, hi: float, flo: float) -> tuple[float, float]:
    # invariant: sign(fn(lo)) == sign(flo) != sign(fn(hi))
    mid, fmid = hi, fn(hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = fn(mid)
        if fmid == 0.0:
            return mid, 0.0
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= BISECT_TOL and abs(fmid) <= RESIDUAL_TOL:
            break
    return mid, abs(fmid)


def _root_from_right(fn: Callable[[float], float], left: float) -> tuple[float, float, int]:
    """First sign change of ``fn`` scanning (left, 1] from the right, then bisection."""
    grid = []
    x = 1.0
    while x > left:
        grid.append(x)
        x = 1.0 - len(grid) * SCAN_STEP
    grid.append(left)
    values = [fn(g) for g in grid]
    changes = [i for i in range(len(grid) - 1)
               if values[i] == 0.0 or (values[i] > 0) != (values[i + 1] > 0)]
    if not changes:
        raise NoRootError(f"no sign change on ({left}, 1]")
    if len(changes) > 1:
        log.warning("threshold equation has %d sign changes; using the rightmost", len(changes))
    i = changes[0]
    if values[i] == 0.0:
        return grid[i], 0.0, len(changes)
    # grid[i+1] < grid[i]: bisect with lo on the left
    root, res = _bisect(fn, grid[i + 1], grid[i], values[i + 1])
    return root, res, len(changes)


def weak_threshold(beta_w: float) -> ThresholdPoint:
    """Solve the characterization equation for alpha_w at sparsity ratio beta_w."""
    _check_beta(beta_w)
    root, res, nchg = _root_from_right(lambda th: fundamental_lhs(beta_w, th), beta_w + LEFT_OFFSET)
    return ThresholdPoint(beta_w=beta_w, alpha_w=root, residual=res, sign_changes=nchg)


def _perturbed_root(beta_w: float, lead: float, inner: float) -> float:
    _check_beta(beta_w)
    # keep inner*(1-theta)/(1-beta) < 1
    left = max(beta_w, 1.0 - (1.0 - beta_w) / inner) + LEFT_OFFSET
    if left >= 1.0:
        raise DomainError("perturbation leaves no admissible theta")
    root, res, _ = _root_from_right(lambda th: _perturbed_lhs(beta_w, th, lead, inner), left)
    return root


def theta_hat_lower(beta_w: float, eps: EpsilonSet) -> float:
    """Root theta_hat of the (1 -/+ eps1_c)-perturbed equation (success side)."""
    return _perturbed_root(beta_w, 1.0 - eps.eps1_c, 1.0 + eps.eps1_c)


def theta_hat_upper(beta_w: float, eps: EpsilonSet) -> float:
    """Root theta_hat of the (1 +/- eps2_c)-perturbed equation (failure side)."""
    return _perturbed_root(beta_w, 1.0 + eps.eps2_c, 1.0 - eps.eps2_c)


def alpha_lower_bound(beta_w: float, eps: EpsilonSet) -> float:
    """alpha above this value guarantees recovery with overwhelming probability."""
    th = theta_hat_lower(beta_w, eps)
    t = _t(beta_w, th)
    et2 = math.exp(t * t)
    gauss = (1.0 - beta_w) * SQRT_2_OVER_PI * math.exp(-t * t)
    return ((1.0 - beta_w) / SQRT_2PI
            * (SQRT_2PI + 2.0 * math.sqrt(2.0 * t * t) / et2 - SQRT_2PI * (1.0 - th) / (1.0 - beta_w))
            + beta_w - gauss ** 2 / th)


def alpha_upper_bound(beta_w: float, eps: EpsilonSet) -> float:
    """alpha below this value guarantees failure with overwhelming probability."""
    th = theta_hat_upper(beta_w, eps)
    t = _t(beta_w, th)
    et2 = math.exp(t * t)
    gauss = (1.0 - beta_w) * SQRT_2_OVER_PI * math.exp(-t * t)
    inner = ((1.0 - eps.eps1_g) * (th + 2.0 * (1.0 - beta_w) / SQRT_2PI * math.sqrt(2.0 * t * t) / et2)
             - gauss ** 2 / (th * (1.0 + eps.eps3_g) ** -2))
    return inner / (1.0 + eps.eps1_m) ** 2


def escape_prob_lower_bound(w_D: float, m: int, constant: float = 3.5) -> float:
    """Gordon's lower bound on P(Y misses S), clamped to [0, 1].

    ``constant`` is 3.5 (original) or 2.5 (sharpened). Raises HypothesisNotMet
    when ``w_D >= sqrt(m) - 1/(4 sqrt(m))``.
    """
    if constant not in (3.5, 2.5):
        raise ValueError("constant must be 3.5 or 2.5")
    if m < 1 or w_D < 0:
        raise ValueError("need m >= 1 and w_D >= 0")
    gap = math.sqrt(m) - 1.0 / (4.0 * math.sqrt(m)) - w_D
    if gap <= 0:
        raise HypothesisNotMet(f"w_D={w_D} is not below sqrt(m) - 1/(4 sqrt(m)) for m={m}")
    return min(1.0, max(0.0, 1.0 - constant * math.exp(-gap * gap / 18.0)))


def trapped_condition(xi_D: float, m: int, n: int, eps: EpsilonSet) -> bool:
    """Whether ``xi_D >= (1 + eps1) sqrt(m) + eps2 sqrt(n)`` holds."""
    return xi_D >= (1.0 + eps.eps1) * math.sqrt(m) + eps.eps2 * math.sqrt(n)


def threshold_curve(betas: Sequence[float]) -> list[ThresholdPoint | Exception]:
    """Pointwise :func:`weak_threshold`; failures are returned in place, not raised."""
    out: list[ThresholdPoint | Exception] = []
    for b in betas:
        try:
            out.append(weak_threshold(b))
        except (DomainError, NoRootError) as exc:
            out.append(exc)
    return out
