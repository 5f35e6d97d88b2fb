"""Basis pursuit by ADMM, and planted-vector recovery trials."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .geometry import ProblemGeometry
from .linalg import cholesky_spd, sample_gaussian
from .seeding import rng_for


@dataclass(frozen=True)
class BPOptions:
    rho: float = 1.0
    relax: float = 1.8
    tol: float = 1e-9
    max_iter: int = 50000
    polish: bool = True
    polish_every: int = 20
    adaptive_rho: bool = True
    success_tol: float = 1e-5


@dataclass(frozen=True)
class BPSolution:
    x: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    certified: bool  # an exact KKT certificate was verified for x


@dataclass(frozen=True)
class RecoveryResult:
    x_hat: np.ndarray
    planted: np.ndarray
    success: bool
    rel_err_inf: float
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool = True
    error: str | None = None


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


class _AffineProjector:
    """Projection onto {x : A x = y} via a cached Cholesky factor of A A^T."""

    def __init__(self, A: np.ndarray, y: np.ndarray):
        self.A = A
        chol = cholesky_spd(A @ A.T)
        # P = I - A^T (A A^T)^{-1} A, q = A^T (A A^T)^{-1} y
        self.P = np.eye(A.shape[1]) - A.T @ chol.solve(A)
        self.q = A.T @ chol.solve(y)
        self.chol = chol

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.P @ v + self.q


def _certify(A: np.ndarray, y: np.ndarray, supp: np.ndarray, nu0: np.ndarray):
    """Least squares on ``supp``; return x only if a KKT certificate verifies it.

    x is optimal iff it is feasible and some c = A^T nu has c_i = sign(x_i)
    on the support and |c_i| <= 1 elsewhere. nu starts at ``nu0`` and is
    corrected by the minimum-norm step that fixes the support equations.
    """
    n = A.shape[1]
    x = np.zeros(n)
    if supp.any():
        As = A[:, supp]
        if As.shape[0] == As.shape[1]:
            try:
                xt = np.linalg.solve(As, y)
            except np.linalg.LinAlgError:
                return None
        else:
            xt, *_ = scipy.linalg.lstsq(As, y)
        x[supp] = xt
        supp = x != 0.0
    if np.linalg.norm(A @ x - y) > 1e-10 * (1.0 + np.linalg.norm(y)):
        return None
    nu = nu0
    if supp.any():
        AT = A[:, supp]
        sg = np.sign(x[supp])
        if AT.shape[0] == AT.shape[1]:
            corr = np.linalg.solve(AT.T, sg - AT.T @ nu)
        else:
            corr, *_ = scipy.linalg.lstsq(AT.T, sg - AT.T @ nu)
        nu = nu + corr
        if np.max(np.abs(AT.T @ nu - sg)) > 1e-9:
            return None
    c_off = A[:, ~supp].T @ nu
    if c_off.size and np.max(np.abs(c_off)) > 1.0 + 1e-9:
        return None
    return x


def _try_polish(A: np.ndarray, y: np.ndarray, z: np.ndarray, dual: np.ndarray,
                proj: "_AffineProjector", tried: set):
    m, n = A.shape
    # nu0 fits the ADMM dual estimate by A^T nu
    nu0 = proj.chol.solve(A @ dual)
    scale = np.max(np.abs(z))
    supp = np.abs(z) > 1e-7 * scale if scale > 0 else np.zeros(n, dtype=bool)
    if supp.sum() <= m and (key := supp.tobytes()) not in tried:
        tried.add(key)
        x = _certify(A, y, supp, nu0)
        if x is not None:
            return x
    # a vertex of the LP has at most m nonzeros; rank candidates by primal and by dual magnitude
    for score in (np.abs(z), np.abs(A.T @ nu0)):
        top = np.zeros(n, dtype=bool)
        top[np.argsort(-score, kind="stable")[:m]] = True
        if (key := top.tobytes()) in tried:
            continue
        tried.add(key)
        x = _certify(A, y, top, nu0)
        if x is not None:
            return x
    return None


def solve_basis_pursuit(A, y, opts: BPOptions = BPOptions()) -> BPSolution:
    """Minimize ||x||_1 subject to A x = y (A with full row rank).

    ADMM splitting ``x in {Ax = y}``, ``z`` carrying the l1 term, with
    over-relaxation. Periodically the support of z is polished by least
    squares and accepted when an exact optimality certificate checks out.
    The returned x is always projected onto the feasible set.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    m, n = A.shape
    if m > n:
        raise ValueError("need m <= n")
    proj = _AffineProjector(A, y)
    rho, a = opts.rho, opts.relax
    z = proj(np.zeros(n))
    u = np.zeros(n)
    r_norm = s_norm = math.inf
    it = 0
    tried: set = set()
    for it in range(1, opts.max_iter + 1):
        x = proj(z - u)
        xh = a * x + (1.0 - a) * z
        z_old = z
        z = soft_threshold(xh + u, 1.0 / rho)
        u = u + xh - z
        r_norm = float(np.linalg.norm(x - z))
        s_norm = float(rho * np.linalg.norm(z - z_old))
        eps_p = opts.tol * max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(z)))
        eps_d = opts.tol * max(1.0, float(rho * np.linalg.norm(u)))
        if r_norm <= eps_p and s_norm <= eps_d:
            return BPSolution(proj(z), it, r_norm, s_norm, True, False)
        if opts.adaptive_rho and it % 10 == 0:
            # residual balancing; the projection step does not depend on rho
            if r_norm > 10.0 * s_norm:
                rho *= 2.0
                u = u / 2.0
            elif s_norm > 10.0 * r_norm:
                rho /= 2.0
                u = u * 2.0
        if opts.polish and it % opts.polish_every == 0:
            xp = _try_polish(A, y, z, rho * u, proj, tried)
            if xp is not None:
                return BPSolution(xp, it, r_norm, s_norm, True, True)
    return BPSolution(proj(z), it, r_norm, s_norm, False, False)


def plant(geom: ProblemGeometry, seed: int) -> np.ndarray:
    """k-sparse vector on the first k coordinates with negative entries."""
    x = np.zeros(geom.n)
    x[:geom.k] = -np.abs(rng_for(seed, 1).standard_normal(geom.k))
    return x


def trial_matrix(geom: ProblemGeometry, seed: int) -> np.ndarray:
    return sample_gaussian(geom.m, geom.n, seed, 0).entries


def recovery_trial(geom: ProblemGeometry, seed: int, opts: BPOptions = BPOptions()) -> RecoveryResult:
    A = trial_matrix(geom, seed)
    xt = plant(geom, seed)
    return _recover(A, xt, opts)


def _recover(A: np.ndarray, xt: np.ndarray, opts: BPOptions) -> RecoveryResult:
    y = A @ xt
    try:
        sol = solve_basis_pursuit(A, y, opts)
    except np.linalg.LinAlgError as exc:
        return RecoveryResult(np.full_like(xt, np.nan), xt, False, math.inf, 0, math.inf, math.inf,
                              False, f"{type(exc).__name__}: {exc}")
    err = float(np.max(np.abs(sol.x - xt))) / max(1.0, float(np.max(np.abs(xt), initial=0.0)))
    return RecoveryResult(sol.x, xt, err <= opts.success_tol, err, sol.iterations,
                          sol.primal_residual, sol.dual_residual, sol.converged)
