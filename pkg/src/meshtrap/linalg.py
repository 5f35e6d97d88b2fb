"""Dense kernels: seeded Gaussian matrices, null-space bases, SPD solves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .seeding import rng_for


class RankError(np.linalg.LinAlgError):
    pass


class FactorError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class GaussianMatrix:
    entries: np.ndarray
    seed: int

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class NullBasis:
    matrix: np.ndarray  # n x (n - m), orthonormal columns

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def sample_gaussian(m: int, n: int, seed: int, *path: int) -> GaussianMatrix:
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    a = rng_for(seed, *path).standard_normal((m, n))
    a.setflags(write=False)
    return GaussianMatrix(entries=a, seed=seed)


def householder_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Complete Householder QR (LAPACK geqrf/orgqr): a = Q R, Q square."""
    return scipy.linalg.qr(a, mode="full")


def null_space_basis(A, rank_tol: float = 1e-10) -> NullBasis:
    """Orthonormal basis of ``{w : A w = 0}`` from the QR factorization of A^T."""
    a = A.entries if isinstance(A, GaussianMatrix) else np.asarray(A, dtype=float)
    m, n = a.shape
    if m >= n:
        raise ValueError(f"need m < n, got {a.shape}")
    q, r = householder_qr(a.T)
    d = np.abs(np.diag(r))
    if d.min() <= rank_tol * max(d.max(), 1e-300):
        raise RankError("matrix is numerically rank deficient")
    return NullBasis(matrix=np.ascontiguousarray(q[:, m:]))


class Cholesky:
    """Lower Cholesky factor of an SPD matrix with a solve method."""

    def __init__(self, M):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or not np.allclose(M, M.T, rtol=1e-12, atol=0):
            raise FactorError("matrix must be square and symmetric")
        try:
            self.L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError as exc:
            raise FactorError(str(exc)) from exc

    def solve(self, b):
        y = scipy.linalg.solve_triangular(self.L, b, lower=True)
        return scipy.linalg.solve_triangular(self.L.T, y, lower=False)


def cholesky_spd(M) -> Cholesky:
    return Cholesky(M)
