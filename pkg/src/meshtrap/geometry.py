from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ProblemGeometry:
    n: int
    m: int
    k: int

    def __post_init__(self):
        if self.n < 1 or not (0 <= self.k <= self.n) or not (1 <= self.m <= self.n):
            raise ValueError(f"invalid geometry n={self.n}, m={self.m}, k={self.k}")

    @property
    def alpha(self) -> float:
        return self.m / self.n

    @property
    def beta_w(self) -> float:
        return self.k / self.n

    @classmethod
    def from_ratios(cls, n: int, alpha: float, beta_w: float) -> "ProblemGeometry":
        # rounding rule: k = round(beta n), m = round(alpha n), Python round (half to even)
        return cls(n=n, m=int(round(alpha * n)), k=int(round(beta_w * n)))
