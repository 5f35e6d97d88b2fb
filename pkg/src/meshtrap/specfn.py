"""Scalar special functions: erf, erfc, erfinv and the standard normal pdf/cdf."""

import math

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def erf(x: float) -> float:
    # odd by construction; libm erf is accurate to a few ulp
    return math.copysign(math.erf(abs(x)), x)


def erfc(x: float) -> float:
    return math.erfc(x)


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / SQRT2)


def _erfinv_guess(y: float) -> float:
    # Giles' single-precision rational approximation, y in [0, 1)
    w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        for c in (3.43273939e-07, -3.5233877e-06, -4.39150654e-06, 0.00021858087,
                  -0.00125372503, -0.00417768164, 0.246640727, 1.50140941):
            p = c + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        for c in (0.000100950558, 0.00134934322, -0.00367342844, 0.00573950773,
                  -0.0076224613, 0.00943887047, 1.00167406, 2.83297682):
            p = c + p * w
    return p * y


def erfinv(y: float) -> float:
    """Inverse of :func:`erf` on (-1, 1).

    A rational initial guess is polished with Newton steps. Close to 1 the
    residual is formed with erfc so that 1 - y keeps its relative accuracy.

    Raises DomainError for |y| >= 1; callers handle the boundary limits.
    """
    if math.isnan(y) or abs(y) >= 1.0:
        raise DomainError(f"erfinv argument must lie in (-1, 1), got {y!r}")
    a = abs(y)
    if a == 0.0:
        return math.copysign(0.0, y)
    x = _erfinv_guess(a)
    tail = a > 0.5
    q = 1.0 - a  # exact for a in [0.5, 1] (Sterbenz)
    for _ in range(12):
        if tail:
            r = q - math.erfc(x)  # = erf(x) - a
        else:
            r = math.erf(x) - a
        dx = r / (2.0 / SQRT_PI * math.exp(-x * x))
        # Halley correction; the second derivative of erf is -2x erf'(x)
        x -= dx / (1.0 + x * dx)
        if abs(dx) <= 1e-17 * max(1.0, x):
            break
    return math.copysign(x, y)
