"""Special functions, quadrature, root finding and log-log rate fits.

Everything here is a pure function of its arguments. Quadrature and
bracketing root finding are thin contracts over :mod:`scipy`; the Kummer
function is summed directly because the two-eigenvalue density needs tight
control of its large-argument behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _sp_integrate
from scipy import optimize as _sp_optimize
from scipy import special as _sp_special

from .errors import DomainError, NumericError

__all__ = [
    "Tolerance",
    "LogLogFit",
    "DEFAULT_TOL",
    "kummer_m",
    "log_kummer_m",
    "reg_lower_gamma",
    "integrate",
    "integrate_with_error",
    "find_root",
    "fit_loglog",
]

# Kummer arguments beyond this overflow double precision through e^z.
KUMMER_Z_MAX = 700.0
_ASYMPTOTIC_Z = 600.0
# quad allocates workspace proportional to its subdivision limit.
_QUAD_LIMIT_CAP = 5000


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 1_000_000

    def __post_init__(self) -> None:
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class LogLogFit:
    """Least-squares line through ``(log n, log y)``."""

    slope: float
    intercept: float
    r_squared: float

    def predict(self, n: float) -> float:
        return math.exp(self.intercept) * n**self.slope


def _is_nonpositive_integer(b: float) -> bool:
    return b <= 0 and float(b).is_integer()


def _kummer_series(a: float, b: float, z: float, max_iter: int) -> float:
    """Direct power series, stopped once the geometric tail bound is negligible."""
    terms = [1.0]
    term = 1.0
    for k in range(max_iter):
        ratio = (a + k) / (b + k) * z / (k + 1)
        term *= ratio
        terms.append(term)
        if term == 0.0:
            return math.fsum(terms)
        # past the peak the terms decay at least geometrically with |ratio|
        if k + 1 > abs(z):
            r = abs((a + k + 1) / (b + k + 1) * z / (k + 2))
            if r < 1.0:
                total = math.fsum(terms)
                if abs(term) * r / (1.0 - r) <= 1e-17 * abs(total):
                    return total
    raise NumericError(
        f"Kummer series for ({a}, {b}, {z}) did not converge in {max_iter} terms",
        estimate=math.fsum(terms),
        error=abs(term),
    )


def kummer_m(a: float, b: float, z: float, max_iter: int = DEFAULT_TOL.max_iter) -> float:
    """Confluent hypergeometric function M(a, b, z) = 1F1(a; b; z).

    For negative ``z`` with ``b >= a`` the Kummer transform
    ``M(a,b,z) = e^z M(b-a,b,-z)`` turns the alternating series into one with
    positive terms.
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"b = {b} is a pole of M(a, b, z)")
    if abs(z) >= KUMMER_Z_MAX:
        raise DomainError(f"|z| = {abs(z)} overflows double precision (limit {KUMMER_Z_MAX})")
    if z == 0.0:
        return 1.0
    if z < 0 and b - a >= 0:
        return math.exp(z) * _kummer_series(b - a, b, -z, max_iter)
    return _kummer_series(a, b, z, max_iter)


def log_kummer_m(a: float, b: float, z: float) -> float:
    """log M(a, b, z) for ``z >= 0`` and ``b > a > 0``, valid for arbitrarily large z."""
    if z < 0:
        raise DomainError("log_kummer_m is only provided for z >= 0")
    if not b > a > 0:
        raise DomainError("log_kummer_m requires b > a > 0")
    if z < _ASYMPTOTIC_Z:
        return math.log(kummer_m(a, b, z))
    # large-z expansion: Gamma(b)/Gamma(a) e^z z^(a-b) sum_s (b-a)_s (1-a)_s / s! z^-s
    total, term = 1.0, 1.0
    for s in range(60):
        term *= (b - a + s) * (1 - a + s) / ((s + 1) * z)
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return math.lgamma(b) - math.lgamma(a) + z + (a - b) * math.log(z) + math.log(total)


def reg_lower_gamma(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x)."""
    if not s > 0:
        raise DomainError("shape s must be positive")
    if x < 0:
        raise DomainError("x must be non-negative")
    if math.isinf(x):
        return 1.0
    return float(_sp_special.gammainc(s, x))


def integrate_with_error(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
    points: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature returning ``(value, error_estimate)``.

    An infinite upper limit is mapped onto [0, 1) by ``x = a + t/(1-t)``.
    ``points`` marks interior break points (finite intervals only).
    """
    if math.isinf(a):
        raise DomainError("lower limit must be finite")
    if b < a:
        value, err = integrate_with_error(f, b, a, tol, points)
        return -value, err
    limit = min(tol.max_iter, _QUAD_LIMIT_CAP)
    if math.isinf(b):

        def g(t: float) -> float:
            u = 1.0 - t
            return f(a + t / u) / (u * u)

        value, err, info, *rest = _sp_integrate.quad(
            g, 0.0, 1.0, epsabs=tol.abs_tol, epsrel=tol.rel_tol, limit=limit, full_output=1
        )
    else:
        value, err, info, *rest = _sp_integrate.quad(
            f,
            a,
            b,
            epsabs=tol.abs_tol,
            epsrel=tol.rel_tol,
            limit=limit,
            points=points,
            full_output=1,
        )
    ier = rest[0] if rest else 0
    if ier not in (0,) and err > max(tol.abs_tol, tol.rel_tol * abs(value)):
        raise NumericError(
            f"quadrature on [{a}, {b}] stopped with error estimate {err:.3e}",
            estimate=value,
            error=err,
        )
    return float(value), float(err)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    return integrate_with_error(f, a, b, tol)[0]


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Bracketing root finder (Brent's method, bisection safeguarded)."""
    lo, hi = min(lo, hi), max(lo, hi)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise DomainError(f"no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")
    return float(
        _sp_optimize.brentq(
            f, lo, hi, xtol=tol.abs_tol, rtol=4 * np.finfo(float).eps, maxiter=min(tol.max_iter, 10_000)
        )
    )


def fit_loglog(points: Sequence[tuple[float, float]]) -> LogLogFit:
    """Fit ``log y = intercept + slope * log n`` by least squares."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise DomainError("need at least two (n, y) pairs")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise DomainError("all coordinates must be positive and finite")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - float(np.sum(resid**2)) / ss_tot))
    return LogLogFit(float(slope), float(intercept), r2)
