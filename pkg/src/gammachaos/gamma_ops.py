"""Gamma-operator algebra on the second chaos.

On F = sum c_i (N_i^2 - 1) the centered Gamma operators are diagonal with
eigenvalues 2^r c_i^(r+1), so every variance below is an explicit eigenvalue
sum. The cumulant combinations are kept only as oracles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

from . import chaos2
from .chaos2 import EigenvalueSpec
from .errors import DomainError
from .special_numerics import Tolerance, find_root

__all__ = [
    "Degenerate",
    "DEGENERATE",
    "DeltaValue",
    "PhiProfile",
    "Psi2Value",
    "GammaVerdict",
    "MixedGamma",
    "TraceSign",
    "delta",
    "delta_via_cumulants",
    "var_gamma",
    "cov_32_21",
    "cov_32_21_via_cumulants",
    "phi",
    "phi_b_term",
    "phi_profile",
    "psi2",
    "psi_general",
    "discrepancy_M",
    "is_centered_gamma",
    "trace_sign",
    "trace_class_bound_check",
    "ratio_condition",
    "cumulant_gap",
    "mixed_gamma_detect",
    "cov_zero_counterexample",
]


@dataclass(frozen=True)
class Degenerate:
    """Marks a 0/0 ratio: the input is already the Gamma law."""

    reason: str = "all Gamma-defect terms vanish"

    def __bool__(self) -> bool:
        return False


DEGENERATE = Degenerate()


@dataclass(frozen=True)
class DeltaValue:
    r: int
    value: float


def _check_r(r: int, lo: int = 0) -> None:
    if int(r) != r or r < lo:
        raise DomainError(f"order r must be an integer >= {lo}, got {r}")


def delta(spec: EigenvalueSpec, r: int) -> DeltaValue:
    """Delta_r = Var(Gamma_{r+1} - 2 Gamma_r) = 2^(2r+3) sum c^(2r+2) (c-1)^2."""
    _check_r(r)
    s = math.fsum(c ** (2 * r + 2) * (c - 1.0) ** 2 for c in spec.coeffs)
    return DeltaValue(r, 2.0 ** (2 * r + 3) * s)


def delta_via_cumulants(spec: EigenvalueSpec, r: int) -> float:
    _check_r(r)
    k = lambda p: chaos2.cumulant(spec, p)  # noqa: E731
    f = math.factorial
    return math.fsum(
        [
            k(2 * r + 4) / f(2 * r + 3),
            -4.0 * k(2 * r + 3) / f(2 * r + 2),
            4.0 * k(2 * r + 2) / f(2 * r + 1),
        ]
    )


def var_gamma(spec: EigenvalueSpec, r: int) -> float:
    """Var(Gamma_r(F)) = 2 * 4^r sum c^(2r+2); r = 0 gives Var(F)."""
    _check_r(r)
    return 2.0 * 4.0**r * chaos2.power_sum(spec, 2 * r + 2)


def cov_32_21(spec: EigenvalueSpec) -> float:
    """E[(Gbar_3 - 2 Gbar_2)(Gbar_2 - 2 Gbar_1)] = 64 sum c^5 (c-1)^2."""
    return 64.0 * math.fsum(c**5 * (c - 1.0) ** 2 for c in spec.coeffs)


def cov_32_21_via_cumulants(spec: EigenvalueSpec) -> float:
    k = lambda p: chaos2.cumulant(spec, p)  # noqa: E731
    f = math.factorial
    return math.fsum([k(7) / f(6), -4.0 * k(6) / f(5), 4.0 * k(5) / f(4)])


def phi(spec: EigenvalueSpec, beta: float) -> float:
    """Var((Gbar_3 - 2 Gbar_2) - 2 beta^2 (Gbar_2 - 2 Gbar_1))."""
    b2 = beta * beta
    return 2.0 * math.fsum((8.0 * (c**4 - c**3) - 8.0 * b2 * (c**3 - c**2)) ** 2 for c in spec.coeffs)


def phi_b_term(spec: EigenvalueSpec) -> float:
    """B = sum_{i != j} (4c_i^2 - 4c_i)^2 (4c_j^2 - 4c_j)^2."""
    w = [(4.0 * c * c - 4.0 * c) ** 2 for c in spec.coeffs]
    total = math.fsum(w)
    # (sum w)^2 - sum w^2, both in compensated form
    return math.fsum([total * total, -math.fsum(x * x for x in w)])


@dataclass(frozen=True)
class PhiProfile:
    var_x: float
    var_y: float
    cov_xy: float
    beta_min: float
    beta0: float
    degenerate: bool = False
    negative_covariance: bool = False

    def phi(self, beta: float) -> float:
        b2 = beta * beta
        return self.var_x - 4.0 * b2 * self.cov_xy + 4.0 * b2 * b2 * self.var_y


def phi_profile(spec: EigenvalueSpec) -> PhiProfile:
    var_x = delta(spec, 2).value
    var_y = delta(spec, 1).value
    cov = cov_32_21(spec)
    if var_y == 0.0:
        return PhiProfile(var_x, var_y, cov, 0.0, 0.0, degenerate=True)
    if cov < 0:
        return PhiProfile(var_x, var_y, cov, 0.0, 0.0, negative_covariance=True)
    beta_min = math.sqrt(cov / (2.0 * var_y))
    return PhiProfile(var_x, var_y, cov, beta_min, math.sqrt(2.0) * beta_min)


@dataclass(frozen=True)
class Psi2Value:
    value: float
    gram_det: float


def psi2(spec: EigenvalueSpec, beta1: float, beta2: float) -> Psi2Value:
    """Var(beta1 (Gbar_3 - 2 Gbar_2) - 2 beta2 (Gbar_2 - 2 Gbar_1))."""
    var_x = delta(spec, 2).value
    var_y = delta(spec, 1).value
    cov = cov_32_21(spec)
    value = beta1 * beta1 * var_x - 4.0 * beta1 * beta2 * cov + 4.0 * beta2 * beta2 * var_y
    return Psi2Value(max(value, 0.0), var_x * var_y - cov * cov)


def psi_general(spec: EigenvalueSpec, orders: Sequence[int], betas: Sequence[float]) -> float:
    """2 sum_i (c_i - 1)^2 (sum_r beta_r 2^r c_i^r)^2."""
    orders, betas = list(orders), list(betas)
    if len(orders) != len(betas) or not orders:
        raise DomainError("orders and betas must be non-empty and of equal length")
    if len(set(orders)) != len(orders):
        raise DomainError("orders must be distinct")
    for r in orders:
        _check_r(r, 1)
    terms = []
    for c in spec.coeffs:
        inner = math.fsum(b * 2.0**r * c**r for r, b in zip(orders, betas))
        terms.append((c - 1.0) ** 2 * inner * inner)
    return 2.0 * math.fsum(terms)


def discrepancy_M(spec: EigenvalueSpec, nu: float) -> float:
    """max(|kappa_3(F) - 8 nu|, |kappa_4(F) - 48 nu|)."""
    if not nu > 0:
        raise DomainError("nu must be positive")
    return max(abs(chaos2.kappa_gap(spec, 3, nu)), abs(chaos2.kappa_gap(spec, 4, nu)))


@dataclass(frozen=True)
class GammaVerdict:
    is_gamma: bool
    reason: str
    witness: tuple[float, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.is_gamma


def is_centered_gamma(spec: EigenvalueSpec, nu: float, tol: float = 1e-10) -> GammaVerdict:
    """Decide F ~ G(nu) from the single variance Delta_1 (any one order suffices)."""
    var = chaos2.variance(spec)
    if abs(var - 2.0 * nu) > tol * max(1.0, 2.0 * nu):
        return GammaVerdict(False, f"variance {var!r} differs from 2*nu = {2.0 * nu!r}", spec.coeffs)
    d1 = delta(spec, 1).value
    if d1 <= tol * var * var:
        return GammaVerdict(True, "Delta_1 vanishes")
    offending = tuple(c for c in spec.coeffs if c != 1.0)
    return GammaVerdict(False, f"Delta_1 = {d1!r} > 0", offending)


class TraceSign(str, enum.Enum):
    NONNEG = "nonneg"
    NONPOS = "nonpos"
    NEITHER = "neither"


def trace_sign(spec: EigenvalueSpec) -> TraceSign:
    """Sign of A^4 - A^3 for the diagonal operator, nonneg checked first."""
    if all(not (0.0 < c < 1.0) for c in spec.coeffs):
        return TraceSign.NONNEG
    if all(0.0 <= c <= 1.0 for c in spec.coeffs):
        return TraceSign.NONPOS
    return TraceSign.NEITHER


def trace_class_bound_check(spec: EigenvalueSpec) -> tuple[float, float, bool]:
    """(Delta_2, 72 (kappa_4 - 6 kappa_3)^2, Delta_2 <= rhs)."""
    lhs = delta(spec, 2).value
    # kappa_4 - 6 kappa_3 = 48 sum c^3 (c - 1), summed without cancellation
    gap = 48.0 * math.fsum(c**3 * (c - 1.0) for c in spec.coeffs)
    rhs = 72.0 * gap * gap
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-12)


def ratio_condition(spec: EigenvalueSpec) -> float | Degenerate:
    """sum c (c^3 - c^2)^2 / sum (c^3 - c^2)^2."""
    w = [(c**3 - c**2) ** 2 for c in spec.coeffs]
    den = math.fsum(w)
    if den == 0.0:
        return DEGENERATE
    return math.fsum(c * x for c, x in zip(spec.coeffs, w)) / den


def cumulant_gap(spec: EigenvalueSpec, r: int) -> float:
    """|E Gamma_{r+1} - 2 E Gamma_r| = |kappa_{r+2}/(r+1)! - 2 kappa_{r+1}/r!|."""
    _check_r(r, 1)
    # both means are 2^r sum c^(r+1)-type sums; factor out to avoid factorials
    s = math.fsum(c ** (r + 1) * (c - 1.0) for c in spec.coeffs)
    return abs(2.0 ** (r + 1) * s)


@dataclass(frozen=True)
class MixedGamma:
    k: float
    l1: int
    l2: int


def mixed_gamma_detect(spec: EigenvalueSpec, tol: float = 1e-10) -> MixedGamma | None:
    """Match the coefficients to {k/2 x l1} + {1 x l2}.

    With l1 = 0 the value of k is immaterial and reported as 2.
    """
    ones = [c for c in spec.coeffs if abs(c - 1.0) <= tol]
    rest = [c for c in spec.coeffs if abs(c - 1.0) > tol]
    if rest:
        v = rest[0]
        if any(abs(c - v) > tol * max(1.0, abs(v)) for c in rest):
            return None
        k = 2.0 * math.fsum(rest) / len(rest)
    else:
        k = 2.0
    out = MixedGamma(k, len(rest), len(ones))
    half_var = chaos2.variance(spec) / 2.0
    if abs(out.l1 * k * k / 4.0 + out.l2 - half_var) > tol * max(1.0, half_var) * len(spec):
        return None
    return out


def cov_zero_counterexample(tol: float = 1e-14) -> EigenvalueSpec:
    """Refined root of x^2 + y^2 = 2, x^5 (x-1)^2 + y^5 (y-1)^2 = 0 near (1.27, -0.62).

    There Delta_1 > 0 but the covariance of the two Gamma differences vanishes.
    """

    def g(x: float) -> float:
        y = -math.sqrt(2.0 - x * x)
        return x**5 * (x - 1.0) ** 2 + y**5 * (y - 1.0) ** 2

    x = find_root(g, 1.2, 1.35, Tolerance(abs_tol=tol))
    return chaos2.canonicalize([x, -math.sqrt(2.0 - x * x)])
