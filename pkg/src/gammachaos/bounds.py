"""Computable distance bounds between F in the second chaos and G(nu).

The d2/d3 brackets carry an unspecified multiplicative constant; they are
reported with C = 1 and ``symbolic_C = True``. The d1 and Kolmogorov bounds
have fully explicit constants.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import asdict, dataclass, field

from scipy import optimize as _sp_optimize
from scipy import special as _sp_special

from . import chaos2, gamma_ops
from .chaos2 import EigenvalueSpec
from .errors import DomainError
from .special_numerics import Tolerance, find_root, integrate_with_error
from .target_gamma import GammaTarget

__all__ = [
    "BoundReport",
    "check_variance",
    "d1_bound",
    "sqrt_cumulant_bound",
    "d2_bracket",
    "d3_bracket",
    "cb_constant",
    "sinc2_integral",
    "char_diff_bound",
    "char_diff",
    "kolmogorov_bound",
    "kolmogorov_objective",
    "esseen_expression",
    "optimal_b",
]

B_MIN = 1.0 / (2.0 * math.pi)
VARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    name: str
    value: float
    constants_used: dict[str, float] = field(default_factory=dict)
    symbolic_C: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def check_variance(spec: EigenvalueSpec, nu: float) -> None:
    """Raise unless E[F^2] = 2 nu to 1e-9 (relative for large nu)."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    var = chaos2.variance(spec)
    if abs(var - 2.0 * nu) > VARIANCE_TOL * max(1.0, 2.0 * nu):
        raise DomainError(f"variance {var!r} of F does not equal 2*nu = {2.0 * nu!r}")


def d1_bound(spec: EigenvalueSpec, nu: float) -> BoundReport:
    """max(1, 2/nu) * sqrt(Delta_0)."""
    check_variance(spec, nu)
    pref = max(1.0, 2.0 / nu)
    d0 = gamma_ops.delta(spec, 0).value
    return BoundReport("d1", pref * math.sqrt(d0), {"prefactor": pref, "delta0": d0})


def sqrt_cumulant_bound(spec: EigenvalueSpec, nu: float) -> BoundReport:
    """(1/6)|kappa_4 - 48 nu - 12 kappa_3 + 96 nu| and the composed d1 bound."""
    check_variance(spec, nu)
    k3, k4 = chaos2.cumulant(spec, 3), chaos2.cumulant(spec, 4)
    value = abs(chaos2.kappa_gap(spec, 4, nu) - 12.0 * chaos2.kappa_gap(spec, 3, nu)) / 6.0
    pref = max(1.0, 2.0 / nu)
    return BoundReport(
        "sqrt_cumulant",
        value,
        {"prefactor": pref, "d1_composed": pref * math.sqrt(value), "kappa3": k3, "kappa4": k4},
    )


def _gaps(spec: EigenvalueSpec, nu: float) -> tuple[float, float]:
    return abs(chaos2.kappa_gap(spec, 3, nu)), abs(chaos2.kappa_gap(spec, 4, nu))


def d2_bracket(spec: EigenvalueSpec, nu: float) -> BoundReport:
    """Delta_0 + sqrt(Delta_1 Delta_0) + sqrt(Delta_2) + cumulant gaps, with C = 1."""
    check_variance(spec, nu)
    d0, d1, d2 = (gamma_ops.delta(spec, r).value for r in range(3))
    g3, g4 = _gaps(spec, nu)
    value = math.fsum([d0, math.sqrt(d1) * math.sqrt(d0), math.sqrt(d2), g3, g4])
    consts = {"C": 1.0, "delta0": d0, "delta1": d1, "delta2": d2, "kappa3_gap": g3, "kappa4_gap": g4}
    return BoundReport("d2_bracket", value, consts, symbolic_C=True)


def d3_bracket(spec: EigenvalueSpec, nu: float) -> BoundReport:
    """sqrt(Delta_2) + cumulant gaps, with C = 1."""
    check_variance(spec, nu)
    d2 = gamma_ops.delta(spec, 2).value
    g3, g4 = _gaps(spec, nu)
    value = math.fsum([math.sqrt(d2), g3, g4])
    consts = {"C": 1.0, "delta2": d2, "kappa3_gap": g3, "kappa4_gap": g4}
    return BoundReport("d3_bracket", value, consts, symbolic_C=True)


def sinc2_integral(x: float) -> float:
    """int_0^x sin^2(u)/u^2 du = Si(2x) - sin^2(x)/x."""
    if x <= 0:
        return 0.0
    si, _ = _sp_special.sici(2.0 * x)
    return float(si) - math.sin(x) ** 2 / x


@functools.lru_cache(maxsize=256)
def cb_constant(b: float) -> float:
    """Root c of int_0^{c/4} sin^2 u / u^2 du = pi/4 + 1/(8b)."""
    if not b > B_MIN:
        raise DomainError(f"b must exceed 1/(2 pi) = {B_MIN:.6f}, got {b}")
    rhs = math.pi / 4.0 + 1.0 / (8.0 * b)

    def g(c: float) -> float:
        return sinc2_integral(c / 4.0) - rhs

    hi = 4.0
    while g(hi) < 0:
        hi *= 2.0
        if hi > 1e15:
            raise DomainError(f"b = {b} is too close to 1/(2 pi) for a representable root")
    return find_root(g, 0.0, hi, Tolerance(abs_tol=1e-15 * hi))


def char_diff(spec: EigenvalueSpec, nu: float, t: float) -> float:
    """|phi_F(t) - phi_G(nu)(t)|."""
    return abs(chaos2.charfn_F(spec, t) - GammaTarget(nu).charfn(t))


def char_diff_bound(spec: EigenvalueSpec, nu: float, t: float) -> float:
    """(1/2) |t| sqrt(Delta_0)."""
    check_variance(spec, nu)
    return 0.5 * abs(t) * math.sqrt(gamma_ops.delta(spec, 0).value)


def _kolmogorov_parts(nu: float, b: float) -> dict[str, float]:
    hold = GammaTarget(nu).holder()
    c = cb_constant(b)
    a = hold.exponent
    return {
        "b": b,
        "c_b": c,
        "K": hold.constant_K,
        "holder_exponent": a,
        "c1": b,
        # b T int_{|y| <= c/T} K |y|^a dy = 2 b K c^(1+a) / (1+a) * T^(-a)
        "c2": 2.0 * b * hold.constant_K * c ** (1.0 + a) / (1.0 + a),
        "K_paper_asserted": float(hold.paper_asserted),
    }


def kolmogorov_objective(spec: EigenvalueSpec, nu: float, T: float, b: float = 1.0) -> float:
    """c1 T sqrt(Delta_0) + c2 T^(-a): the Esseen bound before minimizing over T."""
    p = _kolmogorov_parts(nu, b)
    x = math.sqrt(gamma_ops.delta(spec, 0).value)
    return p["c1"] * T * x + p["c2"] * T ** (-p["holder_exponent"])


def kolmogorov_bound(spec: EigenvalueSpec, nu: float, b: float | None = None) -> BoundReport:
    """Minimum over T of the Esseen bound, in closed form.

    nu >= 2 gives 2 sqrt(c1 c2) Delta_0^(1/4); nu < 2 gives a bound of order
    Delta_0^(nu / (2 (nu + 2))).
    """
    check_variance(spec, nu)
    b = 1.0 if b is None else float(b)
    p = _kolmogorov_parts(nu, b)
    d0 = gamma_ops.delta(spec, 0).value
    a = p["holder_exponent"]
    exponent = a / (2.0 * (1.0 + a))
    consts = dict(p, exponent=exponent)
    if d0 == 0.0:
        return BoundReport("kolmogorov", 0.0, dict(consts, T_min=math.inf))
    x = math.sqrt(d0)
    c1, c2 = p["c1"], p["c2"]
    if a == 1.0:
        t_min = math.sqrt(c2 / c1) * d0**-0.25
        value = 2.0 * math.sqrt(c1 * c2) * d0**0.25
    else:
        t_min = (a * c2 / (c1 * x)) ** (1.0 / (1.0 + a))
        value = c1 * x * t_min + c2 * t_min ** (-a)
    consts["T_min"] = t_min
    return BoundReport("kolmogorov", value, consts)


def optimal_b(spec: EigenvalueSpec, nu: float, b_max: float = 10.0) -> BoundReport:
    """Kolmogorov bound with b also minimized over (1/(2 pi), b_max]."""
    check_variance(spec, nu)
    lo = B_MIN * (1.0 + 1e-6)
    res = _sp_optimize.minimize_scalar(
        lambda b: kolmogorov_bound(spec, nu, b).value, bounds=(lo, b_max), method="bounded"
    )
    return kolmogorov_bound(spec, nu, float(res.x))


def esseen_expression(
    spec: EigenvalueSpec,
    nu: float,
    T: float | None = None,
    b: float = 1.0,
    actual: bool = True,
) -> float:
    """b int_{-T}^{T} |D(t)/t| dt + c2 T^(-a) at a given T (default: T_min).

    With ``actual`` the true characteristic-function difference D is
    integrated; otherwise D is replaced by its bound (|t|/2) sqrt(Delta_0).
    """
    check_variance(spec, nu)
    p = _kolmogorov_parts(nu, b)
    if T is None:
        T = kolmogorov_bound(spec, nu, b).constants_used["T_min"]
    if not (T > 0 and math.isfinite(T)):
        raise DomainError("T must be positive and finite")
    if actual:
        target = GammaTarget(nu)

        def f(t: float) -> float:
            if t == 0.0:
                return 0.0
            return abs(chaos2.charfn_F(spec, t) - target.charfn(t)) / t

        # |D(t)/t| is even in t
        first, _ = integrate_with_error(f, 0.0, T, Tolerance(abs_tol=1e-10, rel_tol=1e-8))
        first *= 2.0 * b
    else:
        first = b * T * math.sqrt(gamma_ops.delta(spec, 0).value)
    return first + p["c2"] * T ** (-p["holder_exponent"])
