"""Second-chaos elements F = sum_i c_i (N_i^2 - 1) stored by their eigenvalues."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .streams import chunked

__all__ = [
    "EigenvalueSpec",
    "ChaosSample",
    "JointSample",
    "canonicalize",
    "cumulant",
    "cumulant_excess",
    "kappa_gap",
    "power_sum",
    "sq_offsets",
    "variance",
    "omega_vartheta",
    "charfn_F",
    "sample_joint",
    "rescale_to_variance",
    "family",
    "family_nu",
    "FAMILIES",
    "ones",
]


def _canonical_key(c: float) -> tuple[float, int]:
    # larger |c| first; on ties the positive value wins
    return (-abs(c), 0 if c > 0 else 1)


@dataclass(frozen=True)
class EigenvalueSpec:
    """Canonically ordered nonzero eigenvalues.

    ``offsets`` optionally carries e_i = c_i^2 - 1 to full relative precision.
    Families whose eigenvalues are square roots near 1 set it, so that
    cumulant gaps of order 1/n^2 survive rounding of the c_i themselves.
    It does not take part in equality.
    """

    coeffs: tuple[float, ...]
    offsets: tuple[float, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        cs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        if not cs or any(c == 0.0 for c in cs):
            raise DomainError("a spec holds at least one coefficient and no zeros")
        if not all(math.isfinite(c) for c in cs):
            raise DomainError("coefficients must be finite")
        for a, b in zip(cs, cs[1:]):
            if _canonical_key(a) > _canonical_key(b):
                raise DomainError(f"coefficients are not in canonical order: {a} before {b}")
        if self.offsets is not None:
            es = tuple(float(e) for e in self.offsets)
            object.__setattr__(self, "offsets", es)
            if len(es) != len(cs):
                raise DomainError("offsets must match the coefficients one to one")
            for c, e in zip(cs, es):
                if abs((1.0 + e) - c * c) > 1e-12 * max(1.0, c * c):
                    raise DomainError(f"offset {e} is not c^2 - 1 for c = {c}")

    def __len__(self) -> int:
        return len(self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def to_json(self) -> list[float]:
        return list(self.coeffs)


def canonicalize(raw: Iterable[float], offsets: Iterable[float] | None = None) -> EigenvalueSpec:
    """Drop zeros and sort by decreasing |c|, positive first on ties."""
    vals = [float(c) for c in raw]
    es = None if offsets is None else [float(e) for e in offsets]
    if es is not None and len(es) != len(vals):
        raise DomainError("offsets must match the coefficients one to one")
    pairs = [(c, None if es is None else es[i]) for i, c in enumerate(vals) if c != 0.0]
    if not pairs:
        raise DomainError("all coefficients are zero; F = 0 is not a chaos element of interest")
    pairs.sort(key=lambda ce: _canonical_key(ce[0]))
    return EigenvalueSpec(
        tuple(c for c, _ in pairs), None if es is None else tuple(e for _, e in pairs)
    )


def power_sum(spec: EigenvalueSpec, p: int) -> float:
    return math.fsum(c**p for c in spec.coeffs)


def sq_offsets(spec: EigenvalueSpec) -> tuple[float, ...]:
    """c_i^2 - 1, stored when available, else (c - 1)(c + 1)."""
    if spec.offsets is not None:
        return spec.offsets
    return tuple((c - 1.0) * (c + 1.0) for c in spec.coeffs)


def cumulant_excess(spec: EigenvalueSpec, p: int) -> float:
    """kappa_p(F) - kappa_p(G(Var(F)/2)) = 2^(p-1) (p-1)! sum (c^p - c^2).

    Even p expands (1+e)^k - (1+e) in powers of e so that the first-order
    terms cancel inside one exact sum.
    """
    if p < 2:
        raise DomainError("cumulant order must be >= 2")
    terms: list[float] = []
    if p % 2 == 0:
        k = p // 2
        for e in sq_offsets(spec):
            terms.append((k - 1) * e)
            terms.extend(math.comb(k, j) * e**j for j in range(2, k + 1))
    else:
        for c, e in zip(spec.coeffs, sq_offsets(spec)):
            if c > 0:
                terms.append((1.0 + e) * math.expm1(0.5 * (p - 2) * math.log1p(e)))
            else:
                terms.append(c**p - c * c)
    return 2.0 ** (p - 1) * math.factorial(p - 1) * math.fsum(terms)


def kappa_gap(spec: EigenvalueSpec, p: int, nu: float) -> float:
    """Signed kappa_p(F) - kappa_p(G(nu)) = kappa_p(F) - 2^(p-1) (p-1)! nu."""
    # sum c^2 - nu = (len - nu) + sum e, exact when the offsets are
    var_gap = math.fsum([len(spec) - float(nu), *sq_offsets(spec)])
    return cumulant_excess(spec, p) + 2.0 ** (p - 1) * math.factorial(p - 1) * var_gap


def cumulant(spec: EigenvalueSpec, p: int) -> float:
    """kappa_p(F) = 2^(p-1) (p-1)! sum c_i^p."""
    if p < 2:
        raise DomainError("cumulant order must be >= 2 (kappa_1 = 0 by centering)")
    return 2.0 ** (p - 1) * math.factorial(p - 1) * power_sum(spec, p)


def mean(spec: EigenvalueSpec) -> float:
    return 0.0


def variance(spec: EigenvalueSpec) -> float:
    return cumulant(spec, 2)


def omega_vartheta(spec: EigenvalueSpec, nu_int: int) -> tuple[float, float]:
    """(max_{i<=nu} |1 - c_i|, sum_{i>nu} c_i^2), padding with zeros when short."""
    if nu_int < 1:
        raise DomainError("nu_int must be >= 1")
    cs = list(spec.coeffs) + [0.0] * max(0, nu_int - len(spec))
    omega = max(abs(1.0 - c) for c in cs[:nu_int])
    vartheta = math.fsum(c * c for c in cs[nu_int:])
    return omega, vartheta


def charfn_F(spec: EigenvalueSpec, t: float) -> complex:
    """prod_i exp(-i c t) (1 - 2 i c t)^(-1/2), principal branch per factor."""
    log_mod = 0.0
    phase = 0.0
    for c in spec.coeffs:
        ct = c * t
        log_mod -= 0.25 * math.log1p(4.0 * ct * ct)
        phase += -ct + 0.5 * math.atan(2.0 * ct)
    return cmath.rect(math.exp(log_mod), phase)


@dataclass(frozen=True)
class ChaosSample:
    f_value: float
    gamma_bars: tuple[float, ...]


@dataclass(frozen=True)
class JointSample:
    """Column storage for m draws: ``f`` has shape (m,), ``gamma_bars`` (m, R)."""

    f: np.ndarray
    gamma_bars: np.ndarray

    def __len__(self) -> int:
        return self.f.shape[0]

    def __getitem__(self, i: int) -> ChaosSample:
        return ChaosSample(float(self.f[i]), tuple(float(v) for v in self.gamma_bars[i]))

    def gamma_bar(self, r: int) -> np.ndarray:
        """Column r, with r = 0 meaning F itself."""
        if r == 0:
            return self.f
        return self.gamma_bars[:, r - 1]


def _groups(spec: EigenvalueSpec) -> tuple[np.ndarray, np.ndarray]:
    vals: list[float] = []
    counts: list[int] = []
    for c in spec.coeffs:
        if vals and vals[-1] == c:
            counts[-1] += 1
        else:
            vals.append(c)
            counts.append(1)
    return np.asarray(vals), np.asarray(counts, dtype=float)


def sample_joint(
    spec: EigenvalueSpec, R: int, m: int, seed: int, workers: int | None = 1
) -> JointSample:
    """Draw (F, Gbar_1, ..., Gbar_R) jointly with Gbar_r = sum 2^r c^(r+1) (N^2 - 1).

    Equal coefficients share one chi-square(k) variable: every coordinate depends
    on the Gaussians of such a block only through the sum of their squares, so
    this is the exact joint law and costs one draw per distinct coefficient.
    """
    if R < 0:
        raise DomainError("R must be >= 0")
    if m < 1:
        raise DomainError("sample size must be >= 1")
    vals, counts = _groups(spec)
    # weights[r, g] = 2^r c_g^(r+1); row 0 gives F
    weights = np.stack([2.0**r * vals ** (r + 1) for r in range(R + 1)])

    def draw(rng: np.random.Generator, k: int) -> np.ndarray:
        centered = rng.chisquare(counts, size=(k, counts.size)) - counts
        return centered @ weights.T

    out = chunked(m, seed, draw, workers)
    return JointSample(np.ascontiguousarray(out[:, 0]), np.ascontiguousarray(out[:, 1:]))


def rescale_to_variance(spec: EigenvalueSpec, nu: float) -> tuple[EigenvalueSpec, float]:
    """Scale so that Var(F) = 2 nu; returns the new spec and the factor used."""
    if not nu > 0:
        raise DomainError("nu must be positive")
    factor = math.sqrt(2.0 * nu / variance(spec))
    return canonicalize(c * factor for c in spec.coeffs), factor


# each builder returns (coefficients, offsets c^2 - 1)
Raw = tuple[list[float], list[float]]


def _toy(n: int, alpha: float | None, sign: float) -> Raw:
    a = 1.0 / n if alpha is None else float(alpha)
    if not 0.0 < a <= 1.0:
        raise DomainError("alpha must lie in (0, 1]")
    beta = math.sqrt(a * (2.0 - a))
    return [1.0 - a, sign * beta], [a * (a - 2.0), -((1.0 - a) ** 2)]


def _ustat(n: int) -> Raw:
    small = 1.0 / (n * (n - 1))
    cs = [math.sqrt((n - 1) / n)] + [-math.sqrt(small)] * (n - 1)
    return cs, [-1.0 / n] + [small - 1.0] * (n - 1)


def _from_offsets(es: list[float]) -> list[float]:
    return [math.sqrt(1.0 + e) for e in es]


def _concrete(n: int) -> Raw:
    es = [1.0 / n, -1.0 / n]
    return _from_offsets(es), es


def _delta(n: int, delta: float) -> Raw:
    if not 0.0 <= delta <= 1.0:
        raise DomainError("delta must lie in [0, 1]")
    eps = n ** -(1.0 + delta)
    es = [1.0 / n, -1.0 / n, -eps, eps / 2.0 - 1.0, eps / 2.0 - 1.0]
    return _from_offsets(es), es


FAMILIES = {"toy2": 1, "toy3": 1, "ustat": 1, "concrete": 2, "delta": 3}


def family_nu(name: str) -> int:
    """The target nu each family converges to."""
    try:
        return FAMILIES[name]
    except KeyError:
        raise DomainError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


def family(name: str, n: int, **params: float) -> EigenvalueSpec:
    """Coefficient vectors of the worked examples, canonicalized.

    toy2/toy3 accept ``alpha`` (default 1/n); delta requires ``delta``.
    """
    family_nu(name)
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    n = int(n)
    allowed = {"toy2": {"alpha"}, "toy3": {"alpha"}, "delta": {"delta"}}.get(name, set())
    extra = set(params) - allowed
    if extra:
        raise DomainError(f"family {name!r} does not take {sorted(extra)}")
    if name == "toy2":
        raw = _toy(n, params.get("alpha"), -1.0)
    elif name == "toy3":
        raw = _toy(n, params.get("alpha"), 1.0)
    elif name == "ustat":
        raw = _ustat(n)
    elif name == "concrete":
        raw = _concrete(n)
    else:
        if "delta" not in params:
            raise DomainError("the delta family needs a 'delta' parameter")
        raw = _delta(n, float(params["delta"]))
    return canonicalize(*raw)


def ones(nu: int) -> EigenvalueSpec:
    """The centered chi-square(nu) spec, c = (1, ..., 1)."""
    return EigenvalueSpec((1.0,) * int(nu))


def from_sequence(values: Sequence[float]) -> EigenvalueSpec:
    return canonicalize(values)
