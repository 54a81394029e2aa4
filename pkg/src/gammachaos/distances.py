"""Actual distances: exact total variation for two positive eigenvalues,
Monte Carlo Kolmogorov distance, and k-statistics."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats as _sp_stats

from . import chaos2
from .chaos2 import EigenvalueSpec
from .errors import DomainError
from .special_numerics import Tolerance, find_root, integrate_with_error, log_kummer_m
from .target_gamma import GammaTarget

__all__ = [
    "DistanceEstimate",
    "CumulantTable",
    "density_two_eig",
    "dtv_two_eig",
    "mc_kolmogorov",
    "kolmogorov_from_sample",
    "empirical_cumulants",
    "kstat_standard_errors",
    "sample_variance_se",
    "binned_tv_lower_bound",
]

TAIL_CUTOFF = 1e-16
_QUAD_TOL = Tolerance(abs_tol=1e-14, rel_tol=1e-12)


@dataclass(frozen=True)
class DistanceEstimate:
    value: float
    method: str
    error_bound: float | None = None
    std_error: float | None = None

    def __post_init__(self) -> None:
        if self.method not in ("quadrature", "monte_carlo"):
            raise DomainError(f"unknown method {self.method!r}")
        if (self.error_bound is None) == (self.std_error is None):
            raise DomainError("exactly one of error_bound and std_error must be set")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _check_pair(c1: float, c2: float) -> None:
    if not (c1 > 0 and c2 > 0):
        raise DomainError(f"both eigenvalues must be positive, got ({c1}, {c2})")


def density_two_eig(c1: float, c2: float, x: float) -> float:
    """Density of c1 (N1^2 - 1) + c2 (N2^2 - 1).

    With s = x + c1 + c2 and c_lo <= c_hi this is
    e^{-s/(2 c_lo)} M(1/2, 1, s (1/c_lo - 1/c_hi) / 2) / (2 sqrt(c1 c2)),
    evaluated in log space because M grows like e^z.
    """
    _check_pair(c1, c2)
    s = x + c1 + c2
    if s <= 0:
        return 0.0
    lo, hi = min(c1, c2), max(c1, c2)
    z = 0.5 * s * (1.0 / lo - 1.0 / hi)
    log_val = -math.log(2.0 * math.sqrt(c1 * c2)) - s / (2.0 * lo) + log_kummer_m(0.5, 1.0, z)
    return math.exp(log_val)


def _sign_changes(f: Callable[[float], float], a: float, b: float, n: int = 4000) -> list[float]:
    # geometric spacing near a, where both densities vary fastest
    grid = a + (b - a) * (np.expm1(np.linspace(0.0, math.log1p(1e4), n)) / 1e4)
    vals = [f(x) for x in grid]
    roots = []
    for x0, x1, f0, f1 in zip(grid, grid[1:], vals, vals[1:]):
        if f0 == 0.0 or f0 * f1 >= 0.0:
            continue
        roots.append(find_root(f, float(x0), float(x1), Tolerance(abs_tol=1e-15)))
    return roots


def dtv_two_eig(c1: float, c2: float) -> DistanceEstimate:
    """d_TV between c1 (N1^2 - 1) + c2 (N2^2 - 1) and G(2), by piecewise quadrature.

    The line is split at both support edges and at every sign change of the
    density difference, so each piece integrates a smooth function without
    absolute values. The truncated tail mass is added to ``error_bound``.
    """
    _check_pair(c1, c2)
    psi = GammaTarget(2.0).pdf
    edge_f, edge_g = -(c1 + c2), -2.0
    lo, mid = min(edge_f, edge_g), max(edge_f, edge_g)
    hi_c = max(c1, c2)
    env_scale = hi_c / math.sqrt(c1 * c2)

    def diff(x: float) -> float:
        return density_two_eig(c1, c2, x) - psi(x)

    # tail: psi(x) + (1 / (2 sqrt(c1 c2))) e^{-s/(2 c_hi)} bounds both densities
    def envelope(x: float) -> float:
        return psi(x) + math.exp(-(x - edge_f) / (2.0 * hi_c)) / (2.0 * math.sqrt(c1 * c2))

    upper = mid + 1.0
    while envelope(upper) >= TAIL_CUTOFF:
        upper = mid + 2.0 * (upper - mid)
    tail = math.exp(-(upper + 2.0) / 2.0) + env_scale * math.exp(-(upper - edge_f) / (2.0 * hi_c))

    total, err = 0.0, 0.0
    # only one density lives on [lo, mid]
    only = psi if edge_g < edge_f else (lambda x: density_two_eig(c1, c2, x))
    if mid > lo:
        v, e = integrate_with_error(only, lo, mid, _QUAD_TOL)
        total += abs(v)
        err += e
    cuts = [mid] + _sign_changes(diff, mid, upper) + [upper]
    for a, b in zip(cuts, cuts[1:]):
        v, e = integrate_with_error(diff, a, b, _QUAD_TOL)
        total += abs(v)
        err += e
    return DistanceEstimate(0.5 * total, "quadrature", error_bound=0.5 * (err + tail))


def kolmogorov_from_sample(sample: np.ndarray, nu: float) -> float:
    """sup_x |F_m(x) - G(x)| using both one-sided limits at each jump."""
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    g = GammaTarget(nu).cdf_array(x)
    i = np.arange(1, m + 1, dtype=float)
    return float(max(np.max(i / m - g), np.max(g - (i - 1.0) / m)))


def mc_kolmogorov(
    spec: EigenvalueSpec, nu: float, m: int, seed: int, workers: int | None = 1
) -> DistanceEstimate:
    if m < 1000:
        raise DomainError("mc_kolmogorov needs m >= 1000")
    f = chaos2.sample_joint(spec, 0, m, seed, workers).f
    return DistanceEstimate(kolmogorov_from_sample(f, nu), "monte_carlo", std_error=0.5 / math.sqrt(m))


@dataclass(frozen=True)
class CumulantTable:
    values: dict[int, float]
    size: int

    def __getitem__(self, p: int) -> float:
        return self.values[p]


def empirical_cumulants(samples: Sequence[float] | np.ndarray, p_max: int = 4) -> CumulantTable:
    """k-statistics k_1..k_{p_max} (unbiased cumulant estimators, p_max <= 4)."""
    x = np.asarray(samples, dtype=float)
    if not 1 <= p_max <= 4:
        raise DomainError("p_max must lie in 1..4")
    if x.size <= p_max:
        raise DomainError(f"need more than {p_max} samples, got {x.size}")
    centered = x - x.mean()
    vals = {1: float(x.mean())}
    for p in range(2, p_max + 1):
        vals[p] = float(_sp_stats.kstat(centered, p))
    return CumulantTable(vals, int(x.size))


def kstat_standard_errors(kappa: dict[int, float], m: int) -> dict[int, float]:
    """Large-m standard errors of k_2, k_3, k_4 from the true cumulants (orders up to 8)."""
    k = lambda p: kappa.get(p, 0.0)  # noqa: E731
    var2 = k(4) + 2 * k(2) ** 2
    var3 = k(6) + 9 * k(2) * k(4) + 9 * k(3) ** 2 + 6 * k(2) ** 3
    var4 = (
        k(8)
        + 16 * k(2) * k(6)
        + 48 * k(3) * k(5)
        + 34 * k(4) ** 2
        + 72 * k(2) ** 2 * k(4)
        + 144 * k(2) * k(3) ** 2
        + 24 * k(2) ** 4
    )
    return {2: math.sqrt(var2 / m), 3: math.sqrt(var3 / m), 4: math.sqrt(var4 / m)}


def sample_variance_se(kappa2: float, kappa4: float, m: int) -> float:
    return math.sqrt((kappa4 + 2.0 * kappa2 * kappa2) / m)


def binned_tv_lower_bound(
    sample: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray], edges: np.ndarray
) -> tuple[float, float]:
    """(1/2) sum_j |p_hat_j - q_j| over bins, with its standard error.

    Coarsening can only shrink total variation, so this estimates a lower
    bound on d_TV(law(sample), target).
    """
    x = np.asarray(sample, dtype=float)
    m = x.size
    edges = np.asarray(edges, dtype=float)
    # bin j covers [edges[j-1], edges[j]); the two outer bins are unbounded
    counts = np.bincount(np.searchsorted(edges, x, side="right"), minlength=edges.size + 1)
    p_hat = counts / m
    cdf_e = np.concatenate(([0.0], cdf(edges), [1.0]))
    q = np.diff(cdf_e)
    est = 0.5 * float(np.sum(np.abs(p_hat - q)))
    se = 0.5 * float(np.sum(np.sqrt(p_hat * (1.0 - p_hat) / m)))
    return est, se
