"""Contraction constants c_q(r_1, ..., r_s) of the iterated Gamma operators.

Two recursions are implemented: the one used for Gamma_j here and the one of
the classical (alternative) operators. They share the base case and differ
only in the leading factor of each step, which coincide exactly when q = 2.
Values are exact Python integers.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from itertools import product

from . import chaos2
from .chaos2 import EigenvalueSpec
from .errors import DomainError

__all__ = [
    "IndexTuple",
    "Coefficient",
    "is_admissible",
    "c_new",
    "c_alt",
    "enumerate_admissible",
    "verify_equality",
    "verify_q2_equality",
    "gamma3_identity_check",
    "MAX_Q",
    "MAX_S",
]

MAX_Q = 5
MAX_S = 6


@dataclass(frozen=True)
class IndexTuple:
    q: int
    rs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rs", tuple(int(r) for r in self.rs))
        if self.q < 1:
            raise DomainError("q must be >= 1")
        if not self.rs or any(r < 1 for r in self.rs):
            raise DomainError("rs must be a non-empty tuple of positive integers")

    @property
    def s(self) -> int:
        return len(self.rs)


@dataclass(frozen=True)
class Coefficient:
    value: int
    excluded: bool = False

    def __float__(self) -> float:
        return float(self.value)


def is_admissible(t: IndexTuple) -> bool:
    """Every range bound and every indicator of the appendix sums holds."""
    q, rs = t.q, t.rs
    prefix = 0
    for k, r in enumerate(rs, start=1):
        if r > min(k * q - 2 * prefix, q):
            return False
        prefix += r
        # 1_{r_1 + ... + r_k < (k+1) q / 2} for k <= s - 1
        if k < len(rs) and not 2 * prefix < (k + 1) * q:
            return False
    return True


@functools.lru_cache(maxsize=None)
def _recursive(q: int, rs: tuple[int, ...], alt: bool) -> int:
    if len(rs) == 1:
        r = rs[0]
        return q * math.factorial(r - 1) * math.comb(q - 1, r - 1) ** 2
    s, r = len(rs), rs[-1]
    top = s * q - 2 * sum(rs[:-1])
    lead = q if alt else top
    step = lead * math.factorial(r - 1) * math.comb(top - 1, r - 1) * math.comb(q - 1, r - 1)
    return step * _recursive(q, rs[:-1], alt)


def c_new(t: IndexTuple) -> Coefficient:
    if not is_admissible(t):
        return Coefficient(0, excluded=True)
    return Coefficient(_recursive(t.q, t.rs, False))


def c_alt(t: IndexTuple) -> Coefficient:
    if not is_admissible(t):
        return Coefficient(0, excluded=True)
    return Coefficient(_recursive(t.q, t.rs, True))


def enumerate_admissible(q: int, s: int) -> list[IndexTuple]:
    """All admissible tuples of length s, in lexicographic order."""
    if q < 1 or s < 1:
        raise DomainError("q and s must be >= 1")
    if q > MAX_Q or s > MAX_S:
        raise DomainError(f"enumeration is capped at q <= {MAX_Q}, s <= {MAX_S}")
    out = []
    for rs in product(range(1, q + 1), repeat=s):
        t = IndexTuple(q, rs)
        if is_admissible(t):
            out.append(t)
    return out


def verify_equality(q: int, s_max: int) -> tuple[bool, IndexTuple | None]:
    """Compare both recursions on every admissible tuple; return the first mismatch."""
    if s_max < 1:
        raise DomainError("s_max must be >= 1")
    for s in range(1, s_max + 1):
        for t in enumerate_admissible(q, s):
            if c_new(t).value != c_alt(t).value:
                return False, t
    return True, None


def verify_q2_equality(s_max: int) -> bool:
    return verify_equality(2, s_max)[0]


def gamma3_identity_check(spec: EigenvalueSpec) -> tuple[float, float, bool]:
    """E[Gamma_3] = kappa_4 / 3! against kappa_4 / 3 - Var(Gamma_1), Var(Gamma_1) = 8 sum c^4."""
    k4 = chaos2.cumulant(spec, 4)
    lhs = k4 / 6.0
    rhs = k4 / 3.0 - 8.0 * chaos2.power_sum(spec, 4)
    return lhs, rhs, abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
