from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from gammachaos import chaos2

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def fuzz_specs(count: int, seed: int, max_len: int = 12, max_abs: float = 3.0) -> list[chaos2.EigenvalueSpec]:
    """Random specs with lengths 1..max_len and |c| <= max_abs."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = int(rng.integers(1, max_len + 1))
        c = rng.uniform(-max_abs, max_abs, size=k)
        c = c[np.abs(c) > 1e-3]
        if c.size:
            out.append(chaos2.canonicalize(c))
    return out


coeff = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
specs = st.lists(coeff, min_size=1, max_size=8).map(chaos2.canonicalize)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
