"""Seed-stream splitting for reproducible, chunk-parallel Monte Carlo.

A run with seed ``s`` draws its samples in fixed-size chunks; chunk ``k`` uses
the generator seeded by ``SeedSequence(s, spawn_key=(k,))``. The chunk layout
depends only on the sample count, so the worker count never changes results.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

CHUNK_SIZE = 1 << 16
THREADS_ENV = "CHAOS_GAMMA_THREADS"

__all__ = ["CHUNK_SIZE", "generator_for", "chunked", "worker_count"]


def generator_for(seed: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def worker_count(requested: int | None = None) -> int:
    if requested is None:
        requested = int(os.environ.get(THREADS_ENV, "0") or 0)
    if requested <= 0:
        return max(1, min(8, os.cpu_count() or 1))
    return requested


def chunked(
    m: int,
    seed: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
    workers: int | None = 1,
    chunk_size: int = CHUNK_SIZE,
) -> np.ndarray:
    """Concatenate ``draw(rng_k, size_k)`` over the chunks of an ``m``-sample run.

    ``draw`` must return an array whose first axis has length ``size_k``.
    """
    sizes = [chunk_size] * (m // chunk_size)
    if m % chunk_size:
        sizes.append(m % chunk_size)

    def job(k: int) -> np.ndarray:
        return draw(generator_for(seed, k), sizes[k])

    n_workers = worker_count(workers)
    if n_workers == 1 or len(sizes) == 1:
        parts = [job(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    return np.concatenate(parts, axis=0)
