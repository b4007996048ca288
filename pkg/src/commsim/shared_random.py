"""Shared coins for simulated parties.

Every shared Gaussian ``g[r, k]`` is a pure function of ``(seed, stream, k, r)``:
coordinate ``k`` owns a Philox stream keyed by ``(seed, stream, k)`` and row
``r`` is its ``r``-th draw. Parties therefore agree on the random directions
without exchanging anything, and a party may draw only the coordinates its
own vector touches.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
CHUNK_ROWS = 1 << 16


def _key(*parts: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(p) & MASK64 for p in parts])


def coordinate_generator(seed: int, stream: int, coord: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(_key(seed, stream, coord)))


def iter_gaussian_rows(seed: int, stream: int, columns, reps: int, chunk: int = CHUNK_ROWS):
    """Yield ``(start, block)`` with ``block[r, c] = g[start + r, columns[c]]``."""
    gens = [coordinate_generator(seed, stream, c) for c in columns]
    start = 0
    while start < reps:
        n = min(chunk, reps - start)
        block = np.empty((n, len(gens)))
        for c, gen in enumerate(gens):
            block[:, c] = gen.standard_normal(n)
        yield start, block
        start += n


def gaussian_matrix(seed: int, stream: int, columns, reps: int) -> np.ndarray:
    """Dense ``reps x len(columns)`` block of shared Gaussians (small sizes only)."""
    out = np.empty((reps, len(columns)))
    for start, block in iter_gaussian_rows(seed, stream, columns, reps):
        out[start:start + block.shape[0]] = block
    return out


def derive_stream(*parts: int) -> int:
    """Fold labels (e.g. an outcome index) into one 63-bit stream id."""
    return int(_key(*parts).generate_state(1, np.uint64)[0]) >> 1


def uniform(seed: int, stream: int) -> float:
    """One shared uniform draw in ``[0, 1)``."""
    return float(coordinate_generator(seed, stream, MASK64).random())
