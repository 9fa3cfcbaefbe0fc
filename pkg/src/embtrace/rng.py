"""Counter-based random numbers for scheduling-independent parallel sampling.

Every draw is a pure function of (seed, operation tag, point index, counter),
so data-parallel loops produce identical results for any worker count. The
mixer is the splitmix64 finalizer; streams are keyed, never stateful.

All helpers are numba-jitted and also callable from plain Python.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64

# operation tags; distinct streams per use site
TAG_KNN_INIT = 1
TAG_KNN_JOIN = 2
TAG_TRIPLETS = 3
TAG_ANCHORS = 4

_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def stream_key(seed, tag, index):
    """Key for the stream belonging to (seed, tag, point index)."""
    k = _mix64(U64(seed) + _GAMMA * U64(tag + 1))
    return _mix64(k + _GAMMA * U64(index + 1))


@njit(cache=True, inline="always")
def rand_u64(key, counter):
    """counter-th draw of the keyed stream."""
    return _mix64(key + U64(counter + 1) * _GAMMA)


@njit(cache=True, inline="always")
def rand_below(key, counter, bound):
    """Uniform integer in [0, bound). Modulo bias is ~bound/2^64, negligible."""
    # explicit signed result: jitted int() keeps uint64, and uint64 mixed
    # with signed arithmetic would promote to float64
    return np.int64(rand_u64(key, counter) % U64(bound))


def permutation(seed: int, tag: int, n: int) -> np.ndarray:
    """Deterministic permutation of range(n) via keyed Fisher-Yates."""
    # jitted callees box uint64 returns as Python ints; re-wrap so the next
    # call dispatches as uint64 instead of overflowing int64
    key = U64(stream_key(seed, tag, 0))
    out = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = rand_below(key, i, i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def sample_indices(seed: int, tag: int, n: int, m: int) -> np.ndarray:
    """m distinct indices from range(n), sorted ascending."""
    if m > n:
        raise ValueError(f"cannot sample {m} distinct indices from {n}")
    return np.sort(permutation(seed, tag, n)[:m])
