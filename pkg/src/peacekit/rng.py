"""Seed handling.

Two kinds of randomness are used. Most procedures take a
:class:`numpy.random.Generator` built from an integer seed. The nibble and the
star simulation instead draw from a counter-based stream: every uniform is a
pure function of ``(key, iteration, vertex, slot)``, so results do not depend
on the order in which vertices are visited.
"""
from __future__ import annotations

import numba
import numpy as np

_MASK = (1 << 64) - 1


def split_seed(seed: int, index: int) -> int:
    """Derive an independent 63-bit seed for sub-task ``index``."""
    state = np.random.SeedSequence([int(seed) & _MASK, int(index)]).generate_state(2, np.uint64)
    return int((int(state[0]) << 1 ^ int(state[1])) & ((1 << 63) - 1))


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@numba.njit(cache=True, inline="always")
def _mix(z):
    # splitmix64 finaliser
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def hash_uniform(key, iteration, vertex, slot):
    """Uniform double in [0, 1) determined by the four integer coordinates."""
    z = np.uint64(key)
    z = _mix(z + np.uint64(0x9E3779B97F4A7C15) * np.uint64(iteration + 1))
    z = _mix(z + np.uint64(0xD1B54A32D192ED03) * np.uint64(vertex + 1))
    z = _mix(z + np.uint64(0x8CB92BA72F3D8DD7) * np.uint64(slot + 1))
    return np.float64(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)
