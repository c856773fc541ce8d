"""Counter-based random streams.

Every random draw in the package is a pure function of (stream key, counter),
built from the SplitMix64 output function. Streams never share state, so the
draws consumed by one stream are unaffected by how much any other stream has
consumed. The layout optimizer relies on this: the negative samples applied to
the original projections are indexed by (epoch, edge, slot) and are therefore
bit-identical whether or not ghost projections are being optimized alongside.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# Stream identifiers under one master seed.
INIT_TAG = 1
ORIGINAL_TAG = 2
GHOST_TAG = 3

_U_GOLDEN = np.uint64(_GOLDEN)
_U_MIX_A = np.uint64(_MIX_A)
_U_MIX_B = np.uint64(_MIX_B)
_INV_2_53 = float(2.0**-53)


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * _MIX_A) & _MASK64
    x ^= x >> 27
    x = (x * _MIX_B) & _MASK64
    x ^= x >> 31
    return x


def derive_key(master_seed: int, *path: int) -> int:
    """Derive an independent stream key from a master seed and an id path."""
    h = mix64((master_seed & _MASK64) + _GOLDEN)
    for part in path:
        h = mix64(h ^ mix64((part & _MASK64) + _GOLDEN))
    return h


def _mix64_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= _U_MIX_A
    x ^= x >> np.uint64(27)
    x *= _U_MIX_B
    x ^= x >> np.uint64(31)
    return x


def u64_at(key: int, counters: np.ndarray | int):
    """The raw 64-bit output(s) of a stream at the given counter position(s)."""
    if np.isscalar(counters):
        return mix64(key + (int(counters) + 1) * _GOLDEN)
    counters = np.asarray(counters, dtype=np.uint64)
    state = np.uint64(key) + (counters + np.uint64(1)) * _U_GOLDEN
    return _mix64_array(state)


def uniform_at(key: int, counters: np.ndarray | int):
    """Uniform [0, 1) double(s) at the given counter position(s)."""
    raw = u64_at(key, counters)
    if np.isscalar(counters):
        return (raw >> 11) * _INV_2_53
    return (raw >> np.uint64(11)).astype(np.float64) * _INV_2_53


class CounterStream:
    """A sequentially consumed view onto one keyed counter stream.

    Scalar and vector draws consume identical counter ranges, so a loop of
    ``uniform()`` calls and one ``uniform(n)`` call produce the same values.
    """

    def __init__(self, key: int, counter: int = 0):
        self.key = key & _MASK64
        self.counter = counter

    def uniform(self, n: int | None = None):
        if n is None:
            value = uniform_at(self.key, self.counter)
            self.counter += 1
            return value
        counters = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        return uniform_at(self.key, counters)

    def integers(self, bound: int, n: int | None = None):
        """Uniform integer(s) in [0, bound). Modulo bias is negligible for
        bounds far below 2**64."""
        raw = u64_at(self.key, self.counter if n is None else
                     np.arange(self.counter, self.counter + (n or 0), dtype=np.uint64))
        self.counter += 1 if n is None else n
        if n is None:
            return raw % bound
        return (raw % np.uint64(bound)).astype(np.int64)


def ghost_stream_keys(master_seed: int, n_points: int, n_ghosts: int) -> np.ndarray:
    """(n_points, n_ghosts) array of keys, one independent stream per ghost.

    Matches ``derive_key(master_seed, GHOST_TAG, i * n_ghosts + k)``.
    """
    base = derive_key(master_seed, GHOST_TAG)
    ids = np.arange(n_points * n_ghosts, dtype=np.uint64)
    keys = _mix64_array(np.uint64(base) ^ _mix64_array(ids + _U_GOLDEN))
    return keys.reshape(n_points, n_ghosts)


class RngStreams:
    """All random streams used by one run, derived from one master seed.

    ``init`` drives embedding initialization and ghost placement; the
    original-projection and per-ghost negative-sampling streams are keyed
    here and consumed statelessly inside the optimizer kernels.
    """

    def __init__(self, master_seed: int, n_points: int, n_ghosts: int):
        self.master_seed = master_seed & _MASK64
        self.init = CounterStream(derive_key(master_seed, INIT_TAG))
        self.original_key = derive_key(master_seed, ORIGINAL_TAG)
        self.ghost_keys = ghost_stream_keys(master_seed, n_points, n_ghosts)
