"""Numba kernels for the per-epoch layout updates.

All randomness inside the kernels is counter-based: the negative sample in
slot s of edge e at epoch n is drawn at counter (n * n_edges + e) * n_neg + s
of the owning stream. Consumption is therefore positional, never shared, and
identical across reduction modes, which is what makes the original-projection
trajectory bit-reproducible with and without ghosts.

The sequential kernels define the deterministic mode; the prange variants
update the shared position arrays without locks (lost updates are acceptable
for this algorithm family) and are only used when threads > 1.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_ONE = np.uint64(1)

REPULSION_EPS = 0.001


@njit(inline="always")
def _mix64(x):
    x ^= x >> _S30
    x *= _MIX_A
    x ^= x >> _S27
    x *= _MIX_B
    x ^= x >> _S31
    return x


@njit(inline="always")
def _draw_index(key, counter, bound):
    # counter-based draw in [0, bound)
    raw = _mix64(key + (np.uint64(counter) + _ONE) * _GOLDEN)
    return np.int64(raw % np.uint64(bound))


@njit(inline="always")
def _clip(v):
    if v > 4.0:
        return 4.0
    if v < -4.0:
        return -4.0
    return v


@njit(inline="always")
def _attract(p, q, a, b, alpha, symmetric):
    # pull p toward q along the attractive gradient; optionally push q back
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    d2 = dx * dx + dy * dy
    if d2 <= 0.0:
        return
    coeff = (-2.0 * a * b) * d2 ** (b - 1.0) / (1.0 + a * d2**b)
    gx = _clip(coeff * dx)
    gy = _clip(coeff * dy)
    p[0] += alpha * gx
    p[1] += alpha * gy
    if symmetric:
        q[0] -= alpha * gx
        q[1] -= alpha * gy


@njit(inline="always")
def _repel(p, q, a, b, alpha):
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    d2 = dx * dx + dy * dy
    if d2 <= 0.0:
        return
    coeff = 2.0 * b / ((REPULSION_EPS + d2) * (1.0 + a * d2**b))
    p[0] += alpha * _clip(coeff * dx)
    p[1] += alpha * _clip(coeff * dy)


@njit(cache=True)
def epoch_original(pos, heads, tails, eps, next_fire, fired, epoch, alpha,
                   a, b, n_neg, neg_key, n_points):
    """One epoch over the original projections (deterministic order)."""
    n_edges = heads.shape[0]
    gate = np.float64(epoch + 1)
    for e in range(n_edges):
        if next_fire[e] <= gate:
            fired[e] = 1
            next_fire[e] += eps[e]
            i = heads[e]
            j = tails[e]
            _attract(pos[i], pos[j], a, b, alpha, True)
            base = (np.int64(epoch) * n_edges + e) * n_neg
            for s in range(n_neg):
                t = _draw_index(neg_key, base + s, n_points)
                if t == i or t == j:
                    continue
                _repel(pos[i], pos[t], a, b, alpha)
        else:
            fired[e] = 0


@njit(cache=True, parallel=True)
def epoch_original_parallel(pos, heads, tails, eps, next_fire, fired, epoch,
                            alpha, a, b, n_neg, neg_key, n_points):
    """Lock-free variant; concurrent position writes may lose updates."""
    n_edges = heads.shape[0]
    gate = np.float64(epoch + 1)
    for e in prange(n_edges):
        if next_fire[e] <= gate:
            fired[e] = 1
            next_fire[e] += eps[e]
            i = heads[e]
            j = tails[e]
            _attract(pos[i], pos[j], a, b, alpha, True)
            base = (np.int64(epoch) * n_edges + e) * n_neg
            for s in range(n_neg):
                t = _draw_index(neg_key, base + s, n_points)
                if t == i or t == j:
                    continue
                _repel(pos[i], pos[t], a, b, alpha)
        else:
            fired[e] = 0


@njit(cache=True)
def epoch_ghosts(gpos, pos, heads, tails, fired, alive, inc_indptr, inc_edge,
                 inc_is_head, epoch, alpha, a, b, n_neg, ghost_keys, n_points):
    """One epoch over the ghost projections.

    Each ghost replays the edges that fired for its target this epoch:
    attraction toward the (read-only) original endpoint, plus its own
    negative samples when the target is the head of the edge. Originals
    are never written here.
    """
    n = alive.shape[0]
    n_ghosts = gpos.shape[1]
    n_edges = heads.shape[0]
    for p in range(n):
        if not alive[p]:
            continue
        for idx in range(inc_indptr[p], inc_indptr[p + 1]):
            e = inc_edge[idx]
            if fired[e] == 0:
                continue
            i = heads[e]
            j = tails[e]
            other = j if inc_is_head[idx] else i
            base = (np.int64(epoch) * n_edges + e) * n_neg
            for k in range(n_ghosts):
                _attract(gpos[p, k], pos[other], a, b, alpha, False)
                if inc_is_head[idx]:
                    key = ghost_keys[p, k]
                    for s in range(n_neg):
                        t = _draw_index(key, base + s, n_points)
                        if t == i or t == j:
                            continue
                        _repel(gpos[p, k], pos[t], a, b, alpha)


@njit(cache=True, parallel=True)
def epoch_ghosts_parallel(gpos, pos, heads, tails, fired, alive, inc_indptr,
                          inc_edge, inc_is_head, epoch, alpha, a, b, n_neg,
                          ghost_keys, n_points):
    """Race-free parallel variant: each point owns its ghost rows."""
    n = alive.shape[0]
    n_ghosts = gpos.shape[1]
    n_edges = heads.shape[0]
    for p in prange(n):
        if not alive[p]:
            continue
        for idx in range(inc_indptr[p], inc_indptr[p + 1]):
            e = inc_edge[idx]
            if fired[e] == 0:
                continue
            i = heads[e]
            j = tails[e]
            other = j if inc_is_head[idx] else i
            base = (np.int64(epoch) * n_edges + e) * n_neg
            for k in range(n_ghosts):
                _attract(gpos[p, k], pos[other], a, b, alpha, False)
                if inc_is_head[idx]:
                    key = ghost_keys[p, k]
                    for s in range(n_neg):
                        t = _draw_index(key, base + s, n_points)
                        if t == i or t == j:
                            continue
                        _repel(gpos[p, k], pos[t], a, b, alpha)
