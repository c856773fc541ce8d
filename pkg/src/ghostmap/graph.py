"""Weighted kNN graph construction (the fuzzy simplicial set).

The graph is built in four steps: exact k-nearest neighbors, per-point
smoothed locality parameters (rho_i, sigma_i), directed membership weights,
and a probabilistic-union symmetrization into an undirected edge list. All
steps are pure functions of the data, so the graph can be built once and
shared across optimizer runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .errors import ConfigError

# Bisection settings for solving the smoothed-locality equation.
SMOOTH_TARGET_TOL = 1e-5
SMOOTH_MAX_ITER = 64
SIGMA_LO = 1e-8
SIGMA_HI = 1e4


@dataclass
class KnnIndex:
    """Exact Euclidean k-nearest neighbors, one sorted row per point."""

    k: int
    neighbor_ids: np.ndarray    # (n, k) int64, self excluded
    neighbor_dists: np.ndarray  # (n, k) float64, ascending per row


@dataclass
class SmoothedLocality:
    """Local connectivity parameters rho_i (nearest distance) and sigma_i."""

    rho: np.ndarray    # (n,)
    sigma: np.ndarray  # (n,), positive
    n_nonconverged: int = 0


@dataclass
class FuzzyGraph:
    """Symmetrized weighted edge list; each unordered pair stored once."""

    n_points: int
    heads: np.ndarray    # (E,) int64, heads[e] < tails[e]
    tails: np.ndarray    # (E,) int64
    weights: np.ndarray  # (E,) float64 in (0, 1]
    max_weight: float

    @property
    def n_edges(self) -> int:
        return self.heads.shape[0]


def exact_knn(data: DataMatrix, k: int) -> KnnIndex:
    """Brute-force exact kNN under Euclidean distance.

    Ties are broken toward the lower point index; a point is never its own
    neighbor. Quadratic in n, which is fine at the scales this package
    targets and keeps the graph an exact function of the data.
    """
    n = data.n_points
    if k >= n:
        raise ConfigError("n_neighbors", f"k={k} must be smaller than n_points={n}")
    x = data.values
    ids = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        d2 = ((x - x[i]) ** 2).sum(axis=1)
        d2[i] = np.inf  # exclude self even when duplicates exist
        # stable sort keeps equal distances in index order
        order = np.argsort(d2, kind="stable")[:k]
        ids[i] = order
        dists[i] = np.sqrt(d2[order])
    return KnnIndex(k=k, neighbor_ids=ids, neighbor_dists=dists)


def smooth_locality(knn: KnnIndex) -> SmoothedLocality:
    """Solve for sigma_i such that the smoothed neighbor weights sum to log2(k).

    rho_i is the distance to the nearest neighbor. sigma_i is found by
    bisection on sum_j exp(-max(0, d_ij - rho_i) / sigma) = log2(k); rows
    that never reach the tolerance keep the final bracket midpoint.
    """
    dists = knn.neighbor_dists
    n = dists.shape[0]
    rho = dists[:, 0].copy()
    shifted = np.maximum(dists - rho[:, None], 0.0)
    target = np.log2(knn.k)

    lo = np.full(n, SIGMA_LO)
    hi = np.full(n, SIGMA_HI)
    sigma = np.empty(n)
    done = np.zeros(n, dtype=bool)
    for _ in range(SMOOTH_MAX_ITER):
        mid = 0.5 * (lo + hi)
        total = np.exp(-shifted / mid[:, None]).sum(axis=1)
        hit = ~done & (np.abs(total - target) < SMOOTH_TARGET_TOL)
        sigma[hit] = mid[hit]
        done |= hit
        # sum increases with sigma: overshoot means shrink from above
        high = total > target
        hi = np.where(~done & high, mid, hi)
        lo = np.where(~done & ~high, mid, lo)
    mid = 0.5 * (lo + hi)
    sigma[~done] = mid[~done]
    return SmoothedLocality(rho=rho, sigma=sigma, n_nonconverged=int((~done).sum()))


def directed_weights(knn: KnnIndex, loc: SmoothedLocality) -> np.ndarray:
    """Membership strength of each directed edge i -> neighbor.

    w = exp(-max(0, d - rho_i) / sigma_i), so any neighbor at distance at
    most rho_i gets weight exactly 1.
    """
    shifted = np.maximum(knn.neighbor_dists - loc.rho[:, None], 0.0)
    return np.exp(-shifted / loc.sigma[:, None])


def tconorm(a, b):
    """Probabilistic union of two directed weights: a + b - a*b."""
    return a + b - a * b


def symmetrize(knn: KnnIndex, directed: np.ndarray) -> FuzzyGraph:
    """Combine directed weights into an undirected graph.

    A missing reverse direction contributes 0, so one-sided edges keep
    their directed weight. Edges are sorted by (head, tail) with
    head < tail, giving the optimizer a deterministic iteration order.
    """
    n = knn.neighbor_ids.shape[0]
    rows = np.repeat(np.arange(n, dtype=np.int64), knn.k)
    cols = knn.neighbor_ids.ravel()
    vals = directed.ravel()

    # canonical unordered keys; accumulate both directions per pair
    heads = np.minimum(rows, cols)
    tails = np.maximum(rows, cols)
    key = heads * n + tails
    order = np.argsort(key, kind="stable")
    key = key[order]
    vals = vals[order]
    is_forward = (rows <= cols)[order]

    unique_key = np.unique(key)
    fwd = np.zeros(unique_key.shape[0])
    rev = np.zeros(unique_key.shape[0])
    group = np.searchsorted(unique_key, key)
    np.maximum.at(fwd, group[is_forward], vals[is_forward])
    np.maximum.at(rev, group[~is_forward], vals[~is_forward])

    weights = tconorm(fwd, rev)
    keep = weights > 0.0
    return FuzzyGraph(
        n_points=n,
        heads=(unique_key[keep] // n).astype(np.int64),
        tails=(unique_key[keep] % n).astype(np.int64),
        weights=weights[keep],
        max_weight=float(weights[keep].max()),
    )


def build_fuzzy_graph(data: DataMatrix, k: int) -> tuple[KnnIndex, FuzzyGraph]:
    """Full graph-construction pipeline; returns the kNN index alongside."""
    knn = exact_knn(data, k)
    loc = smooth_locality(knn)
    graph = symmetrize(knn, directed_weights(knn, loc))
    return knn, graph
