"""Post-hoc stability classification and per-point pattern labels.

Classification at a threshold d is a pure function of the stored distances,
so the threshold can be adjusted after optimization without re-running
anything. The P1..P4 pattern labels are a heuristic reading of how a point's
ghosts arrange themselves; they are labels for a human to inspect, not a
calibrated statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ghosts import GhostResult, StabilityDistances

PATTERN_COMPACT = "P1"          # everything converges to one region
PATTERN_SPLIT = "P2"            # ghosts split into a few distinct groups
PATTERN_SCATTERED = "P3"        # no grouping at all
PATTERN_ORIGINAL_APART = "P4"   # ghosts agree, original landed elsewhere
PATTERN_DROPPED = "dropped"


@dataclass(frozen=True)
class StabilityReport:
    """Distances plus the context needed to interpret them."""

    r: float
    distances: StabilityDistances
    dropped: np.ndarray
    default_d: float = 0.1

    @property
    def n_points(self) -> int:
        return self.distances.d.shape[0]


def report_from_result(result: GhostResult,
                       default_d: float = 0.1) -> StabilityReport:
    return StabilityReport(r=result.config.radius, distances=result.distances,
                           dropped=result.dropped.copy(), default_d=default_d)


def classify(report: StabilityReport, d: float) -> tuple[np.ndarray, np.ndarray]:
    """Partition point ids into (stable, unstable) at threshold d.

    A point is stable iff d_i <= d. Dropped points are always stable:
    their ghosts were retired because they had settled.
    """
    unstable_mask = (report.distances.d > d) & ~report.dropped
    ids = np.arange(report.n_points)
    return ids[~unstable_mask], ids[unstable_mask]


def instability_summary(report: StabilityReport,
                        thresholds) -> list[tuple[float, float]]:
    """(threshold, unstable fraction) rows; non-increasing in the threshold."""
    n = report.n_points
    rows = []
    for d in thresholds:
        _, unstable = classify(report, float(d))
        rows.append((float(d), unstable.size / n))
    return rows


def _single_linkage_count(points: np.ndarray, d: float) -> tuple[int, int]:
    """Cluster count under single linkage with strict merge distance < d.

    Returns (number of clusters, size of the cluster containing row 0).
    Plain union-find; the point sets here are tiny (M + 1 rows).
    """
    n = points.shape[0]
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    d2 = d * d
    for i in range(n):
        for j in range(i + 1, n):
            diff = points[i] - points[j]
            if float(diff @ diff) < d2:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    roots = {find(i) for i in range(n)}
    first = find(0)
    first_size = sum(1 for i in range(n) if find(i) == first)
    return len(roots), first_size


def classify_pattern(y_i: np.ndarray, ghosts_i: np.ndarray, d: float) -> str:
    """Heuristic P1..P4 label for one point from its ghost arrangement.

    Single-linkage clusters of {original} + ghosts at merge threshold d:
    one cluster is compact convergence (P1); exactly two clusters with the
    original alone means the ghosts agree and the original is the outlier
    (P4); at least half the points in singleton-ish fragments is scatter
    (P3); anything else is a split (P2).
    """
    m = ghosts_i.shape[0]
    cloud = np.vstack([np.asarray(y_i, dtype=np.float64).reshape(1, 2),
                       np.asarray(ghosts_i, dtype=np.float64)])
    n_clusters, original_cluster_size = _single_linkage_count(cloud, d)
    if n_clusters == 1:
        return PATTERN_COMPACT
    if n_clusters == 2 and original_cluster_size == 1:
        return PATTERN_ORIGINAL_APART
    if n_clusters >= math.ceil((m + 1) / 2):
        return PATTERN_SCATTERED
    return PATTERN_SPLIT


def assign_patterns(result: GhostResult, d: float) -> list[str]:
    """Pattern label per point; dropped points are labeled as such.

    Uses normalized coordinates so d means the same thing as in
    classification.
    """
    scale = result.transform.scale
    labels = []
    for i in range(result.positions.shape[0]):
        if result.dropped[i]:
            labels.append(PATTERN_DROPPED)
            continue
        labels.append(classify_pattern(result.positions[i] * scale,
                                       result.ghosts.positions[i] * scale, d))
    return labels
