"""Benchmark datasets: synthetic blob families and a small digits set."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .data import DataMatrix
from .errors import DatasetError, GhostmapError


def gaussian_blobs(n_points: int, *, n_dims: int = 16, n_clusters: int = 8,
                   cluster_std: float = 1.0, center_spread: float = 5.0,
                   seed: int = 0) -> DataMatrix:
    """Isotropic gaussian clusters with labels.

    Cluster centers are drawn from N(0, center_spread^2) per coordinate;
    overlap is controlled by the ratio of cluster_std to center_spread.
    Points are assigned to clusters round-robin so sizes differ by at most
    one, then shuffled.
    """
    if n_clusters < 1 or n_points < n_clusters:
        raise DatasetError(f"cannot place {n_points} points in "
                           f"{n_clusters} clusters")
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, center_spread, size=(n_clusters, n_dims))
    labels = np.arange(n_points) % n_clusters
    rng.shuffle(labels)
    values = centers[labels] + rng.normal(0.0, cluster_std,
                                          size=(n_points, n_dims))
    names = [f"blob {c}" for c in range(n_clusters)]
    return DataMatrix(values, labels=labels.astype(np.int64), label_names=names)


def heavy_tailed_blobs(n_points: int, *, n_dims: int = 16,
                       n_clusters: int = 30, cluster_scale: float = 0.95,
                       center_spread: float = 2.0,
                       seed: int = 0) -> DataMatrix:
    """Clusters whose member offsets have student-t tails (3 dof).

    The fat tails strand a few members of every cluster in the space
    between foreign clusters. Such a point's nearest neighbors split
    across two anchor groups, and its projection can legitimately settle
    near either one, so some of its ghosts end up far from the original.
    Gaussian tails are too thin for this: the clusters either merge or
    every point stays firmly owned by one of them.
    """
    if n_clusters < 1 or n_points < n_clusters:
        raise DatasetError(f"cannot place {n_points} points in "
                           f"{n_clusters} clusters")
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, center_spread, size=(n_clusters, n_dims))
    labels = np.arange(n_points) % n_clusters
    rng.shuffle(labels)
    offsets = rng.standard_t(3, size=(n_points, n_dims)) * cluster_scale
    names = [f"blob {c}" for c in range(n_clusters)]
    return DataMatrix(centers[labels] + offsets,
                      labels=labels.astype(np.int64), label_names=names)


def overlapping_blobs(n_points: int, seed: int = 0) -> DataMatrix:
    """Clusters with interlopers: a small share of points between them.

    This is the accuracy-benchmark preset. A fraction of a percent of
    points come out genuinely unstable at the default radius and
    threshold, the rest are ordinary cluster members.
    """
    return heavy_tailed_blobs(n_points, n_dims=16, n_clusters=30,
                              cluster_scale=0.95, center_spread=2.0, seed=seed)


def separated_blobs(n_points: int, seed: int = 0) -> DataMatrix:
    """Well-separated tight blobs; nearly every point embeds stably."""
    return gaussian_blobs(n_points, n_dims=16, n_clusters=12,
                          cluster_std=0.3, center_spread=16.0, seed=seed)


def digits() -> DataMatrix:
    """The 8x8 handwritten digit set (1797 x 64) from scikit-learn."""
    try:
        from sklearn.datasets import load_digits
    except ImportError as err:
        raise DatasetError(f"digits dataset needs scikit-learn: {err}") from err
    bunch = load_digits()
    return DataMatrix(np.asarray(bunch.data, dtype=np.float64),
                      labels=np.asarray(bunch.target, dtype=np.int64),
                      label_names=[str(c) for c in range(10)])


def dataset_from_table(table: dict, base_dir: Path) -> tuple[str, DataMatrix]:
    """Materialize one [[datasets]] entry from a benchmark suite file."""
    kind = table.get("kind")
    name = table.get("name", kind)
    try:
        if kind == "blobs":
            keys = ("n_dims", "n_clusters", "cluster_std", "center_spread",
                    "seed")
            kwargs = {k: table[k] for k in keys if k in table}
            return name, gaussian_blobs(int(table["n_points"]), **kwargs)
        if kind == "digits":
            return name, digits()
        if kind == "csv":
            from .io import load_csv
            return name, load_csv(base_dir / table["path"],
                                  label_column=table.get("label_column"))
        if kind == "gum2":
            from .io import load_f32_matrix
            return name, load_f32_matrix(base_dir / table["path"])
    except DatasetError:
        raise
    except (GhostmapError, OSError, KeyError, TypeError, ValueError) as err:
        raise DatasetError(f"dataset {name!r} failed to load: {err}") from err
    raise DatasetError(f"unknown dataset kind {kind!r}")
