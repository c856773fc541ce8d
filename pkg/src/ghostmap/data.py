"""High-dimensional input container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput


@dataclass
class DataMatrix:
    """Row-major (n_points, n_dims) input with optional integer labels."""

    values: np.ndarray
    labels: np.ndarray | None = None
    label_names: list[str] | None = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {self.values.shape}")
        n, d = self.values.shape
        if n < 2:
            raise ValueError(f"need at least 2 points, got {n}")
        if d < 1:
            raise ValueError("need at least 1 dimension")
        if not np.all(np.isfinite(self.values)):
            raise DegenerateInput("values contain NaN or Inf")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (n,):
                raise ValueError(
                    f"labels length {self.labels.shape} does not match {n} points")
            if self.label_names is not None:
                if self.labels.size and (
                        self.labels.min() < 0
                        or self.labels.max() >= len(self.label_names)):
                    raise ValueError("labels index outside label_names")

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def n_dims(self) -> int:
        return self.values.shape[1]
