"""Normalization of 2-D embeddings into the unit square.

The perturbation radius and the per-point instability distances are defined
in [0, 1] x [0, 1] coordinates, while the optimizer works at whatever scale
the embedding happens to occupy. One isotropic scale (the reciprocal of the
longest bounding-box side) keeps the two coordinate systems related by a
single multiplicative factor, so distances can be converted without being
distorted per axis. The transform is always fit to the original projections
only; ghosts are mapped through the same transform but never influence it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput


@dataclass(frozen=True)
class NormalizationTransform:
    """Maps embedding coordinates into [0, 1]^2 via (p - origin) * scale."""

    origin: np.ndarray  # (2,)
    scale: float

    def apply(self, points: np.ndarray) -> np.ndarray:
        return (points - self.origin) * self.scale


def normalization_for(positions: np.ndarray) -> NormalizationTransform:
    """Fit the unit-square transform to a set of 2-D positions.

    The origin is the component-wise minimum; the scale is 1 over the larger
    bounding-box side (1 if the box is degenerate), shared by both axes.
    """
    positions = np.asarray(positions, dtype=np.float64)
    if positions.size == 0 or not np.all(np.isfinite(positions)):
        raise DegenerateInput("positions must be non-empty and finite")
    lo = positions.min(axis=0)
    extent = positions.max(axis=0) - lo
    side = float(extent.max())
    scale = 1.0 / side if side > 0.0 else 1.0
    return NormalizationTransform(origin=lo, scale=scale)
