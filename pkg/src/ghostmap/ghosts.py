"""Ghost projections: generation, joint optimization, and reduction.

Each point gets M ghost copies of its projection. Ghosts feel the same
attractive edges and their own negative samples but never push back on the
original layout, so the original trajectory is bit-identical with or without
them. The spread of a point's ghosts around it measures how reproducible its
final position is; reduction schemes (adaptive dropping, schedule halving)
retire ghosts of points that settle early.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import _kernels
from .config import Hyperparameters, ResolvedConfig, validate_config
from .data import DataMatrix
from .graph import FuzzyGraph, KnnIndex, build_fuzzy_graph
from .layout import (CurveParams, _set_threads, fit_curve_params,
                     initialize_embedding, make_state,
                     optimize_epoch_original, EmbeddingState)
from .normalize import NormalizationTransform, normalization_for
from .rng import CounterStream, RngStreams


@dataclass
class GhostState:
    """Ghost projections and their bookkeeping.

    positions has shape (n_points, n_ghosts, 2) in embedding units.
    initial_offsets holds each ghost's distance from its target at
    generation time, in normalized units. D is the EMA-smoothed
    instability distance, frozen once a point is dropped.
    """

    positions: np.ndarray
    alive: np.ndarray
    D: np.ndarray
    initial_offsets: np.ndarray
    generated_at_epoch: int
    has_measurement: bool = False

    @property
    def n_points(self) -> int:
        return self.positions.shape[0]

    @property
    def n_ghosts(self) -> int:
        return self.positions.shape[1]

    @property
    def n_alive(self) -> int:
        return int(self.alive.sum())


@dataclass(frozen=True)
class StabilityDistances:
    """Per-point instability distances d_i in normalized coordinates."""

    d: np.ndarray
    sensitivity_used: float


class EdgeIncidence(NamedTuple):
    """CSR view of the edge list grouped by incident point."""

    indptr: np.ndarray   # (n_points + 1,)
    edge_ids: np.ndarray  # (2 * n_edges,)
    is_head: np.ndarray   # (2 * n_edges,) uint8


def build_incidence(graph: FuzzyGraph) -> EdgeIncidence:
    """Group edges by endpoint so ghosts can replay their target's edges."""
    e = graph.n_edges
    points = np.concatenate([graph.heads, graph.tails])
    edge_ids = np.concatenate([np.arange(e, dtype=np.int64)] * 2)
    is_head = np.concatenate([np.ones(e, dtype=np.uint8),
                              np.zeros(e, dtype=np.uint8)])
    order = np.argsort(points, kind="stable")
    counts = np.bincount(points, minlength=graph.n_points)
    indptr = np.zeros(graph.n_points + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return EdgeIncidence(indptr, edge_ids[order], is_head[order])


def sample_circle(center: np.ndarray, r_embed: float,
                  stream: CounterStream) -> np.ndarray:
    """One point uniform over the closed disk of radius r_embed.

    Draws angle then radius (two stream values), with the sqrt shaping
    that makes the density uniform in area rather than in radius.
    """
    theta = 2.0 * math.pi * float(stream.uniform())
    rho = r_embed * math.sqrt(float(stream.uniform()))
    return np.asarray(center, dtype=np.float64) + \
        rho * np.array([math.cos(theta), math.sin(theta)])


def _sample_disk_batch(count: int, r_embed: float,
                       stream: CounterStream) -> np.ndarray:
    """(count, 2) disk offsets consuming the same draws as a sample_circle loop."""
    flat = np.asarray(stream.uniform(2 * count))
    theta = 2.0 * math.pi * flat[0::2]
    rho = r_embed * np.sqrt(flat[1::2])
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def generate_ghosts(positions: np.ndarray, epoch: int, cfg: ResolvedConfig,
                    stream: CounterStream) -> GhostState:
    """Place M ghosts per point inside the radius-r disk around it.

    r is defined in normalized units; it is converted to embedding units
    with the transform fitted to the current original positions. Ghost
    order is point-major, so the batch consumes the init stream exactly
    as a nested loop of sample_circle calls would.
    """
    n = positions.shape[0]
    m = cfg.n_ghosts
    transform = normalization_for(positions)
    r_embed = cfg.radius / transform.scale
    offsets = _sample_disk_batch(n * m, r_embed, stream).reshape(n, m, 2)
    return GhostState(
        positions=positions[:, None, :] + offsets,
        alive=np.ones(n, dtype=bool),
        D=np.zeros(n, dtype=np.float64),
        initial_offsets=np.sqrt((offsets ** 2).sum(axis=2)) * transform.scale,
        generated_at_epoch=epoch,
    )


def optimize_epoch_ghosts(ghosts: GhostState, state: EmbeddingState,
                          graph: FuzzyGraph, cfg: ResolvedConfig,
                          params: CurveParams, ghost_keys: np.ndarray,
                          incidence: EdgeIncidence, epoch: int,
                          alpha: float) -> GhostState:
    """Advance every alive point's ghosts by one epoch.

    Replays the edges that fired for the target during the original pass
    of the same epoch (same learning rate), pulling each ghost toward the
    read-only original endpoint; negative samples are drawn from each
    ghost's own stream when the target heads the edge. Originals are
    never written.
    """
    kernel = (_kernels.epoch_ghosts if cfg.threads == 1
              else _kernels.epoch_ghosts_parallel)
    kernel(ghosts.positions, state.positions, graph.heads, graph.tails,
           state.fired, ghosts.alive, incidence.indptr, incidence.edge_ids,
           incidence.is_head, epoch, alpha, params.a, params.b,
           cfg.n_negative_samples, ghost_keys, graph.n_points)
    return ghosts


def percentile_rank(sensitivity: float, m: int) -> int:
    """1-based nearest-rank index into m sorted values; clamped to [1, m]."""
    return min(max(math.ceil(sensitivity * m), 1), m)


def measure_rows(positions: np.ndarray, ghosts: GhostState,
                 sensitivity: float, rows: np.ndarray,
                 transform: NormalizationTransform | None = None) -> np.ndarray:
    """d_i for the selected rows under the current normalization.

    d_i is the nearest-rank percentile of the point's M normalized ghost
    distances (the max at sensitivity=1.0). The transform is fitted to
    the original positions only.
    """
    if transform is None:
        transform = normalization_for(positions)
    diffs = ghosts.positions[rows] - positions[rows, None, :]
    dists = np.sqrt((diffs ** 2).sum(axis=2)) * transform.scale
    rank = percentile_rank(sensitivity, ghosts.n_ghosts)
    return np.partition(dists, rank - 1, axis=1)[:, rank - 1]


def measure_distances(positions: np.ndarray, ghosts: GhostState,
                      sensitivity: float,
                      transform: NormalizationTransform | None = None
                      ) -> StabilityDistances:
    """StabilityDistances over all points (alive or not)."""
    rows = np.arange(ghosts.n_points)
    return StabilityDistances(
        d=measure_rows(positions, ghosts, sensitivity, rows, transform),
        sensitivity_used=sensitivity)


def ema_update(ghosts: GhostState, d_alive: np.ndarray, rows: np.ndarray,
               beta: float) -> None:
    """Fold a fresh measurement into D for the given (alive) rows.

    The first measurement after generation seeds D outright; afterwards
    D <- beta * d + (1 - beta) * D. Dropped rows are never passed in, so
    their D stays frozen.
    """
    if not ghosts.has_measurement:
        ghosts.D[rows] = d_alive
        ghosts.has_measurement = True
    else:
        ghosts.D[rows] = beta * d_alive + (1.0 - beta) * ghosts.D[rows]


def adaptive_drop(ghosts: GhostState) -> int:
    """Drop alive points whose smoothed distance falls below the mean.

    The threshold is the mean of D over ALL points, dropped included;
    restricting it to survivors would inflate the threshold every epoch
    and eventually drop genuinely unstable points. Strict inequality, so
    an all-equal population drops nothing. Returns the number dropped.
    """
    tau = float(ghosts.D.mean())
    mask = ghosts.alive & (ghosts.D < tau)
    ghosts.alive[mask] = False
    return int(mask.sum())


def halving_drop(ghosts: GhostState, positions: np.ndarray) -> int:
    """Drop the half of alive points with the lowest positional variance.

    Variance is the mean squared distance of the M+1 projections (original
    plus ghosts) from their centroid, in normalized coordinates. Ties are
    broken toward the lower index. Returns the number dropped.
    """
    rows = np.flatnonzero(ghosts.alive)
    if rows.size == 0:
        return 0
    transform = normalization_for(positions)
    cloud = np.concatenate([positions[rows, None, :], ghosts.positions[rows]],
                           axis=1)
    centered = cloud - cloud.mean(axis=1, keepdims=True)
    variance = (centered ** 2).sum(axis=2).mean(axis=1) * transform.scale**2
    n_drop = rows.size // 2
    order = np.argsort(variance, kind="stable")
    ghosts.alive[rows[order[:n_drop]]] = False
    return n_drop


@dataclass
class GhostResult:
    """Everything run_ghostumap produces for analysis and export."""

    positions: np.ndarray            # (n, 2) final original projections
    ghosts: GhostState
    distances: StabilityDistances    # final d_i; frozen D for dropped points
    transform: NormalizationTransform  # fitted to the final positions
    config: ResolvedConfig
    knn: KnnIndex | None = None
    labels: np.ndarray | None = None
    label_names: list[str] | None = None

    @property
    def dropped(self) -> np.ndarray:
        return ~self.ghosts.alive


def run_ghostumap(data: DataMatrix, h: Hyperparameters, *,
                  graph: FuzzyGraph | None = None,
                  knn: KnnIndex | None = None,
                  epoch_callback: Callable[[int, np.ndarray], None] | None = None,
                  ) -> GhostResult:
    """Joint original/ghost optimization with the configured reduction.

    Per epoch: one original pass, then (once ghosts exist) one ghost pass
    replaying the fired edges, a distance measurement, the EMA update, and
    the reduction step. Halving generates ghosts at epoch 0 so its fixed
    schedule has material to work on; the other modes generate lazily at
    ghost_generation_epoch. The final report measures surviving points
    under the final transform and carries frozen D for dropped points.
    """
    cfg = validate_config(h, data.n_points)
    if graph is None:
        knn, graph = build_fuzzy_graph(data, cfg.n_neighbors)
    params = fit_curve_params(cfg.min_dist, cfg.spread)
    streams = RngStreams(cfg.seed, data.n_points, cfg.n_ghosts)
    positions = initialize_embedding(data, cfg.init_mode, streams.init)
    state = make_state(positions, graph, cfg)
    incidence = build_incidence(graph)
    gen_epoch = (0 if cfg.reduction_mode == "halving"
                 else cfg.ghost_generation_epoch)
    ghosts: GhostState | None = None
    _set_threads(cfg.threads)

    for epoch in range(cfg.n_epochs):
        if ghosts is None and epoch == gen_epoch:
            ghosts = generate_ghosts(state.positions, epoch, cfg, streams.init)
        alpha = state.alpha
        optimize_epoch_original(state, graph, cfg, params, streams.original_key)
        if ghosts is not None:
            optimize_epoch_ghosts(ghosts, state, graph, cfg, params,
                                  streams.ghost_keys, incidence, epoch, alpha)
            rows = np.flatnonzero(ghosts.alive)
            d_alive = measure_rows(state.positions, ghosts,
                                   cfg.sensitivity, rows)
            ema_update(ghosts, d_alive, rows, cfg.beta)
            if cfg.reduction_mode == "adaptive" and epoch >= cfg.drop_start_epoch:
                adaptive_drop(ghosts)
            elif cfg.reduction_mode == "halving" and epoch in cfg.halving_schedule:
                halving_drop(ghosts, state.positions)
        if epoch_callback is not None:
            epoch_callback(epoch, state.positions)

    assert ghosts is not None  # gen_epoch < n_epochs by config validation
    transform = normalization_for(state.positions)
    final_d = ghosts.D.copy()
    rows = np.flatnonzero(ghosts.alive)
    final_d[rows] = measure_rows(state.positions, ghosts, cfg.sensitivity,
                                 rows, transform)
    return GhostResult(
        positions=state.positions,
        ghosts=ghosts,
        distances=StabilityDistances(d=final_d, sensitivity_used=cfg.sensitivity),
        transform=transform,
        config=cfg,
        knn=knn,
        labels=data.labels,
        label_names=data.label_names,
    )
