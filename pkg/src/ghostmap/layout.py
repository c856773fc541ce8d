"""Standard UMAP-style layout optimization.

Covers curve-parameter fitting, embedding initialization, the closed-form
attractive/repulsive forces, and the per-epoch stochastic update used both
standalone (``run_vanilla``) and as the original-projection pass of the
ghost-augmented optimizer.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from . import _kernels
from .config import Hyperparameters, ResolvedConfig, validate_config
from .data import DataMatrix
from .errors import FitError
from .graph import FuzzyGraph, build_fuzzy_graph
from .rng import CounterStream, RngStreams

REPULSION_EPS = _kernels.REPULSION_EPS
CLIP_BOUND = 4.0

_CURVE_SAMPLES = 300
_PCA_ITERATIONS = 100
_PCA_TOL = 1e-7
_INIT_EXTENT = 10.0
_INIT_JITTER = 1e-4


@dataclass(frozen=True)
class CurveParams:
    """Parameters of the low-dimensional weight curve w(d) = 1/(1 + a d^(2b))."""

    a: float
    b: float


def low_dim_weight(d: np.ndarray, a: float, b: float) -> np.ndarray:
    return 1.0 / (1.0 + a * np.asarray(d, dtype=np.float64) ** (2.0 * b))


def fit_curve_params(min_dist: float, spread: float) -> CurveParams:
    """Fit (a, b) so the weight curve tracks the min_dist/spread target.

    The target is 1 inside min_dist and exp(-(d - min_dist)/spread) beyond,
    sampled at 300 points on [0, 3*spread]; the fit is damped least squares.
    """
    xs = np.linspace(0.0, 3.0 * spread, _CURVE_SAMPLES)
    ys = np.where(xs <= min_dist, 1.0, np.exp(-(xs - min_dist) / spread))
    try:
        (a, b), _ = curve_fit(
            lambda x, a, b: 1.0 / (1.0 + a * x ** (2.0 * b)),
            xs, ys, p0=(1.0, 1.0), xtol=1e-6, maxfev=5000)
    except RuntimeError as err:
        raise FitError(f"curve fit failed for min_dist={min_dist}, "
                       f"spread={spread}: {err}") from err
    return CurveParams(a=float(a), b=float(b))


def attractive_force(y_i, y_j, v_ij: float, params: CurveParams) -> np.ndarray:
    """Attractive gradient on y_i due to y_j, unclipped.

    This is minus the gradient of the attractive cross-entropy term under
    the fitted weight curve; during optimization the edge weight enters via
    the sampling rate, so the kernels apply this at v_ij = 1.
    """
    diff = np.asarray(y_i, dtype=np.float64) - np.asarray(y_j, dtype=np.float64)
    d2 = float(diff @ diff)
    if d2 <= 0.0:
        return np.zeros(2)
    coeff = (-2.0 * params.a * params.b) * d2 ** (params.b - 1.0) \
        / (1.0 + params.a * d2**params.b)
    return coeff * v_ij * diff


def repulsive_force(y_i, y_j, v_ij: float, params: CurveParams,
                    epsilon: float = REPULSION_EPS) -> np.ndarray:
    """Repulsive gradient on y_i due to y_j, unclipped.

    epsilon keeps the coefficient finite near coincident points; at exact
    coincidence the difference vector makes the force zero.
    """
    diff = np.asarray(y_i, dtype=np.float64) - np.asarray(y_j, dtype=np.float64)
    d2 = float(diff @ diff)
    if d2 <= 0.0:
        return np.zeros(2)
    coeff = 2.0 * params.b / ((epsilon + d2) * (1.0 + params.a * d2**params.b))
    return coeff * (1.0 - v_ij) * diff


def clip_force(force: np.ndarray) -> np.ndarray:
    """Per-component clamp applied to every force before the learning rate."""
    return np.clip(force, -CLIP_BOUND, CLIP_BOUND)


def _power_iteration_pca(x: np.ndarray, stream: CounterStream) -> np.ndarray | None:
    """Top-2 principal component scores via power iteration with deflation.

    Returns None when the data has no variance. Matrix-free: only needs
    products with the centered data, so wide inputs stay cheap.
    """
    centered = x - x.mean(axis=0)
    if not np.any(np.abs(centered) > 0.0):
        return None
    n = centered.shape[0]
    components = []
    for _ in range(2):
        v = np.asarray(stream.uniform(centered.shape[1])) - 0.5
        norm = np.linalg.norm(v)
        v = v / norm if norm > 0 else np.ones(centered.shape[1]) / np.sqrt(centered.shape[1])
        for _ in range(_PCA_ITERATIONS):
            w = centered.T @ (centered @ v) / n
            for c in components:
                w -= (w @ c) * c
            norm = np.linalg.norm(w)
            if norm == 0.0:
                break
            w /= norm
            if np.linalg.norm(w - v) < _PCA_TOL:
                v = w
                break
            v = w
        components.append(v)
    return centered @ np.column_stack(components)


def initialize_embedding(data: DataMatrix, mode: str,
                         stream: CounterStream) -> np.ndarray:
    """Initial 2-D positions: PCA scores rescaled plus jitter, or uniform.

    PCA output is rescaled so the larger bounding-box side spans 10 units,
    then jittered by U[-1e-4, 1e-4] per coordinate to break exact ties.
    Zero-variance data falls back to random placement with a warning.
    """
    n = data.n_points
    if mode == "pca":
        scores = _power_iteration_pca(data.values, stream)
        if scores is None:
            warnings.warn("data has zero variance; falling back to random "
                          "initialization", stacklevel=2)
            mode = "random"
        else:
            extent = (scores.max(axis=0) - scores.min(axis=0)).max()
            if extent > 0:
                scores = scores * (_INIT_EXTENT / extent)
            jitter = (np.asarray(stream.uniform(2 * n)).reshape(n, 2) - 0.5) \
                * (2.0 * _INIT_JITTER)
            return np.ascontiguousarray(scores + jitter)
    # uniform over [-10, 10]^2
    draws = np.asarray(stream.uniform(2 * n)).reshape(n, 2)
    return np.ascontiguousarray(draws * 20.0 - 10.0)


@dataclass
class EmbeddingState:
    """Mutable optimizer state for the original projections."""

    positions: np.ndarray        # (n, 2) float64
    n_epochs: int
    alpha0: float
    epochs_per_sample: np.ndarray  # (E,)
    next_fire: np.ndarray          # (E,) accumulators, start at epochs_per_sample
    fired: np.ndarray              # (E,) uint8, edges fired in the last epoch
    epoch: int = 0

    @property
    def alpha(self) -> float:
        """Learning rate for the upcoming epoch: linear decay to zero."""
        return self.alpha0 * (1.0 - self.epoch / self.n_epochs)


def make_state(positions: np.ndarray, graph: FuzzyGraph,
               cfg: ResolvedConfig) -> EmbeddingState:
    eps = graph.max_weight / graph.weights
    return EmbeddingState(
        positions=np.ascontiguousarray(positions, dtype=np.float64),
        n_epochs=cfg.n_epochs,
        alpha0=cfg.learning_rate_initial,
        epochs_per_sample=eps,
        next_fire=eps.copy(),
        fired=np.zeros(graph.n_edges, dtype=np.uint8),
    )


def optimize_epoch_original(state: EmbeddingState, graph: FuzzyGraph,
                            cfg: ResolvedConfig, params: CurveParams,
                            original_key: int) -> EmbeddingState:
    """Advance the original projections by one epoch.

    Edges fire at a rate proportional to their weight; a fired edge pulls
    both endpoints together and repels the head from uniformly sampled
    original points (draws hitting either endpoint are skipped but still
    consume their counter slot). Records which edges fired so the ghost
    pass can replay the same schedule.
    """
    kernel = (_kernels.epoch_original if cfg.threads == 1
              else _kernels.epoch_original_parallel)
    kernel(state.positions, graph.heads, graph.tails, state.epochs_per_sample,
           state.next_fire, state.fired, state.epoch, state.alpha,
           params.a, params.b, cfg.n_negative_samples, np.uint64(original_key),
           graph.n_points)
    state.epoch += 1
    return state


def run_vanilla(data: DataMatrix, h: Hyperparameters, *,
                graph: FuzzyGraph | None = None,
                epoch_callback=None) -> np.ndarray:
    """Plain UMAP pipeline: graph, init, n_epochs of stochastic updates.

    Deterministic for a fixed seed when threads == 1. ``epoch_callback``
    (if given) is invoked as callback(epoch, positions) after every epoch.
    """
    cfg = validate_config(h, data.n_points)
    if graph is None:
        _, graph = build_fuzzy_graph(data, cfg.n_neighbors)
    params = fit_curve_params(cfg.min_dist, cfg.spread)
    streams = RngStreams(cfg.seed, data.n_points, cfg.n_ghosts)
    positions = initialize_embedding(data, cfg.init_mode, streams.init)
    state = make_state(positions, graph, cfg)
    _set_threads(cfg.threads)
    for _ in range(cfg.n_epochs):
        optimize_epoch_original(state, graph, cfg, params, streams.original_key)
        if epoch_callback is not None:
            epoch_callback(state.epoch - 1, state.positions)
    return state.positions


def _set_threads(threads: int) -> None:
    if threads > 1:
        import numba
        numba.set_num_threads(threads)
