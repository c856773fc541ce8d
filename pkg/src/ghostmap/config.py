"""Hyperparameters and their validation/resolution rules."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError

REDUCTION_MODES = ("none", "halving", "adaptive")
INIT_MODES = ("pca", "random")

# n_epochs auto rule: datasets above this size get the short schedule.
LARGE_DATASET_THRESHOLD = 10_000
EPOCHS_LARGE = 200
EPOCHS_SMALL = 500


@dataclass(frozen=True)
class Hyperparameters:
    """User-facing knobs; see ``validate_config`` for constraints.

    ``radius`` is the ghost perturbation radius and ``sensitivity`` the
    percentile of ghost distances used for the per-point instability
    distance, both in normalized [0, 1] coordinates.
    """

    n_neighbors: int = 15
    min_dist: float = 0.1
    spread: float = 1.0
    n_epochs: int | None = None
    n_negative_samples: int = 5
    n_ghosts: int = 16
    radius: float = 0.1
    lazy_gen: float = 0.2
    drop_start: float = 0.4
    beta: float = 0.2
    sensitivity: float = 0.9
    reduction_mode: str = "adaptive"
    halving_schedule: tuple[int, ...] = (50, 100, 150)
    seed: int = 0
    init_mode: str = "pca"
    learning_rate_initial: float = 1.0
    threads: int = 1


# Declaration order doubles as the canonical column order in exports.
HYPERPARAMETER_FIELDS: tuple[str, ...] = tuple(Hyperparameters.__dataclass_fields__)


@dataclass(frozen=True)
class ResolvedConfig(Hyperparameters):
    """A validated Hyperparameters set with derived epochs filled in."""

    n_epochs: int = EPOCHS_SMALL
    ghost_generation_epoch: int = 0
    drop_start_epoch: int = 0
    n_points: int = 2


def _require(ok: bool, fieldname: str, message: str) -> None:
    if not ok:
        raise ConfigError(fieldname, message)


def validate_fields(h: Hyperparameters) -> None:
    """Check every constraint that does not depend on the dataset size."""
    _require(h.n_neighbors >= 1, "n_neighbors", "must be at least 1")
    _require(h.n_ghosts >= 1, "n_ghosts", "must be at least 1")
    _require(0.0 <= h.radius <= 1.0, "radius", "must lie in [0, 1]")
    _require(0.0 <= h.lazy_gen < 1.0, "lazy_gen", "must lie in [0, 1)")
    _require(0.0 <= h.drop_start <= 1.0, "drop_start", "must lie in [0, 1]")
    _require(0.0 < h.beta <= 1.0, "beta", "must lie in (0, 1]")
    _require(0.0 <= h.sensitivity <= 1.0, "sensitivity", "must lie in [0, 1]")
    _require(h.min_dist > 0.0, "min_dist", "must be positive")
    _require(h.spread > 0.0, "spread", "must be positive")
    _require(h.min_dist < 10.0 * h.spread, "min_dist",
             "must be smaller than 10 * spread")
    _require(h.n_negative_samples >= 0, "n_negative_samples", "must be non-negative")
    _require(h.learning_rate_initial > 0.0, "learning_rate_initial", "must be positive")
    _require(h.threads >= 1, "threads", "must be at least 1")
    _require(h.reduction_mode in REDUCTION_MODES, "reduction_mode",
             f"must be one of {REDUCTION_MODES}")
    _require(h.init_mode in INIT_MODES, "init_mode", f"must be one of {INIT_MODES}")
    _require(h.n_epochs is None or h.n_epochs >= 1, "n_epochs",
             "must be at least 1")
    _require(h.lazy_gen < h.drop_start, "lazy_gen",
             "ghost generation must precede the dropping window "
             f"(lazy_gen={h.lazy_gen} vs drop_start={h.drop_start})")
    if h.reduction_mode == "halving":
        schedule = tuple(int(e) for e in h.halving_schedule)
        _require(all(b > a for a, b in zip(schedule, schedule[1:])),
                 "halving_schedule", "must be strictly increasing")
        _require(all(e >= 0 for e in schedule), "halving_schedule",
                 "entries must be non-negative")


def validate_config(h: Hyperparameters, n_points: int) -> ResolvedConfig:
    """Check every invariant and resolve epoch-dependent quantities.

    Idempotent: re-validating a ResolvedConfig returns an equal one.
    """
    validate_fields(h)
    _require(n_points >= 2, "n_points", f"need at least 2 points, got {n_points}")
    _require(h.n_neighbors < n_points, "n_neighbors",
             f"must be smaller than n_points ({h.n_neighbors} >= {n_points})")

    if h.n_epochs is None:
        n_epochs = EPOCHS_LARGE if n_points > LARGE_DATASET_THRESHOLD else EPOCHS_SMALL
    else:
        n_epochs = h.n_epochs

    schedule = tuple(int(e) for e in h.halving_schedule)
    if h.reduction_mode == "halving":
        _require(all(0 <= e < n_epochs for e in schedule), "halving_schedule",
                 f"entries must lie in [0, n_epochs={n_epochs})")

    fields = {f: getattr(h, f) for f in Hyperparameters.__dataclass_fields__}
    fields.update(
        n_epochs=n_epochs,
        halving_schedule=schedule,
        ghost_generation_epoch=math.floor(h.lazy_gen * n_epochs),
        drop_start_epoch=math.floor(h.drop_start * n_epochs),
        n_points=n_points,
    )
    return ResolvedConfig(**fields)
