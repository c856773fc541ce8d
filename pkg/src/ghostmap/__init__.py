"""ghostmap: UMAP with ghost projections that measure per-point stability.

Each point is embedded together with M perturbed copies ("ghosts") that
feel the same attractive forces but sample their own negatives. How far
the ghosts end up from the point quantifies how reproducible its final
position is; reduction schemes retire ghosts of points that settle early
so the overhead stays manageable.
"""

from .bench import (BenchResult, f1_recall, ground_truth_unstable,
                    predicted_unstable_adaptive, predicted_unstable_halving,
                    run_benchmark, run_suite)
from .config import Hyperparameters, ResolvedConfig, validate_config
from .data import DataMatrix
from .errors import (ConfigError, DatasetError, DegenerateInput, FitError,
                     GhostmapError, IoError, MagicError, ParseError,
                     ShapeError, TruncationError)
from .ghosts import GhostResult, GhostState, StabilityDistances, run_ghostumap
from .graph import FuzzyGraph, KnnIndex, build_fuzzy_graph, exact_knn
from .io import (export_ghosts, load_csv, load_export, load_f32_matrix,
                 write_f32_matrix)
from .layout import CurveParams, fit_curve_params, run_vanilla
from .stability import (StabilityReport, assign_patterns, classify,
                        classify_pattern, instability_summary,
                        report_from_result)

__version__ = "0.1.0"

__all__ = [
    "BenchResult", "ConfigError", "CurveParams", "DataMatrix", "DatasetError",
    "DegenerateInput", "FitError", "FuzzyGraph", "GhostResult", "GhostState",
    "GhostmapError", "Hyperparameters", "IoError", "KnnIndex", "MagicError",
    "ParseError", "ResolvedConfig", "ShapeError", "StabilityDistances",
    "StabilityReport", "TruncationError", "assign_patterns",
    "build_fuzzy_graph", "classify", "classify_pattern", "exact_knn",
    "export_ghosts", "f1_recall", "fit_curve_params", "ground_truth_unstable",
    "instability_summary", "load_csv", "load_export", "load_f32_matrix",
    "predicted_unstable_adaptive", "predicted_unstable_halving",
    "report_from_result", "run_benchmark", "run_ghostumap", "run_suite",
    "run_vanilla", "validate_config", "write_f32_matrix",
]
