"""Benchmark harness: runtime and unstable-point-detection accuracy.

Ground truth for "unstable" comes from a no-reduction run with the same
seed; because the random streams are counter-indexed, the reduction modes
see the exact same original trajectory and ghost forces, so their predicted
sets are directly comparable. Timings cover the optimization phase only;
the weighted kNN graph is built beforehand and passed in.
"""

from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import HYPERPARAMETER_FIELDS, Hyperparameters
from .data import DataMatrix
from .datasets import dataset_from_table, gaussian_blobs
from .errors import ConfigError, DatasetError, ParseError
from .ghosts import GhostResult, run_ghostumap
from .graph import build_fuzzy_graph
from .layout import run_vanilla

BENCH_MODES = ("vanilla", "none", "halving", "adaptive")

CSV_COLUMNS = ("dataset", "mode", "seed", "runtime_s", "precision", "recall",
               "f1", "unstable_count", "alive_count") + HYPERPARAMETER_FIELDS


@dataclass(frozen=True)
class BenchResult:
    dataset: str
    mode: str
    seed: int
    runtime_s: float
    precision: float | None
    recall: float | None
    f1: float | None
    unstable_count: int | None
    alive_count: int | None
    config: Hyperparameters


def ground_truth_unstable(data: DataMatrix, h: Hyperparameters, d: float,
                          **run_kwargs) -> frozenset[int]:
    """Unstable ids from a no-reduction run: every ghost kept, d_i > d."""
    result = run_ghostumap(data, replace(h, reduction_mode="none"),
                           **run_kwargs)
    return frozenset(np.flatnonzero(result.distances.d > d).tolist())


def predicted_unstable_adaptive(result: GhostResult, d: float) -> frozenset[int]:
    """Survivors of adaptive dropping whose final d_i exceeds d."""
    mask = result.ghosts.alive & (result.distances.d > d)
    return frozenset(np.flatnonzero(mask).tolist())


def predicted_unstable_halving(result: GhostResult) -> frozenset[int]:
    """All survivors of the halving schedule, with no distance filter."""
    return frozenset(np.flatnonzero(result.ghosts.alive).tolist())


def f1_recall(predicted, truth) -> tuple[float, float, float]:
    """(precision, recall, f1) with explicit empty-set conventions.

    Empty predicted: precision is 1 when truth is empty too, else 0.
    Empty truth: recall is 1. f1 is the harmonic mean, 0 when both are 0.
    """
    p = frozenset(predicted)
    t = frozenset(truth)
    hits = len(p & t)
    precision = (1.0 if not t else 0.0) if not p else hits / len(p)
    recall = 1.0 if not t else hits / len(t)
    f1 = 0.0 if precision + recall == 0 else \
        2.0 * precision * recall / (precision + recall)
    return precision, recall, f1


_warmed_up = False


def warmup_kernels(threads: int = 1) -> None:
    """Compile every optimizer kernel on a throwaway run.

    The first call into a jitted kernel pays compilation cost; running a
    tiny dataset through both the vanilla and ghost paths first keeps that
    cost out of the timed runs.
    """
    global _warmed_up
    if _warmed_up:
        return
    data = gaussian_blobs(64, n_dims=4, n_clusters=2, seed=0)
    h = Hyperparameters(n_neighbors=4, n_epochs=12, n_ghosts=2,
                        halving_schedule=(4,), lazy_gen=0.1, drop_start=0.5,
                        threads=threads)
    run_vanilla(data, h)
    run_ghostumap(data, replace(h, reduction_mode="adaptive"))
    _warmed_up = True


def _timed_run(data: DataMatrix, h: Hyperparameters, mode: str, graph, knn):
    start = time.perf_counter()
    if mode == "vanilla":
        run_vanilla(data, h, graph=graph)
        result = None
    else:
        result = run_ghostumap(data, replace(h, reduction_mode=mode),
                               graph=graph, knn=knn)
    return time.perf_counter() - start, result


def run_benchmark(datasets, h: Hyperparameters, modes=BENCH_MODES, *,
                  seeds=(0, 1, 2), d: float = 0.1, warmup: bool = True,
                  log=None) -> list[BenchResult]:
    """Run every (dataset, seed, mode) cell and score against ground truth.

    ``datasets`` is a sequence of (name, source) pairs where source is a
    DataMatrix or a zero-argument callable producing one (deferred load).
    A dataset that fails to materialize is reported and skipped without
    aborting the suite. The none run doubles as ground truth when present;
    otherwise an extra untimed one is performed on demand.
    """
    bad = [m for m in modes if m not in BENCH_MODES]
    if bad:
        raise ValueError(f"unknown benchmark modes: {bad}")
    if warmup:
        warmup_kernels(h.threads)
    results: list[BenchResult] = []
    for name, data in datasets:
        try:
            if callable(data):
                data = data()
            knn, graph = build_fuzzy_graph(data, h.n_neighbors)
        except (DatasetError, ConfigError) as err:
            _log(log, f"skipping dataset {name!r}: {err}")
            continue
        for seed in seeds:
            h_seed = replace(h, seed=seed)
            cache: dict = {"truth": None, "none": None}

            def truth_fn(data=data, h_seed=h_seed, graph=graph, knn=knn,
                         cache=cache) -> frozenset[int]:
                if cache["truth"] is None:
                    if cache["none"] is None:
                        cache["none"] = run_ghostumap(
                            data, replace(h_seed, reduction_mode="none"),
                            graph=graph, knn=knn)
                    cache["truth"] = frozenset(np.flatnonzero(
                        cache["none"].distances.d > d).tolist())
                return cache["truth"]

            for mode in modes:
                elapsed, result = _timed_run(data, h_seed, mode, graph, knn)
                if mode == "none":
                    cache["none"] = result
                results.append(_score(name, mode, seed, elapsed, result,
                                      h_seed, d, truth_fn))
    return results


def _score(name, mode, seed, elapsed, result, h, d, truth_fn) -> BenchResult:
    if mode == "vanilla":
        return BenchResult(name, mode, seed, elapsed, None, None, None,
                           None, None, h)
    if mode == "none":
        unstable = int((result.distances.d > d).sum())
        return BenchResult(name, mode, seed, elapsed, None, None, None,
                           unstable, result.ghosts.n_alive, h)
    if mode == "adaptive":
        predicted = predicted_unstable_adaptive(result, d)
    else:
        predicted = predicted_unstable_halving(result)
    precision, recall, f1 = f1_recall(predicted, truth_fn())
    return BenchResult(name, mode, seed, elapsed, precision, recall, f1,
                       len(predicted), result.ghosts.n_alive, h)


def _log(log, message: str) -> None:
    print(message, file=log if log is not None else sys.stderr)


def write_csv(results: list[BenchResult], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in results:
            row = [r.dataset, r.mode, r.seed, f"{r.runtime_s:.6f}",
                   _cell(r.precision), _cell(r.recall), _cell(r.f1),
                   _cell(r.unstable_count), _cell(r.alive_count)]
            row += [_cell(getattr(r.config, f)) for f in HYPERPARAMETER_FIELDS]
            writer.writerow(row)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def format_table(results: list[BenchResult]) -> str:
    """Mean +- half-range per (dataset, mode) across seeds."""
    groups: dict[tuple[str, str], list[BenchResult]] = {}
    for r in results:
        groups.setdefault((r.dataset, r.mode), []).append(r)
    lines = [f"{'dataset':<16} {'mode':<9} {'runtime_s':>15} "
             f"{'f1':>15} {'recall':>15}"]
    for (dataset, mode), rs in groups.items():
        runtime = _mean_range([r.runtime_s for r in rs])
        f1 = _mean_range([r.f1 for r in rs if r.f1 is not None])
        recall = _mean_range([r.recall for r in rs if r.recall is not None])
        lines.append(f"{dataset:<16} {mode:<9} {runtime:>15} "
                     f"{f1:>15} {recall:>15}")
    return "\n".join(lines)


def _mean_range(values) -> str:
    if not values:
        return "-"
    mean = sum(values) / len(values)
    half = (max(values) - min(values)) / 2.0
    return f"{mean:.3f}+-{half:.3f}"


def load_suite(path: str | Path) -> dict:
    """Parse a TOML benchmark suite description.

    Layout: a [suite] table with seeds/modes/d, a [hyperparameters] table
    of overrides, an optional [sweep] table (field + values) that expands
    into one configuration per value, and [[datasets]] entries understood
    by dataset_from_table.
    """
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as err:
        raise ParseError(f"invalid suite file: {err}", line=1) from err
    suite = doc.get("suite", {})
    overrides = dict(doc.get("hyperparameters", {}))
    if "halving_schedule" in overrides:
        overrides["halving_schedule"] = tuple(overrides["halving_schedule"])
    try:
        base = Hyperparameters(**overrides)
        configs = [base]
        sweep = doc.get("sweep")
        if sweep:
            fieldname = sweep["field"]
            configs = [replace(base, **{fieldname: v}) for v in sweep["values"]]
    except (KeyError, TypeError) as err:
        raise ParseError(f"bad hyperparameters/sweep table: {err}",
                         line=1) from err
    return {
        "datasets": [(t.get("name", t.get("kind")), _deferred(t, path.parent))
                     for t in doc.get("datasets", [])],
        "configs": configs,
        "modes": tuple(suite.get("modes", BENCH_MODES)),
        "seeds": tuple(suite.get("seeds", (0, 1, 2))),
        "d": float(suite.get("d", 0.1)),
    }


def _deferred(table: dict, base_dir: Path):
    return lambda: dataset_from_table(table, base_dir)[1]


def run_suite(path: str | Path, out_csv: str | Path | None = None,
              log=None) -> tuple[list[BenchResult], str]:
    suite = load_suite(path)
    results: list[BenchResult] = []
    for config in suite["configs"]:
        results += run_benchmark(suite["datasets"], config, suite["modes"],
                                 seeds=suite["seeds"], d=suite["d"], log=log)
    if out_csv is not None:
        write_csv(results, out_csv)
    return results, format_table(results)
