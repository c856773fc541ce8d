"""Command-line interface: fit, analyze, bench.

Exit codes: 0 on success, 1 on usage errors (bad flags/values), 2 on data
errors (unreadable or malformed input files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bench import run_suite
from .config import HYPERPARAMETER_FIELDS, Hyperparameters, validate_fields
from .errors import ConfigError, GhostmapError
from .ghosts import run_ghostumap
from .io import DEFAULT_D, export_ghosts, load_csv, load_export, load_f32_matrix
from .stability import classify_pattern

_DEFAULTS = Hyperparameters()

# CLI flag spelling for each hyperparameter field.
_FLAG_BY_FIELD = {f: "--" + f.replace("_", "-") for f in HYPERPARAMETER_FIELDS}
_FLAG_BY_FIELD["reduction_mode"] = "--reduction"
_FLAG_BY_FIELD["init_mode"] = "--init"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _schedule(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def _name_or_index(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghostmap",
                     description="Stability-aware UMAP: measure how "
                                 "reproducible each point's projection is.")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    fit = sub.add_parser("fit", formatter_class=fmt,
                         help="embed a dataset and write a .ghost.json export")
    fit.add_argument("--input", required=True, help="input data file")
    fit.add_argument("--format", choices=("csv", "gum2"), default=None,
                     help="input format; inferred from the extension if omitted")
    fit.add_argument("--label-column", type=_name_or_index, default=None,
                     metavar="NAME_OR_INDEX",
                     help="CSV column holding class labels")
    fit.add_argument("--out", required=True, help="output .ghost.json path")
    fit.add_argument("--n-neighbors", type=int, default=_DEFAULTS.n_neighbors,
                     help="size of the kNN neighborhood")
    fit.add_argument("--min-dist", type=float, default=_DEFAULTS.min_dist,
                     help="minimum spacing in the embedding")
    fit.add_argument("--spread", type=float, default=_DEFAULTS.spread,
                     help="scale of the embedding weight curve")
    fit.add_argument("--n-epochs", type=int, default=None,
                     help="optimization epochs; auto-selected by dataset "
                          "size if omitted")
    fit.add_argument("--n-negative-samples", type=int,
                     default=_DEFAULTS.n_negative_samples,
                     help="repulsion samples per fired edge")
    fit.add_argument("--n-ghosts", type=int, default=_DEFAULTS.n_ghosts,
                     help="ghost projections per point")
    fit.add_argument("--radius", type=float, default=_DEFAULTS.radius,
                     help="ghost perturbation radius in normalized units")
    fit.add_argument("--lazy-gen", type=float, default=_DEFAULTS.lazy_gen,
                     help="fraction of epochs to wait before generating ghosts")
    fit.add_argument("--drop-start", type=float, default=_DEFAULTS.drop_start,
                     help="fraction of epochs after which dropping may begin")
    fit.add_argument("--beta", type=float, default=_DEFAULTS.beta,
                     help="EMA smoothing factor for instability distances")
    fit.add_argument("--sensitivity", type=float, default=_DEFAULTS.sensitivity,
                     help="percentile of ghost distances defining d_i")
    fit.add_argument("--reduction", choices=("none", "halving", "adaptive"),
                     default=_DEFAULTS.reduction_mode,
                     help="ghost reduction scheme")
    fit.add_argument("--halving-schedule", type=_schedule,
                     default=_DEFAULTS.halving_schedule, metavar="E1,E2,...",
                     help="epochs at which halving mode drops ghosts")
    fit.add_argument("--seed", type=int, default=_DEFAULTS.seed,
                     help="master seed for all random streams")
    fit.add_argument("--init", choices=("pca", "random"),
                     default=_DEFAULTS.init_mode, help="embedding initialization")
    fit.add_argument("--learning-rate-initial", type=float,
                     default=_DEFAULTS.learning_rate_initial,
                     help="learning rate at epoch 0; decays linearly to zero")
    fit.add_argument("--threads", type=int, default=_DEFAULTS.threads,
                     help="optimizer threads; >1 trades determinism for speed")
    fit.set_defaults(func=cmd_fit)

    analyze = sub.add_parser("analyze", formatter_class=fmt,
                             help="classify points in an existing export")
    analyze.add_argument("--input", required=True, help=".ghost.json path")
    analyze.add_argument("--d", type=float, default=DEFAULT_D,
                         help="stability threshold in normalized units")
    analyze.add_argument("--patterns", action="store_true",
                         help="also tally heuristic ghost patterns P1-P4")
    analyze.set_defaults(func=cmd_analyze)

    bench = sub.add_parser("bench", formatter_class=fmt,
                           help="run a benchmark suite described in TOML")
    bench.add_argument("--suite", required=True, help="suite .toml path")
    bench.add_argument("--out", default=None, help="per-run results CSV path")
    bench.set_defaults(func=cmd_bench)
    return parser


def _load_input(args):
    fmt = args.format
    if fmt is None:
        fmt = "gum2" if Path(args.input).suffix == ".gum2" else "csv"
    if fmt == "gum2":
        if args.label_column is not None:
            raise ConfigError("label_column", "only applies to CSV input")
        return load_f32_matrix(args.input)
    return load_csv(args.input, label_column=args.label_column)


def cmd_fit(args) -> int:
    h = _hyperparameters(args)
    validate_fields(h)  # reject bad flags before touching the input file
    data = _load_input(args)
    result = run_ghostumap(data, h)
    export_ghosts(result, args.out)
    unstable = int(((result.distances.d > DEFAULT_D) & ~result.dropped).sum())
    print(f"wrote {args.out}: {data.n_points} points, "
          f"{result.ghosts.n_alive} with ghosts, "
          f"{unstable} unstable at d={DEFAULT_D}")
    return 0


def _hyperparameters(args) -> Hyperparameters:
    return Hyperparameters(
        n_neighbors=args.n_neighbors,
        min_dist=args.min_dist,
        spread=args.spread,
        n_epochs=args.n_epochs,
        n_negative_samples=args.n_negative_samples,
        n_ghosts=args.n_ghosts,
        radius=args.radius,
        lazy_gen=args.lazy_gen,
        drop_start=args.drop_start,
        beta=args.beta,
        sensitivity=args.sensitivity,
        reduction_mode=args.reduction,
        halving_schedule=args.halving_schedule,
        seed=args.seed,
        init_mode=args.init,
        learning_rate_initial=args.learning_rate_initial,
        threads=args.threads,
    )


def cmd_analyze(args) -> int:
    export = load_export(args.input)
    d = args.d
    unstable_mask = (export.distances > d) & ~export.dropped
    unstable_ids = np.flatnonzero(unstable_mask)
    n = export.n_points
    print(f"{n} points, radius r={export.radius}, threshold d={d}")
    print(f"stable: {n - unstable_ids.size}  unstable: {unstable_ids.size}")
    if unstable_ids.size:
        order = unstable_ids[np.argsort(-export.distances[unstable_ids],
                                        kind="stable")]
        print("top unstable points:")
        for i in order[:20]:
            print(f"  {int(i):>8d}  d_i={export.distances[i]:.6f}")
    if args.patterns:
        _print_patterns(export, d)
    return 0


def _print_patterns(export, d: float) -> None:
    row_of = {int(i): row for row, i in enumerate(export.ghost_ids)}
    tallies = {"P1": 0, "P2": 0, "P3": 0, "P4": 0, "dropped": 0}
    for i in range(export.n_points):
        row = row_of.get(i)
        if export.dropped[i] or row is None:
            tallies["dropped"] += 1
            continue
        label = classify_pattern(export.positions[i],
                                 export.ghost_positions[row], d)
        tallies[label] += 1
    print("ghost patterns (heuristic):")
    for label, count in tallies.items():
        print(f"  {label:<8} {count}")


def cmd_bench(args) -> int:
    _, table = run_suite(args.suite, args.out)
    print(table)
    if args.out:
        print(f"per-run results written to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return int(exit_.code or 0)
    try:
        return args.func(args)
    except ConfigError as err:
        flag = _FLAG_BY_FIELD.get(err.field, err.field)
        print(f"ghostmap: error: {flag}: {err.message}", file=sys.stderr)
        return 1
    except GhostmapError as err:
        print(f"ghostmap: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"ghostmap: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
