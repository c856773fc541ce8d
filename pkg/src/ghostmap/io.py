"""Data ingestion and the .ghost.json export consumed by the explorer UI."""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import HYPERPARAMETER_FIELDS
from .data import DataMatrix
from .errors import (IoError, MagicError, ParseError, ShapeError,
                     TruncationError)
from .ghosts import GhostResult

GUM2_MAGIC = b"GUM2"
EXPORT_VERSION = 1
DEFAULT_D = 0.1


def _parse_cell(text: str, line: int, column: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as a number",
                         line=line, column=column) from None


def load_csv(path: str | Path, label_column: str | int | None = None) -> DataMatrix:
    """Read a rectangular numeric CSV, splitting out an optional label column.

    The first row is treated as a header when any non-label cell in it is
    not numeric. A label column named by string requires a header; labels
    are factorized in first-appearance order and the distinct raw strings
    recorded as label_names. Line numbers in errors are 1-based and count
    the header.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1)
                if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError("empty file", line=1)

    first_line, first = rows[0]
    width = len(first)
    label_idx: int | None = None
    has_header = False

    if isinstance(label_column, str):
        if label_column not in first:
            raise ParseError(f"label column {label_column!r} not found in header",
                             line=first_line)
        label_idx = first.index(label_column)
        has_header = True
    else:
        if isinstance(label_column, int):
            if not -width <= label_column < width:
                raise ParseError(f"label column index {label_column} out of "
                                 f"range for {width} columns", line=first_line)
            label_idx = label_column % width
        checked = [cell for i, cell in enumerate(first) if i != label_idx]
        has_header = any(_is_not_number(cell) for cell in checked)

    data_rows = rows[1:] if has_header else rows
    if not data_rows:
        raise ParseError("no data rows", line=first_line)

    values = []
    raw_labels: list[str] = []
    for lineno, row in data_rows:
        if len(row) != width:
            raise ShapeError(f"expected {width} columns, got {len(row)}",
                             line=lineno)
        if label_idx is not None:
            raw_labels.append(row[label_idx].strip())
        values.append([_parse_cell(cell, lineno, i + 1)
                       for i, cell in enumerate(row) if i != label_idx])

    labels = None
    label_names = None
    if label_idx is not None:
        label_names = list(dict.fromkeys(raw_labels))
        index = {name: i for i, name in enumerate(label_names)}
        labels = np.array([index[name] for name in raw_labels], dtype=np.int64)
    return DataMatrix(np.asarray(values, dtype=np.float64), labels=labels,
                      label_names=label_names)


def _is_not_number(cell: str) -> bool:
    try:
        float(cell)
        return False
    except ValueError:
        return True


def load_f32_matrix(path: str | Path) -> DataMatrix:
    """Read the GUM2 binary layout: magic, u32 n_points, u32 n_dims, f32 data."""
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise TruncationError(expected=12, actual=len(raw))
    if raw[:4] != GUM2_MAGIC:
        raise MagicError(f"bad magic {raw[:4]!r}, expected {GUM2_MAGIC!r}")
    if len(raw) < 12:
        raise TruncationError(expected=12, actual=len(raw))
    n_points, n_dims = struct.unpack_from("<II", raw, 4)
    expected = 12 + 4 * n_points * n_dims
    if len(raw) != expected:
        raise TruncationError(expected=expected, actual=len(raw))
    values = np.frombuffer(raw, dtype="<f4", count=n_points * n_dims, offset=12)
    return DataMatrix(values.reshape(n_points, n_dims).astype(np.float64))


def write_f32_matrix(path: str | Path, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype="<f4")
    n_points, n_dims = values.shape
    with Path(path).open("wb") as fh:
        fh.write(GUM2_MAGIC)
        fh.write(struct.pack("<II", n_points, n_dims))
        fh.write(values.tobytes())


@dataclass(frozen=True)
class GhostExport:
    """In-memory form of a .ghost.json file."""

    n_points: int
    n_ghosts: int
    radius: float
    default_d: float
    hyperparameters: dict
    positions: np.ndarray           # (n, 2) normalized
    distances: np.ndarray           # (n,)
    dropped: np.ndarray             # (n,) bool
    ghost_ids: np.ndarray           # ids of points that still carry ghosts
    ghost_positions: np.ndarray     # (len(ghost_ids), M, 2) normalized
    initial_offsets: np.ndarray     # (len(ghost_ids), M)
    neighbor_ids: np.ndarray | None  # (n, k)
    labels: np.ndarray | None
    label_names: list[str] | None


def export_ghosts(result: GhostResult, path: str | Path,
                  default_d: float = DEFAULT_D) -> None:
    """Write the UI export: normalized positions, distances, alive ghosts.

    Ghost positions are kept only for points whose ghosts survived;
    dropped points carry their frozen distance and a dropped flag. The
    default json float formatting is shortest-round-trip, which exceeds
    the nine significant digits the schema asks for.
    """
    cfg = result.config
    transform = result.transform
    alive_ids = np.flatnonzero(result.ghosts.alive)
    ghost_norm = transform.apply(
        result.ghosts.positions[alive_ids].reshape(-1, 2)
    ).reshape(alive_ids.size, cfg.n_ghosts, 2)
    doc = {
        "version": EXPORT_VERSION,
        "n_points": int(result.positions.shape[0]),
        "n_ghosts": int(cfg.n_ghosts),
        "radius": float(cfg.radius),
        "default_d": float(default_d),
        "hyperparameters": {f: _jsonable(getattr(cfg, f))
                            for f in HYPERPARAMETER_FIELDS},
        "positions": transform.apply(result.positions).tolist(),
        "distances": result.distances.d.tolist(),
        "dropped": result.dropped.tolist(),
        "ghosts": [
            {
                "id": int(i),
                "positions": ghost_norm[row].tolist(),
                "initial_offsets": result.ghosts.initial_offsets[i].tolist(),
            }
            for row, i in enumerate(alive_ids)
        ],
    }
    if result.knn is not None:
        doc["neighbor_ids"] = result.knn.neighbor_ids.tolist()
    if result.labels is not None:
        doc["labels"] = result.labels.tolist()
        if result.label_names is not None:
            doc["label_names"] = list(result.label_names)
    try:
        with Path(path).open("w", encoding="utf-8") as fh:
            json.dump(doc, fh)
    except OSError as err:
        raise IoError(f"cannot write export to {path}: {err}") from err


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    return value


def load_export(path: str | Path) -> GhostExport:
    """Read a .ghost.json file back; raises ParseError on schema problems."""
    try:
        with Path(path).open(encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", line=err.lineno,
                         column=err.colno) from err
    version = doc.get("version")
    if version != EXPORT_VERSION:
        raise ParseError(f"unsupported export version {version!r}, "
                         f"expected {EXPORT_VERSION}", line=1)
    try:
        n = int(doc["n_points"])
        m = int(doc["n_ghosts"])
        ghosts = doc["ghosts"]
        export = GhostExport(
            n_points=n,
            n_ghosts=m,
            radius=float(doc["radius"]),
            default_d=float(doc["default_d"]),
            hyperparameters=dict(doc["hyperparameters"]),
            positions=np.asarray(doc["positions"], dtype=np.float64),
            distances=np.asarray(doc["distances"], dtype=np.float64),
            dropped=np.asarray(doc["dropped"], dtype=bool),
            ghost_ids=np.array([g["id"] for g in ghosts], dtype=np.int64),
            ghost_positions=np.asarray(
                [g["positions"] for g in ghosts],
                dtype=np.float64).reshape(len(ghosts), m, 2),
            initial_offsets=np.asarray(
                [g["initial_offsets"] for g in ghosts],
                dtype=np.float64).reshape(len(ghosts), m),
            neighbor_ids=(np.asarray(doc["neighbor_ids"], dtype=np.int64)
                          if "neighbor_ids" in doc else None),
            labels=(np.asarray(doc["labels"], dtype=np.int64)
                    if "labels" in doc else None),
            label_names=doc.get("label_names"),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"malformed export: {err}", line=1) from err
    _check_export(export)
    return export


def _check_export(export: GhostExport) -> None:
    n = export.n_points
    if export.positions.shape != (n, 2):
        raise ParseError("positions shape mismatch", line=1)
    if export.distances.shape != (n,) or export.dropped.shape != (n,):
        raise ParseError("distances/dropped length mismatch", line=1)
    if export.ghost_ids.size and (export.ghost_ids.min() < 0
                                  or export.ghost_ids.max() >= n):
        raise ParseError("ghost id out of range", line=1)
