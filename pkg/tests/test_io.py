"""CSV/binary ingestion and the .ghost.json export round trip."""

import json

import numpy as np
import pytest

from ghostmap.config import HYPERPARAMETER_FIELDS, Hyperparameters
from ghostmap.data import DataMatrix
from ghostmap.errors import IoError, MagicError, ParseError, ShapeError, TruncationError
from ghostmap.ghosts import run_ghostumap
from ghostmap.io import (EXPORT_VERSION, GUM2_MAGIC, export_ghosts, load_csv,
                         load_export, load_f32_matrix, write_f32_matrix)


# --- csv ------------------------------------------------------------------

def test_load_csv_plain_numbers(tmp_path):
    p = tmp_path / "plain.csv"
    p.write_text("1,2,3\n4,5,6\n")
    data = load_csv(p)
    assert np.array_equal(data.values, [[1, 2, 3], [4, 5, 6]])
    assert data.labels is None


def test_load_csv_detects_header(tmp_path):
    p = tmp_path / "header.csv"
    p.write_text("x,y,z\n1,2,3\n4,5,6\n")
    data = load_csv(p)
    assert data.values.shape == (2, 3)


def test_load_csv_numeric_header_kept_as_data(tmp_path):
    p = tmp_path / "nohdr.csv"
    p.write_text("0,0\n1,1\n")
    assert load_csv(p).values.shape == (2, 2)


def test_load_csv_label_by_name(tmp_path):
    p = tmp_path / "labeled.csv"
    p.write_text("a,b,kind\n1,2,cat\n3,4,dog\n5,6,cat\n")
    data = load_csv(p, label_column="kind")
    assert data.values.shape == (3, 2)
    assert data.labels.tolist() == [0, 1, 0]  # first-appearance order
    assert data.label_names == ["cat", "dog"]


def test_load_csv_label_by_index_headerless(tmp_path):
    p = tmp_path / "labeled.csv"
    p.write_text("7,1,2\n8,3,4\n7,5,6\n")
    data = load_csv(p, label_column=0)
    assert np.array_equal(data.values, [[1, 2], [3, 4], [5, 6]])
    assert data.labels.tolist() == [0, 1, 0]
    assert data.label_names == ["7", "8"]


def test_load_csv_label_negative_index(tmp_path):
    p = tmp_path / "labeled.csv"
    p.write_text("1,2,a\n3,4,b\n")
    data = load_csv(p, label_column=-1)
    assert np.array_equal(data.values, [[1, 2], [3, 4]])
    assert data.label_names == ["a", "b"]


def test_load_csv_missing_label_column(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError, match="not found"):
        load_csv(p, label_column="kind")


def test_load_csv_ragged_row_reports_line(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("1,2,3\n4,5\n")
    with pytest.raises(ShapeError) as err:
        load_csv(p)
    assert err.value.line == 2


def test_load_csv_bad_cell_reports_position(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,oops\n")
    with pytest.raises(ParseError) as err:
        load_csv(p)
    assert err.value.line == 2
    assert err.value.column == 2


def test_load_csv_skips_blank_lines_keeps_numbering(tmp_path):
    p = tmp_path / "gaps.csv"
    p.write_text("1,2\n\n3,4\n\n5,x\n")
    with pytest.raises(ParseError) as err:
        load_csv(p)
    assert err.value.line == 5


def test_load_csv_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(ParseError, match="empty"):
        load_csv(p)


def test_load_csv_header_only(tmp_path):
    p = tmp_path / "only.csv"
    p.write_text("x,y\n")
    with pytest.raises(ParseError, match="no data rows"):
        load_csv(p)


# --- binary matrix --------------------------------------------------------

def test_f32_matrix_round_trip(tmp_path):
    p = tmp_path / "m.gum2"
    values = np.random.default_rng(0).normal(size=(7, 3))
    write_f32_matrix(p, values)
    back = load_f32_matrix(p)
    assert back.values.shape == (7, 3)
    assert np.array_equal(back.values, values.astype("<f4").astype(np.float64))


def test_f32_matrix_bad_magic(tmp_path):
    p = tmp_path / "m.gum2"
    p.write_bytes(b"NOPE" + b"\0" * 20)
    with pytest.raises(MagicError):
        load_f32_matrix(p)


def test_f32_matrix_too_short_for_magic(tmp_path):
    p = tmp_path / "m.gum2"
    p.write_bytes(b"GU")
    with pytest.raises(TruncationError) as err:
        load_f32_matrix(p)
    assert err.value.expected == 12
    assert err.value.actual == 2


def test_f32_matrix_header_truncated(tmp_path):
    p = tmp_path / "m.gum2"
    p.write_bytes(GUM2_MAGIC + b"\x01\x00")
    with pytest.raises(TruncationError):
        load_f32_matrix(p)


def test_f32_matrix_payload_size_must_match(tmp_path):
    p = tmp_path / "m.gum2"
    write_f32_matrix(p, np.ones((4, 2)))
    raw = p.read_bytes()
    p.write_bytes(raw[:-4])
    with pytest.raises(TruncationError) as err:
        load_f32_matrix(p)
    assert err.value.expected == 12 + 4 * 4 * 2
    assert err.value.actual == len(raw) - 4


# --- ghost export ---------------------------------------------------------

@pytest.fixture(scope="module")
def small_result():
    rng = np.random.default_rng(7)
    centers = rng.normal(0, 6, (3, 4))
    labels = np.arange(90) % 3
    data = DataMatrix(centers[labels] + rng.normal(0, 0.5, (90, 4)),
                      labels=labels, label_names=["a", "b", "c"])
    h = Hyperparameters(n_epochs=60, seed=2, reduction_mode="adaptive",
                        n_ghosts=5)
    return run_ghostumap(data, h)


def test_export_round_trip(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path, default_d=0.07)
    export = load_export(path)

    assert export.n_points == 90
    assert export.n_ghosts == 5
    assert export.radius == small_result.config.radius
    assert export.default_d == 0.07
    assert np.allclose(export.positions,
                       small_result.transform.apply(small_result.positions),
                       atol=1e-12)
    assert np.allclose(export.distances, small_result.distances.d, atol=1e-12)
    assert np.array_equal(export.dropped, small_result.dropped)
    # normalized positions live in the unit square
    assert export.positions.min() >= 0.0
    assert export.positions.max() <= 1.0 + 1e-12


def test_export_ghost_rows_are_alive_points(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    export = load_export(path)
    alive_ids = np.flatnonzero(small_result.ghosts.alive)
    assert np.array_equal(export.ghost_ids, alive_ids)
    expected = small_result.transform.apply(
        small_result.ghosts.positions[alive_ids].reshape(-1, 2)
    ).reshape(alive_ids.size, 5, 2)
    assert np.allclose(export.ghost_positions, expected, atol=1e-12)
    assert np.allclose(export.initial_offsets,
                       small_result.ghosts.initial_offsets[alive_ids],
                       atol=1e-12)


def test_export_preserves_unstable_set(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    export = load_export(path)
    for d in (0.01, 0.05, 0.1):
        from_export = np.flatnonzero((export.distances > d) & ~export.dropped)
        original = np.flatnonzero((small_result.distances.d > d)
                                  & ~small_result.dropped)
        assert np.array_equal(from_export, original)


def test_export_metadata(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    export = load_export(path)
    assert set(export.hyperparameters) == set(HYPERPARAMETER_FIELDS)
    assert export.hyperparameters["halving_schedule"] == [50, 100, 150]
    assert export.hyperparameters["n_ghosts"] == 5
    assert export.labels is not None
    assert export.labels.tolist() == (np.arange(90) % 3).tolist()
    assert export.label_names == ["a", "b", "c"]
    assert export.neighbor_ids is not None
    assert export.neighbor_ids.shape == (90, 15)


def test_export_version_gate(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    doc = json.loads(path.read_text())
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match="version"):
        load_export(path)
    assert EXPORT_VERSION == 1


def test_load_export_invalid_json(tmp_path):
    path = tmp_path / "broken.ghost.json"
    path.write_text('{"version": 1, "n_points": }')
    with pytest.raises(ParseError) as err:
        load_export(path)
    assert err.value.line == 1


def test_load_export_missing_field(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    doc = json.loads(path.read_text())
    del doc["distances"]
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match="malformed"):
        load_export(path)


def test_load_export_shape_mismatch(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    doc = json.loads(path.read_text())
    doc["positions"] = doc["positions"][:-1]
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match="shape"):
        load_export(path)


def test_load_export_ghost_id_out_of_range(small_result, tmp_path):
    path = tmp_path / "out.ghost.json"
    export_ghosts(small_result, path)
    doc = json.loads(path.read_text())
    doc["ghosts"][0]["id"] = 1000
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match="out of range"):
        load_export(path)


def test_export_write_failure_raises_io_error(small_result, tmp_path):
    with pytest.raises(IoError):
        export_ghosts(small_result, tmp_path)  # a directory, not a file
