import numpy as np
import pytest

from ghostmap.data import DataMatrix
from ghostmap.errors import DegenerateInput


def test_values_coerced_to_float64_contiguous():
    dm = DataMatrix([[1, 2], [3, 4], [5, 6]])
    assert dm.values.dtype == np.float64
    assert dm.values.flags["C_CONTIGUOUS"]
    assert dm.n_points == 3
    assert dm.n_dims == 2


def test_rejects_wrong_rank():
    with pytest.raises(ValueError):
        DataMatrix(np.zeros(5))
    with pytest.raises(ValueError):
        DataMatrix(np.zeros((2, 2, 2)))


def test_rejects_too_few_points():
    with pytest.raises(ValueError):
        DataMatrix(np.zeros((1, 3)))


def test_rejects_non_finite():
    with pytest.raises(DegenerateInput):
        DataMatrix([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(DegenerateInput):
        DataMatrix([[1.0, np.inf], [0.0, 1.0]])


def test_labels_validated():
    dm = DataMatrix(np.zeros((3, 2)), labels=[0, 1, 0], label_names=["a", "b"])
    assert dm.labels.dtype == np.int64
    with pytest.raises(ValueError):
        DataMatrix(np.zeros((3, 2)), labels=[0, 1])
    with pytest.raises(ValueError):
        DataMatrix(np.zeros((3, 2)), labels=[0, 1, 2], label_names=["a", "b"])
