from pathlib import Path
from unittest.mock import mock_open, patch

import numpy as np

from tests.parsers.csv.common import assert_in_errors
from zoomlens.parsers.csv.predictions import (
    PredictionRow,
    predictions_from_csv,
    predictions_to_csv,
)

HEADER = "image_id,grade_true,p0,p1,p2,p3,p4,grade_pred\n"


def read(data):
    with patch("builtins.open", mock_open(read_data=HEADER + data)):
        return predictions_from_csv(Path())


def test_predictions_from_csv():
    rows, errors = read("p1_left,2,0.1,0.1,0.6,0.1,0.1,2\n")
    assert errors == []
    assert rows[0].image_id == "p1_left"
    assert rows[0].grade_true == 2
    assert rows[0].grade_pred == 2
    np.testing.assert_allclose(rows[0].probabilities, [0.1, 0.1, 0.6, 0.1, 0.1])


def test_predictions_from_csv_bad_rows():
    rows, errors = read(
        "a,2,0.1,0.1,0.6,0.1,0.1,9\nb,2,0.1,x,0.6,0.1,0.1,2\nc,0,1,0,0,0,0,0\n"
    )
    assert [r.image_id for r in rows] == ["c"]
    assert_in_errors("line 2 | not a valid prediction", errors)
    assert_in_errors("line 3 | not a valid prediction", errors)


def test_predictions_from_csv_missing_column():
    with patch("builtins.open", mock_open(read_data="image_id,grade_true\n")):
        rows, errors = predictions_from_csv(Path())
    assert rows == []
    assert_in_errors("Column 'p0' not found", errors)


def test_predictions_to_csv_keeps_full_precision(tmp_path):
    probabilities = np.array([0.1, 0.2, 0.3, 0.15, 0.25]) / 1.0000001
    predictions_to_csv(
        tmp_path / "predictions.csv", [PredictionRow("a", 1, probabilities, 2)]
    )
    rows, errors = predictions_from_csv(tmp_path / "predictions.csv")
    assert errors == []
    np.testing.assert_array_equal(rows[0].probabilities, probabilities)
