import json

import numpy as np
import pytest

from zoomlens.exceptions import InvalidArgumentError
from zoomlens.metrics import MetricsReport, RecallCurve, head_metrics


def one_hot(grade):
    y = np.full(5, 0.01)
    y[grade] = 0.96
    return y


@pytest.fixture
def report():
    grades = [0, 1, 2, 3, 4, 0]
    preds = [0, 1, 2, 3, 4, 2]
    report = MetricsReport(sample_count=6, checkpoints=["model.zlt"])
    report.heads["C"] = head_metrics([one_hot(p) for p in preds], grades)
    report.box_recall = RecallCurve([(0.3, 0.8), (0.5, 0.6)])
    report.person_recall = RecallCurve([(0.3, 0.9), (0.5, 0.7)])
    return report


class TestHeadMetrics:
    def test_values(self, report):
        head = report.heads["C"]
        assert head.kappa < 1.0
        assert head.referable.accuracy == pytest.approx(5 / 6)
        assert head.normal.accuracy == pytest.approx(5 / 6)
        # the grade-0 image predicted as 2 ties with every abnormal one
        assert head.normal.auc == 0.75

    def test_one_class_leaves_auc_empty(self):
        head = head_metrics([one_hot(3), one_hot(4)], [3, 4])
        assert head.referable.auc is None
        assert head.referable.sensitivity is None
        assert head.referable.accuracy == 1.0


class TestMetricsReport:
    def test_json_round_trip(self, report):
        restored = MetricsReport.from_json(report.to_json())
        assert restored == report

    def test_json_is_plain(self, report):
        data = json.loads(report.to_json())
        assert data["sample_count"] == 6
        assert data["heads"]["C"]["normal"]["auc"] == 0.75

    def test_write(self, report, tmp_path):
        report.write(tmp_path / "metrics.json", tmp_path / "curves.csv")
        lines = (tmp_path / "curves.csv").read_text().splitlines()
        assert lines[0] == "threshold,box_recall,person_recall"
        assert lines[1] == "0.3,0.8,0.9"
        assert MetricsReport.from_json((tmp_path / "metrics.json").read_text()) == report

    def test_table_rows(self, report):
        rows = report.table_rows()
        assert rows[0][0] == "C"
        assert len(rows[0]) == 8

    def test_kappa_of_missing_head_raises(self, report):
        with pytest.raises(InvalidArgumentError):
            report.kappa("M")
