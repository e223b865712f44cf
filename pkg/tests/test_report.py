import math

import pytest

from text2plan.data import jitter_corners, synth_generate
from text2plan.geometry import Floorplan, rect_loop
from text2plan.metrics import LABEL, FeatureExtractor, MetricReport, evaluate
from text2plan.rooms import RoomType


@pytest.fixture(scope="module")
def plans():
    return synth_generate(40, 6, 123)


def test_self_evaluation(plans):
    rep = evaluate(plans, plans, list(zip(plans, plans)))
    assert rep.micro_iou == 1.0 and rep.macro_iou == 1.0 and rep.compatibility == 0.0
    assert rep.diversity < 1e-6 and not rep.errors


def test_corruption_strictly_worse(plans):
    fx = FeatureExtractor()
    reps = {}
    for j in (4, 16):
        pred = [jitter_corners(p, j, 1000 + k) for k, p in enumerate(plans)]
        reps[j] = evaluate(pred, plans, list(zip(pred, plans)), fx)
    lo, hi = reps[4], reps[16]
    assert hi.micro_iou < lo.micro_iou and hi.macro_iou < lo.macro_iou
    assert hi.compatibility > lo.compatibility and hi.diversity > lo.diversity


def test_partial_report(plans):
    rep = evaluate(plans[:5], plans[5:10])
    assert rep.micro_iou is None and rep.compatibility is None
    assert rep.diversity is not None and rep.n_pairs == 0


def test_isolation(plans):
    big = Floorplan(tuple(rect_loop(16 * i, 0, 16 * i + 10, 10, RoomType.Bedroom) for i in range(13)))
    rep = evaluate(plans[:3], plans[:3], [(big, big)])
    assert rep.compatibility is None and rep.errors["compatibility"].startswith("E_TOO_LARGE")
    assert rep.micro_iou == 1.0
    rep2 = evaluate(plans[:1], plans[:1], shrinkage=False)
    assert rep2.diversity is None and LABEL in rep2.errors


def test_file_roundtrip(tmp_path, plans):
    rep = evaluate(plans[:4], plans[:4], list(zip(plans[:4], plans[4:8])))
    rep.extra["n_excluded"] = 2
    path = rep.write(tmp_path / "report.tsv")
    back = MetricReport.read(path)
    assert list(back)[:7] == ["micro_iou", "macro_iou", "compatibility", LABEL, "n_pairs", "n_pred", "n_target"]
    assert float(back["micro_iou"]) == rep.micro_iou
    assert back["n_excluded"] == "2" and back["config.fx_seed"] == "0"
    assert MetricReport().as_dict()["micro_iou"] is None
    none = MetricReport().write(tmp_path / "empty.tsv")
    assert MetricReport.read(none)["micro_iou"] == "NA"
    assert all(not isinstance(v, float) or math.isfinite(v) for v in rep.as_dict().values())
