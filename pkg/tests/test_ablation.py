import math

import pytest

from text2plan.ablation import (CONDITIONING_COLUMNS, RATE_COLUMNS, RATES, RowSpec, ablation_harness,
                                control_gap, read_table, write_tables)
from text2plan.errors import FloorplanError
from text2plan.experiments import ToySetup, make_samples

TINY = ToySetup(T=16, d_model=16, heads=2, blocks=1, steps=3, batch_size=2, room_count=3)


def fake_runner(fail=None, calls=None):
    def run(spec, train_set, test_set, setup, fx):
        if calls is not None:
            calls.append(spec.key)
        if spec == fail:
            raise FloorplanError("boom")
        v = 0.1 * spec.forward + 0.2 * spec.reverse + spec.rate
        return {"Diversity": v, "Compatibility": 1 + v, "Macro IoU": 0.5 + v, "Micro IoU": 0.6 + v}
    return run


def test_structure():
    res = ablation_harness([], [], TINY, fx=object(), runner=fake_runner())
    assert [(r.spec.forward, r.spec.reverse) for r in res.conditioning] == [(True, False), (False, True),
                                                                           (True, True)]
    assert [r.spec.rate for r in res.rates] == list(RATES)
    assert res.control.spec == RowSpec(True, True, 0.0)
    assert res.reference is res.conditioning[1]
    assert all(r.ok for r in res.rows)


def test_rows_are_cached():
    calls = []
    ablation_harness([], [], TINY, fx=object(), runner=fake_runner(calls=calls))
    assert len(calls) == len(set(calls)) == 6  # the (on, on, 1e-1) row is shared


def test_failing_row_is_isolated(tmp_path):
    bad = RowSpec(True, False, 1e-1)
    res = ablation_harness([], [], TINY, fx=object(), runner=fake_runner(fail=bad))
    assert not res.conditioning[0].ok and "boom" in res.conditioning[0].status
    assert sum(r.ok for r in res.rows) == len(res.rows) - 1
    rows = read_table(write_tables(res, tmp_path)["conditioning"])
    assert rows[0]["Micro IoU"] == "NA"
    assert rows[0]["Status"].startswith("error")
    assert rows[1]["Status"] == "ok"


def test_tables_roundtrip(tmp_path):
    res = ablation_harness([], [], TINY, fx=object(), runner=fake_runner())
    paths = write_tables(res, tmp_path)
    assert set(paths) == {"conditioning", "rates", "control"}
    cond = read_table(paths["conditioning"])
    assert tuple(cond[0]) == CONDITIONING_COLUMNS
    assert [(r["Forward"], r["Reverse"]) for r in cond] == [("yes", "no"), ("no", "yes"), ("yes", "yes")]
    assert float(cond[2]["Micro IoU"]) == pytest.approx(0.6 + 0.3 + 0.1)
    rates = read_table(paths["rates"])
    assert tuple(rates[0]) == RATE_COLUMNS
    assert [r["Rate"] for r in rates] == ["1e-01", "1e-02", "1e-03"]
    ctrl = read_table(paths["control"])
    assert [r["Role"] for r in ctrl] == ["control", "reverse-only"]
    assert ctrl[0]["Rate"] == "0"


def test_control_gap_infinite_on_failure():
    res = ablation_harness([], [], TINY, fx=object(), runner=fake_runner(fail=RowSpec(True, True, 0.0)))
    assert math.isinf(control_gap(res))


def test_real_rows_control_matches_reverse_only():
    train_set = make_samples(4, 3, 0, 4)
    test_set = make_samples(3, 3, 1, 4)
    res = ablation_harness(train_set, test_set, TINY)
    assert all(r.ok for r in res.rows), [r.status for r in res.rows]
    assert set(res.control.metrics) == {"Diversity", "Compatibility", "Macro IoU", "Micro IoU"}
    # with a zero rate the forward offset vanishes, so the control runs the reverse-only computation
    assert control_gap(res) == 0.0
