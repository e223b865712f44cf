import json
import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from text2plan.align import align_condition
from text2plan.data import (REGION, Sample, SplitSpec, build_pairs, load_corpus, load_pairs, perturb_to_init,
                            save_pairs, split, synth_generate)
from text2plan.errors import CorpusIOError
from text2plan.geometry import Floorplan, write_jsonl
from text2plan.layout import init_to_floorplan
from text2plan.llm import MockClient, build_prompt, load_demos
from text2plan.llm.frontend import describe_prompt
from text2plan.raster import rasterize, room_masks
from text2plan.rooms import RoomType


def test_load_corpus(tmp_path, two_rooms, l_room):
    path = tmp_path / "a.jsonl"
    write_jsonl(path, [two_rooms, l_room, two_rooms])
    assert len(load_corpus(path)) == 3 and not load_corpus(path).skipped
    lines = path.read_text().splitlines()
    lines[1] = '{"rooms": [{"type": "LivingRoom", "loop": [[0, 0], [999, 0], [0, 5]]}]}'
    path.write_text("\n".join(lines) + "\n")
    c = load_corpus(path)
    assert len(c) == 2 and len(c.skipped) == 1 and c.skipped[0][1] == 2


def test_load_corpus_dir_and_empty(tmp_path, two_rooms, caplog):
    write_jsonl(tmp_path / "b.jsonl", [two_rooms])
    (tmp_path / "a.jsonl").write_text("")
    assert len(load_corpus(tmp_path)) == 1
    with caplog.at_level(logging.WARNING):
        assert load_corpus(tmp_path / "a.jsonl") == []
    assert "empty" in caplog.text
    with pytest.raises(CorpusIOError) as e:
        load_corpus(tmp_path / "missing")
    assert e.value.code == "E_IO"


def test_two_rooms_single_split():
    plan = synth_generate(1, 2, 0)[0]
    rooms = [lp for _, lp in plan.rooms()]
    assert len(rooms) == 2 and len(plan.doors()) == 1
    a, b = (lp.bbox() for lp in rooms)
    shared_x = a[2] == b[0] or b[2] == a[0]
    shared_y = a[3] == b[1] or b[3] == a[1]
    assert shared_x != shared_y
    if shared_x:
        assert (a[1], a[3]) == (b[1], b[3])
    else:
        assert (a[0], a[2]) == (b[0], b[2])


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.integers(2, 10))
def test_tiling(seed, n):
    plan = synth_generate(1, n, seed)[0]
    res = 239  # one pixel per grid unit over the region
    x0, y0, x1, y1 = REGION
    masks = room_masks(plan, 256)
    stack = np.sum([m for m in masks.values()], axis=0)
    cx = (np.arange(256) + 0.5)
    inside = (cx[None, :] > x0) & (cx[None, :] < x1) & (cx[:, None] > y0) & (cx[:, None] < y1)
    assert (stack[inside] == 1).all() and (stack[~inside] == 0).all()
    assert inside.sum() == res * res
    types = [lp.room_type for _, lp in plan.rooms()]
    assert types.count(RoomType.LivingRoom) == 1
    assert len(plan.doors()) == n - 1
    assert all(min(lp.bbox()[2] - lp.bbox()[0], lp.bbox()[3] - lp.bbox()[1]) >= 24 for _, lp in plan.rooms())


def test_generator_deterministic():
    assert synth_generate(3, 6, 5) == synth_generate(3, 6, 5)
    assert synth_generate(3, 6, 5) != synth_generate(3, 6, 6)
    with pytest.raises(ValueError):
        synth_generate(1, 11, 0)


def test_perturb_identity(six_room_plans):
    plan = six_room_plans[0]
    init = perturb_to_init(plan, 0, 0)
    back = init_to_floorplan(init)
    assert [lp.bbox() for _, lp in back.rooms()] == [lp.bbox() for _, lp in plan.rooms()]
    assert [r.room_type for r in init.rooms] == [lp.room_type for _, lp in plan.rooms()]


@given(st.integers(0, 10_000))
def test_perturb_bound(seed):
    plan = synth_generate(1, 6, seed % 50)[0]
    init = perturb_to_init(plan, 8, seed)
    for r, (_, lp) in zip(init.rooms, plan.rooms()):
        x0, y0, x1, y1 = lp.bbox()
        rx0, ry0, rx1, ry1 = r.rect
        assert max(abs(rx0 - x0), abs(ry0 - y0)) <= 8
        assert max(abs((rx1 - rx0) - (x1 - x0)), abs((ry1 - ry0) - (y1 - y0))) <= 8


def test_perturb_l_room(l_room):
    init = perturb_to_init(l_room, 0, 0)
    assert init.rooms[0].rect == (10, 10, 100, 100)


def test_door_direction_faces_neighbour(two_rooms):
    init = perturb_to_init(two_rooms, 0, 0)
    assert [r.door for r in init.rooms] == ["right", "left"]


def test_build_pairs_perturb(six_room_plans):
    pairs = build_pairs(six_room_plans, "perturb", seed=1)
    assert len(pairs) == len(six_room_plans) and pairs.fallbacks == 0
    for s in pairs:
        align_condition(s.target, s.condition_init)


def _llm_client(plans, demos, bad):
    client = MockClient()
    for k, plan in enumerate(plans):
        text = f"house number {k}"
        client.add(describe_prompt(plan), text)
        init = perturb_to_init(plan, 0, k)
        reply = "I refuse." if k in bad else init.to_json()
        client.add(build_prompt(demos, text).messages(), reply)
    return client


def test_build_pairs_llm_and_fallback():
    demos = load_demos()
    plans = synth_generate(10, 5, 3)
    pairs = build_pairs(plans, "llm", _llm_client(plans, demos, {2, 7}), demos, max_retries=0)
    assert len(pairs) == 10 and pairs.fallbacks == 2
    assert pairs[0].description == "house number 0"
    assert pairs[0].condition_init == perturb_to_init(plans[0], 0, 0)
    assert pairs[2].description is None
    with pytest.raises(Exception) as e:
        build_pairs(plans, "llm", _llm_client(plans, demos, {2}), demos, max_retries=0, fallback=False)
    assert e.value.code == "E_GENERATION_FAILED"


def test_pairs_file_roundtrip(tmp_path, six_room_samples):
    path = tmp_path / "pairs.jsonl"
    save_pairs(path, six_room_samples)
    back = load_pairs(path)
    assert [s.target for s in back] == [s.target for s in six_room_samples]
    assert [s.condition_init for s in back] == [s.condition_init for s in six_room_samples]
    rec = json.loads(path.read_text().splitlines()[0])
    assert set(rec) == {"rooms", "init", "description"}


def test_split():
    plans = synth_generate(100, 6, 0)
    parts = split(plans, SplitSpec(room_counts=(6,), seed=3))
    train, test = parts[6]
    assert len(train) == 80 and len(test) == 20
    assert not {id(p) for p in train} & {id(p) for p in test}
    again = split(plans, SplitSpec(room_counts=(6,), seed=3))[6]
    assert again[0] == train


def test_split_groups():
    plans = [p for n in (5, 6, 7, 8) for p in synth_generate(5, n, n)]
    parts = split(plans, SplitSpec())
    assert sorted(parts) == [5, 6, 7, 8]
    for n, (tr, te) in parts.items():
        assert all(p.room_count == n for p in tr + te) and len(tr) + len(te) == 5
    assert split(plans, SplitSpec(room_counts=(9,)))[9] == ([], [])
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=0.7, test_fraction=0.2)
