import numpy as np
import pytest
from hypothesis import given, strategies as st

from text2plan.align import ConditionPlan, align_condition, condition_from_init, match_rooms
from text2plan.data import perturb_to_init, synth_generate
from text2plan.errors import EmptyConditionError
from text2plan.geometry import point_on_polyline
from text2plan.layout import InitRoom, LayoutInit
from text2plan.rooms import RoomType


def test_identity_rectangles(two_rooms):
    init = LayoutInit((InitRoom("Living Room", (8, 8), (120, 112), "right"),
                       InitRoom("Bedroom", (128, 8), (72, 112), "left")))
    cond = align_condition(two_rooms, init)
    for lp, cl in zip(two_rooms.rooms(), cond.rooms()):
        np.testing.assert_array_equal(cl[1].array(), lp[1].array())
    assert cond.structure() == [(lp.room_type, len(lp)) for lp in two_rooms.loops]


def test_order_invariant(six_room_plans):
    plan = six_room_plans[0]
    init = perturb_to_init(plan, 8, 3)
    a = align_condition(plan, init)
    b = align_condition(plan, LayoutInit(tuple(reversed(init.rooms))))
    for la, lb in zip(a.loops, b.loops):
        np.testing.assert_array_equal(la.array(), lb.array())


def test_l_room_on_perimeter(l_room):
    init = LayoutInit((InitRoom("Living Room", (20, 30), (80, 60)),))
    cond = align_condition(l_room, init)
    pts = cond.loops[0].array()
    assert len(pts) == 6
    rect = np.array([[20, 30], [100, 30], [100, 90], [20, 90]], float)
    assert all(point_on_polyline(p, rect) for p in pts)
    np.testing.assert_allclose(pts[0], [20, 30])


def test_unmatched_room_gets_centroid(two_rooms):
    init = LayoutInit((InitRoom("Living Room", (8, 8), (120, 112)),))
    cond = align_condition(two_rooms, init)
    np.testing.assert_allclose(cond.loops[1].array(), np.repeat([[164.0, 64.0]], 4, axis=0))


def test_empty_init(two_rooms):
    with pytest.raises(EmptyConditionError) as e:
        align_condition(two_rooms, [])
    assert e.value.code == "E_EMPTY_CONDITION"


def test_match_rooms_prefers_type():
    t = [RoomType.Kitchen, RoomType.Bedroom]
    c = np.array([[0, 0], [100, 100]])
    assert match_rooms(t, c, t[::-1], c) == [(0, 1), (1, 0)]


def test_condition_from_init():
    init = LayoutInit((InitRoom("Kitchen", (10, 10), (50, 40), "up"),))
    plan, cond = condition_from_init(init)
    assert isinstance(cond, ConditionPlan) and len(cond) == len(plan) == 2


@given(st.integers(0, 5000), st.sampled_from([5, 6, 7, 8]), st.integers(0, 16))
def test_structure_preserved(seed, n, jitter):
    plan = synth_generate(1, n, seed)[0]
    rooms = list(perturb_to_init(plan, jitter, seed).rooms)
    keep = rooms[: max(1, len(rooms) - seed % 3)]  # some targets left unmatched
    cond = align_condition(plan, keep)
    assert cond.structure() == [(lp.room_type, len(lp)) for lp in plan.loops]
    assert all(np.isfinite(lp.array()).all() for lp in cond.loops)
