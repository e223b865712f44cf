"""Structural alignment of a Layout-Init onto a target loop structure."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyConditionError
from .geometry import Floorplan, perimeter_points
from .graph import DEFAULT_EPS, door_rooms
from .layout import InitRoom, LayoutInit, door_segment
from .rooms import RoomType

TYPE_MISMATCH_COST = 1.0e4


@dataclass(frozen=True, eq=False)
class CondLoop:
    """Condition loop: float grid coordinates, repeated corners allowed."""

    corners: np.ndarray
    room_type: RoomType

    @property
    def is_door(self) -> bool:
        return self.room_type.is_door

    def __len__(self):
        return len(self.corners)

    def array(self) -> np.ndarray:
        return np.asarray(self.corners, dtype=np.float64)

    def bbox(self):
        a = self.array()
        return a[:, 0].min(), a[:, 1].min(), a[:, 0].max(), a[:, 1].max()

    def centroid(self) -> np.ndarray:
        return self.array().mean(axis=0)


@dataclass(frozen=True, eq=False)
class ConditionPlan:
    """Condition layout with the same loop count, types and corner counts as its target."""

    loops: tuple[CondLoop, ...]

    def __len__(self):
        return len(self.loops)

    def rooms(self):
        return [(i, lp) for i, lp in enumerate(self.loops) if not lp.is_door]

    def doors(self):
        return [(i, lp) for i, lp in enumerate(self.loops) if lp.is_door]

    def structure(self):
        return [(lp.room_type, len(lp)) for lp in self.loops]

    @classmethod
    def from_floorplan(cls, plan: Floorplan) -> "ConditionPlan":
        return cls(tuple(CondLoop(lp.array(), lp.room_type) for lp in plan.loops))


def match_rooms(types_a: Sequence[RoomType], cents_a: np.ndarray,
                types_b: Sequence[RoomType], cents_b: np.ndarray) -> list[tuple[int, int]]:
    """Minimum-cost pairing (type-mismatch penalty + centroid distance), as (a index, b index)."""
    if not len(types_a) or not len(types_b):
        return []
    ca = np.asarray(cents_a, dtype=np.float64).reshape(-1, 2)
    cb = np.asarray(cents_b, dtype=np.float64).reshape(-1, 2)
    cost = np.linalg.norm(ca[:, None, :] - cb[None, :, :], axis=-1)
    cost += TYPE_MISMATCH_COST * (np.asarray(types_a)[:, None] != np.asarray(types_b)[None, :])
    rows, cols = linear_sum_assignment(cost)
    return sorted(zip(rows.tolist(), cols.tolist()))


def _rect_corners(rect) -> np.ndarray:
    x0, y0, x1, y1 = rect
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)


def align_condition(target: Floorplan, init: LayoutInit | Sequence[InitRoom],
                    eps: float = DEFAULT_EPS) -> ConditionPlan:
    rooms_init = list(init.rooms if isinstance(init, LayoutInit) else init or ())
    if not rooms_init:
        raise EmptyConditionError("Layout-Init has no rooms to condition on")

    t_rooms = target.rooms()
    pairs = match_rooms([lp.room_type for _, lp in t_rooms],
                        np.array([lp.centroid() for _, lp in t_rooms]),
                        [r.room_type for r in rooms_init],
                        np.array([[r.position[0] + r.size[0] / 2, r.position[1] + r.size[1] / 2]
                                  for r in rooms_init]))
    matched = {t_rooms[a][0]: rooms_init[b] for a, b in pairs}

    out: list[CondLoop] = []
    for i, lp in enumerate(target.loops):
        n = len(lp)
        if not lp.is_door:
            if i in matched:
                pts = perimeter_points(_rect_corners(matched[i].rect), n)
            else:
                pts = np.repeat(lp.centroid()[None, :], n, axis=0)
        else:
            stubs = [np.array(door_segment(matched[r].rect, matched[r].door), dtype=np.float64)
                     for r in door_rooms(target, lp, eps) if r in matched]
            if stubs:
                c = lp.array().mean(axis=0)
                stub = min(stubs, key=lambda s: float(np.linalg.norm(s.mean(axis=0) - c)))
                pts = perimeter_points(stub, n)
            else:
                pts = np.repeat(lp.array().mean(axis=0)[None, :], n, axis=0)
        out.append(CondLoop(pts, lp.room_type))
    return ConditionPlan(tuple(out))


def condition_from_init(init: LayoutInit) -> tuple[Floorplan, ConditionPlan]:
    """Structure and condition for text-driven sampling: the init's own rectangles and door stubs."""
    from .layout import init_to_floorplan

    plan = init_to_floorplan(init)
    return plan, ConditionPlan.from_floorplan(plan)
