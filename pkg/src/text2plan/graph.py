"""Room-adjacency ("bubble") graphs extracted from floorplans."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Floorplan, Loop
from .rooms import RoomType

DEFAULT_EPS = 2.0


@dataclass(frozen=True)
class BubbleGraph:
    nodes: tuple[tuple[int, RoomType], ...]
    edges: frozenset[tuple[int, int]]
    # (door loop id, room loop id) incidences; used by relational attention masks
    door_links: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ids = {i for i, _ in self.nodes}
        for a, b in self.edges:
            if a == b or a not in ids or b not in ids or a > b:
                raise ValueError(f"bad edge ({a}, {b})")

    @property
    def node_ids(self) -> list[int]:
        return [i for i, _ in self.nodes]

    def neighbors(self, i: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == i:
                out.add(b)
            elif b == i:
                out.add(a)
        return out


def point_in_polygon(px, py, poly: np.ndarray) -> np.ndarray:
    """Even-odd rule, vectorized over points."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    inside = np.zeros(np.broadcast(px, py).shape, dtype=bool)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    for x1, y1, x2, y2 in zip(x, y, xn, yn):
        if y1 == y2:
            continue
        crosses = (y1 > py) != (y2 > py)
        xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < xint)
    return inside


def _segment_hits_box(p, q, box) -> bool:
    # Liang-Barsky clip of segment pq against the closed box
    x0, y0, x1, y1 = box
    t0, t1 = 0.0, 1.0
    d = q - p
    for pk, qk in ((-d[0], p[0] - x0), (d[0], x1 - p[0]), (-d[1], p[1] - y0), (d[1], y1 - p[1])):
        if pk == 0:
            if qk < 0:
                return False
            continue
        r = qk / pk
        if pk < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return False
    return True


def box_hits_loop(box, loop: Loop) -> bool:
    """Whether a closed axis-aligned box touches the closed region bounded by ``loop``."""
    pts = loop.array()
    nxt = np.roll(pts, -1, axis=0)
    for p, q in zip(pts, nxt):
        if _segment_hits_box(p, q, box):
            return True
    cx, cy = (box[0] + box[2]) / 2, (box[1] + box[3]) / 2
    return len(pts) >= 3 and bool(point_in_polygon(cx, cy, pts))


def _seg_dist(p1, p2, q1, q2) -> float:
    def pt_seg(p, a, b):
        d = b - a
        L2 = d @ d
        t = 0.0 if L2 == 0 else np.clip((p - a) @ d / L2, 0, 1)
        return np.linalg.norm(a + t * d - p)

    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    if orient(p1, p2, q1) * orient(p1, p2, q2) < 0 and orient(q1, q2, p1) * orient(q1, q2, p2) < 0:
        return 0.0
    return min(pt_seg(p1, q1, q2), pt_seg(p2, q1, q2), pt_seg(q1, p1, p2), pt_seg(q2, p1, p2))


def boundary_distance(a: Loop, b: Loop) -> float:
    pa, pb = a.array(), b.array()
    na, nb = np.roll(pa, -1, axis=0), np.roll(pb, -1, axis=0)
    return min(_seg_dist(p1, p2, q1, q2) for p1, p2 in zip(pa, na) for q1, q2 in zip(pb, nb))


def door_rooms(plan: Floorplan, door: Loop, eps: float = DEFAULT_EPS) -> list[int]:
    """Ids of the rooms touched by ``door``'s bounding box inflated by ``eps``."""
    x0, y0, x1, y1 = door.bbox()
    box = (x0 - eps, y0 - eps, x1 + eps, y1 + eps)
    return [i for i, lp in plan.rooms() if box_hits_loop(box, lp)]


def extract_bubble_graph(plan: Floorplan, eps: float = DEFAULT_EPS) -> BubbleGraph:
    rooms = plan.rooms()
    nodes = tuple((i, lp.room_type) for i, lp in rooms)
    edges: set[tuple[int, int]] = set()
    links: list[tuple[int, int]] = []
    doors = plan.doors()
    if doors:
        for d, door in doors:
            hit = door_rooms(plan, door, eps)
            links.extend((d, r) for r in hit)
            for k, a in enumerate(hit):
                for b in hit[k + 1:]:
                    edges.add((min(a, b), max(a, b)))
    else:
        for k, (a, la) in enumerate(rooms):
            for b, lb in rooms[k + 1:]:
                if boundary_distance(la, lb) <= eps:
                    edges.add((a, b))
    return BubbleGraph(nodes, frozenset(edges), tuple(links))
