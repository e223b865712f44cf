"""Floorplan data model and the JSONL interchange format."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .rooms import RoomType

GRID_MAX = 255
MAX_LOOPS = 32
MAX_CORNERS = 32

Point = tuple[int, int]


@dataclass(frozen=True)
class Loop:
    corners: tuple[Point, ...]
    room_type: RoomType

    def __post_init__(self):
        corners = tuple((int(x), int(y)) for x, y in self.corners)
        object.__setattr__(self, "corners", corners)
        object.__setattr__(self, "room_type", RoomType(self.room_type))
        n = len(corners)
        if not 1 <= n <= MAX_CORNERS:
            raise ValidationError(f"loop has {n} corners, need 1..{MAX_CORNERS}")
        for x, y in corners:
            if not (0 <= x <= GRID_MAX and 0 <= y <= GRID_MAX):
                raise ValidationError(f"corner ({x}, {y}) outside [0, {GRID_MAX}]")
        if n > 1:
            for j in range(n):
                if corners[j] == corners[(j + 1) % n]:
                    raise ValidationError(f"consecutive corners coincide at index {j}")

    def __len__(self):
        return len(self.corners)

    @property
    def is_door(self) -> bool:
        return self.room_type.is_door

    def array(self) -> np.ndarray:
        return np.asarray(self.corners, dtype=np.float64)

    def centroid(self) -> np.ndarray:
        """Area centroid; falls back to the vertex mean for zero-area loops."""
        pts = self.array()
        if len(pts) < 3:
            return pts.mean(axis=0)
        x, y = pts[:, 0], pts[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        area = cross.sum() / 2.0
        if abs(area) < 1e-9:
            return pts.mean(axis=0)
        cx = ((x + xn) * cross).sum() / (6.0 * area)
        cy = ((y + yn) * cross).sum() / (6.0 * area)
        return np.array([cx, cy])

    def bbox(self) -> tuple[int, int, int, int]:
        xs = [c[0] for c in self.corners]
        ys = [c[1] for c in self.corners]
        return min(xs), min(ys), max(xs), max(ys)

    def area(self) -> float:
        pts = self.array()
        x, y = pts[:, 0], pts[:, 1]
        return abs(float((x * np.roll(y, -1) - np.roll(x, -1) * y).sum())) / 2.0


@dataclass(frozen=True)
class Floorplan:
    loops: tuple[Loop, ...]

    def __post_init__(self):
        loops = tuple(self.loops)
        object.__setattr__(self, "loops", loops)
        if not 1 <= len(loops) <= MAX_LOOPS:
            raise ValidationError(f"floorplan has {len(loops)} loops, need 1..{MAX_LOOPS}")
        if all(lp.is_door for lp in loops):
            raise ValidationError("floorplan needs at least one non-door loop")

    def __len__(self):
        return len(self.loops)

    def rooms(self) -> list[tuple[int, Loop]]:
        return [(i, lp) for i, lp in enumerate(self.loops) if not lp.is_door]

    def doors(self) -> list[tuple[int, Loop]]:
        return [(i, lp) for i, lp in enumerate(self.loops) if lp.is_door]

    @property
    def room_count(self) -> int:
        return sum(1 for lp in self.loops if not lp.is_door)

    def structure(self) -> list[tuple[RoomType, int]]:
        return [(lp.room_type, len(lp)) for lp in self.loops]

    def to_dict(self) -> dict:
        return {"rooms": [{"type": lp.room_type.label, "loop": [list(c) for c in lp.corners]}
                          for lp in self.loops]}

    @classmethod
    def from_dict(cls, d: dict) -> "Floorplan":
        try:
            rooms = d["rooms"]
            loops = [Loop(tuple(tuple(c) for c in r["loop"]), RoomType.from_label(r["type"]))
                     for r in rooms]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed floorplan record: {exc}") from None
        return cls(tuple(loops))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Floorplan":
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ValidationError("record is not a JSON object")
        return cls.from_dict(d)


def rect_loop(x0: int, y0: int, x1: int, y1: int, room_type: RoomType) -> Loop:
    """Axis-aligned rectangle, top-left corner first, clockwise in image coordinates."""
    return Loop(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), room_type)


def write_jsonl(path, plans: Iterable[Floorplan]) -> None:
    with open(path, "w") as fh:
        for p in plans:
            fh.write(p.to_json() + "\n")


def perimeter_points(poly: np.ndarray, n: int) -> np.ndarray:
    """``n`` points along the closed polyline ``poly``, starting at ``poly[0]``.

    With ``n >= len(poly)`` every vertex is kept and the extra points are spread
    over the edges in proportion to their length (largest remainder); otherwise
    the points are spaced evenly by arc length.
    """
    poly = np.asarray(poly, dtype=np.float64)
    m = len(poly)
    if m == 1:
        return np.repeat(poly, n, axis=0)
    nxt = np.roll(poly, -1, axis=0)
    seg = np.linalg.norm(nxt - poly, axis=1)
    total = seg.sum()
    if total <= 0:
        return np.repeat(poly[:1], n, axis=0)
    if n >= m:
        share = (n - m) * seg / total
        extra = np.floor(share).astype(int)
        order = sorted(range(m), key=lambda i: (-(share[i] - extra[i]), i))
        for i in order[: n - m - extra.sum()]:
            extra[i] += 1
        out = []
        for i in range(m):
            for k in range(extra[i] + 1):
                out.append(poly[i] + k / (extra[i] + 1) * (nxt[i] - poly[i]))
        return np.array(out)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    out = np.empty((n, 2))
    for k in range(n):
        s = total * k / n
        i = min(int(np.searchsorted(cum, s, side="right")) - 1, m - 1)
        while seg[i] == 0:
            i += 1
        frac = (s - cum[i]) / seg[i]
        out[k] = poly[i] + frac * (nxt[i] - poly[i])
    return out


def point_on_polyline(pt: Sequence[float], poly: np.ndarray, tol: float = 1e-6) -> bool:
    """True when ``pt`` lies on the closed polyline ``poly``."""
    p = np.asarray(pt, dtype=np.float64)
    a = np.asarray(poly, dtype=np.float64)
    b = np.roll(a, -1, axis=0)
    for u, v in zip(a, b):
        d = v - u
        L2 = d @ d
        t = 0.0 if L2 == 0 else float(np.clip((p - u) @ d / L2, 0, 1))
        if np.linalg.norm(u + t * d - p) <= tol:
            return True
    return False


def separate_corners(corners: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Move corners by one grid unit until no two consecutive corners coincide."""
    pts = list(corners)
    n = len(pts)
    if n < 2:
        return pts
    for _ in range(8 * n):
        clash = [j for j in range(n) if pts[j] == pts[(j + 1) % n]]
        if not clash:
            return pts
        k = (clash[0] + 1) % n
        x, y = pts[k]
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)):
            c = (x + dx, y + dy)
            if 0 <= c[0] <= GRID_MAX and 0 <= c[1] <= GRID_MAX and c != pts[k - 1] and c != pts[(k + 1) % n]:
                pts[k] = c
                break
    return pts
