"""Layout-Init: the coarse JSON room layout produced by the language-model stage."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import SchemaError
from .geometry import GRID_MAX, Floorplan, Loop, rect_loop
from .rooms import RoomType, room_type_from_name

DIRECTIONS = ("up", "down", "left", "right")
ROOM_KEYS = ("name", "style", "position", "size", "door")


@dataclass(frozen=True)
class InitRoom:
    name: str
    position: tuple[int, int]
    size: tuple[int, int]
    door: str = "up"
    style: str = "modern"

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(int(v) for v in self.position))
        object.__setattr__(self, "size", tuple(int(v) for v in self.size))
        (x, y), (w, h) = self.position, self.size
        if self.door not in DIRECTIONS:
            raise SchemaError(f"door direction {self.door!r} not in {DIRECTIONS}")
        if w < 1 or h < 1:
            raise SchemaError(f"room {self.name!r} has non-positive size {self.size}")
        if x < 0 or y < 0 or x + w > GRID_MAX or y + h > GRID_MAX:
            raise SchemaError(f"room {self.name!r} leaves the grid: position {self.position}, size {self.size}")

    @property
    def room_type(self) -> RoomType:
        return room_type_from_name(self.name)

    @property
    def rect(self) -> tuple[int, int, int, int]:
        (x, y), (w, h) = self.position, self.size
        return x, y, x + w, y + h

    def to_dict(self) -> dict:
        return {"name": self.name, "style": self.style, "position": list(self.position),
                "size": list(self.size), "door": self.door}


@dataclass(frozen=True)
class LayoutInit:
    rooms: tuple[InitRoom, ...] = field(default_factory=tuple)

    def __post_init__(self):
        rooms = tuple(self.rooms)
        object.__setattr__(self, "rooms", rooms)
        if not rooms:
            raise SchemaError("layout has no rooms")
        names = [r.name for r in rooms]
        if len(set(names)) != len(names):
            raise SchemaError(f"room names not unique: {names}")

    def to_dict(self) -> dict:
        return {"rooms": [r.to_dict() for r in self.rooms]}

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def unique_names(names: list[str]) -> list[str]:
    """Suffix repeated names: ``Bedroom, Bedroom`` -> ``Bedroom, Bedroom 2``."""
    seen: dict[str, int] = {}
    taken = set(names)
    out = []
    for n in names:
        if n not in seen:
            seen[n] = 1
            out.append(n)
            continue
        k = seen[n] + 1
        while f"{n} {k}" in taken:
            k += 1
        seen[n] = k
        taken.add(f"{n} {k}")
        out.append(f"{n} {k}")
    return out


def door_segment(rect: tuple[int, int, int, int], direction: str) -> tuple[tuple[int, int], tuple[int, int]]:
    """Door stub covering the centered fifth of the named wall."""
    x0, y0, x1, y1 = rect

    def span(a, b):
        s, e = round(a + 2 * (b - a) / 5), round(a + 3 * (b - a) / 5)
        if e <= s:
            e = min(s + 1, b) if s < b else s
            if e == s:
                s = max(a, s - 1)
        return s, e

    if direction in ("up", "down"):
        s, e = span(x0, x1)
        y = y0 if direction == "up" else y1
        return (s, y), (e, y)
    s, e = span(y0, y1)
    x = x0 if direction == "left" else x1
    return (x, s), (x, e)


def init_to_floorplan(init: LayoutInit) -> Floorplan:
    """One rectangle per room, followed by one interior-door stub per room."""
    rooms, doors = [], []
    for r in init.rooms:
        rtype = r.room_type
        rooms.append(rect_loop(*r.rect, rtype))
        a, b = door_segment(r.rect, r.door)
        if a != b:
            doors.append(Loop((a, b), RoomType.InteriorDoor))
    return Floorplan(tuple(rooms + doors))
