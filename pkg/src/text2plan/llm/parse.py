"""Extraction, validation and bounded repair of Layout-Init JSON."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from ..errors import NoJSONError, SchemaError, UnknownTypeError
from ..geometry import GRID_MAX
from ..layout import DIRECTIONS, ROOM_KEYS, InitRoom, LayoutInit, unique_names
from ..rooms import RoomType, room_type_from_name

KNOWN_KEYS = set(ROOM_KEYS) | {"type"}


@dataclass(frozen=True)
class Repair:
    room: int
    field: str
    before: Any
    after: Any

    def __str__(self):
        return f"room {self.room}: {self.field} {self.before!r} -> {self.after!r}"


def extract_json_object(raw: str) -> dict:
    """First balanced ``{...}`` in ``raw`` that decodes to a JSON object."""
    start = raw.find("{")
    while start != -1:
        depth = 0
        in_str = esc = False
        for k in range(start, len(raw)):
            ch = raw[k]
            if in_str:
                if esc:
                    esc = False
                elif ch == "\\":
                    esc = True
                elif ch == '"':
                    in_str = False
            elif ch == '"':
                in_str = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(raw[start:k + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
        start = raw.find("{", start + 1)
    raise NoJSONError("no JSON object found in model output")


def _unwrap(v):
    # single-element list wrappers: ["Bedroom"], [[10, 20]]
    while isinstance(v, list) and len(v) == 1:
        v = v[0]
    return v


def _pair(v, room: int, field: str, keys: tuple[str, str]):
    v = _unwrap(v)
    if isinstance(v, dict):
        lower = {str(k).lower(): val for k, val in v.items()}
        try:
            v = [lower[keys[0]], lower[keys[1]]]
        except KeyError:
            raise SchemaError(f"room {room}: {field} object needs keys {keys}") from None
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise SchemaError(f"room {room}: {field} must be a pair of numbers, got {v!r}")
    if not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v):
        raise SchemaError(f"room {room}: {field} must be numeric, got {v!r}")
    return [v[0], v[1]]


def layout_from_dict(obj: dict) -> tuple[LayoutInit, list[Repair]]:
    repairs: list[Repair] = []
    if "rooms" not in obj:
        inner = next((v for k, v in obj.items() if str(k).lower() == "house" and isinstance(v, dict)), None)
        if inner is None or "rooms" not in inner:
            raise SchemaError('top-level key "rooms" missing')
        repairs.append(Repair(-1, "House", "wrapped", "unwrapped"))
        obj = inner
    rooms = obj["rooms"]
    if not isinstance(rooms, list) or not rooms:
        raise SchemaError('"rooms" must be a non-empty list')

    parsed = []
    for i, r in enumerate(rooms):
        if not isinstance(r, dict):
            raise SchemaError(f"room {i} is not an object")
        for k in sorted(set(r) - KNOWN_KEYS, key=str):
            repairs.append(Repair(i, k, r[k], "dropped"))

        name = _unwrap(r.get("name"))
        try:
            if not isinstance(name, str):
                raise UnknownTypeError(f"room {i} has no name")
            room_type_from_name(name)
        except UnknownTypeError:
            hint = _unwrap(r.get("type"))
            rtype = None
            if isinstance(hint, str):
                try:
                    rtype = RoomType.from_label(hint)
                except UnknownTypeError:
                    try:
                        rtype = room_type_from_name(hint)
                    except UnknownTypeError:
                        pass
            if rtype is None:
                raise SchemaError(f"room {i}: name {name!r} maps to no room type") from None
            repairs.append(Repair(i, "name", name, rtype.label))
            name = rtype.label
        if "type" in r:
            repairs.append(Repair(i, "type", r["type"], "dropped"))

        style = _unwrap(r.get("style"))
        if not isinstance(style, str):
            repairs.append(Repair(i, "style", style, "modern"))
            style = "modern"

        door = _unwrap(r.get("door"))
        if not isinstance(door, str) or door.strip().lower() not in DIRECTIONS:
            raise SchemaError(f"room {i}: door {door!r} not one of {DIRECTIONS}")
        door = door.strip().lower()

        pos = _pair(r.get("position"), i, "position", ("x", "y"))
        size = _pair(r.get("size"), i, "size", ("width", "height"))
        ipos = [int(round(v)) for v in pos]
        isize = [int(round(v)) for v in size]
        # a room needs at least one unit of extent, so X and Y stop at 254
        clamped = [min(max(v, 0), GRID_MAX - 1) for v in ipos]
        if clamped != pos:
            repairs.append(Repair(i, "position", pos, clamped))
        fixed = [min(max(s, 1), GRID_MAX - p) for s, p in zip(isize, clamped)]
        if fixed != size:
            repairs.append(Repair(i, "size", size, fixed))
        parsed.append([name, style, clamped, fixed, door])

    names = unique_names([p[0] for p in parsed])
    for i, (p, n) in enumerate(zip(parsed, names)):
        if n != p[0]:
            repairs.append(Repair(i, "name", p[0], n))
    init = LayoutInit(tuple(InitRoom(n, tuple(p[2]), tuple(p[3]), p[4], p[1])
                            for n, p in zip(names, parsed)))
    return init, repairs


def parse_layout_init(raw: str) -> tuple[LayoutInit, list[Repair]]:
    """Parse model output into a Layout-Init plus the list of repairs applied."""
    return layout_from_dict(extract_json_object(raw))
