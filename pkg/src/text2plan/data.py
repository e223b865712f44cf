"""Corpora, synthetic guillotine floorplans, perturbed Layout-Inits and train/test splits."""
from __future__ import annotations

import glob
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .align import align_condition
from .errors import (ClientError, CorpusIOError, GenerationFailedError,
                     GenerationInfeasibleError, ValidationError)
from .geometry import GRID_MAX, Floorplan, Loop, rect_loop, separate_corners
from .graph import extract_bubble_graph
from .layout import InitRoom, LayoutInit, unique_names
from .rooms import RoomType

log = logging.getLogger(__name__)

REGION = (8, 8, 247, 247)
MIN_SIDE = 24
MIN_DOOR_OVERLAP = 12
MAX_DOOR_LEN = 16

# Room types after the single LivingRoom, in fill order, for room_count = 2..10.
FILL_ORDER = (RoomType.Kitchen, RoomType.Bathroom, RoomType.Bedroom, RoomType.Balcony,
              RoomType.Bedroom, RoomType.Bedroom, RoomType.Bathroom, RoomType.DiningRoom,
              RoomType.StudyRoom)
# Larger rank -> assigned to a larger rectangle.
SIZE_RANK = {RoomType.LivingRoom: 9, RoomType.Bedroom: 6, RoomType.DiningRoom: 5,
             RoomType.StudyRoom: 4, RoomType.Kitchen: 3, RoomType.Bathroom: 1, RoomType.Balcony: 0}


@dataclass(frozen=True, eq=False)
class Sample:
    target: Floorplan
    condition_init: LayoutInit
    description: str | None = None

    def to_dict(self) -> dict:
        d = self.target.to_dict()
        d["init"] = self.condition_init.to_dict()
        d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Sample":
        from .llm.parse import layout_from_dict

        init, _ = layout_from_dict(d["init"])
        return cls(Floorplan.from_dict(d), init, d.get("description"))


@dataclass(frozen=True)
class SplitSpec:
    room_counts: tuple[int, ...] = (5, 6, 7, 8)
    train_fraction: float = 0.8
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if abs(self.train_fraction + self.test_fraction - 1.0) > 1e-9:
            raise ValueError("train and test fractions must sum to 1")
        if any(not 1 <= c <= 32 for c in self.room_counts):
            raise ValueError("room counts must be within loop capacity")


class Corpus(list):
    """List of floorplans plus a record of skipped lines."""

    def __init__(self, plans=(), skipped=()):
        super().__init__(plans)
        self.skipped: list[tuple[str, int, str]] = list(skipped)


class Pairs(list):
    """List of samples plus the number of LLM pairs that fell back to perturbation."""

    def __init__(self, samples=(), fallbacks: int = 0):
        super().__init__(samples)
        self.fallbacks = fallbacks


def load_corpus(path) -> Corpus:
    """Read one JSONL file or every ``*.jsonl`` in a directory, skipping invalid records."""
    if os.path.isdir(path):
        files = sorted(glob.glob(os.path.join(path, "*.jsonl")))
    elif os.path.isfile(path):
        files = [path]
    else:
        raise CorpusIOError(f"cannot read corpus at {path!r}")
    out = Corpus()
    for fn in files:
        try:
            fh = open(fn)
        except OSError as exc:
            raise CorpusIOError(str(exc)) from exc
        with fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    out.append(Floorplan.from_json(line))
                except (ValidationError, ValueError) as exc:
                    log.warning("skipping %s:%d: %s", fn, lineno, exc)
                    out.skipped.append((fn, lineno, str(exc)))
    if not out and not out.skipped:
        log.warning("corpus at %s is empty", path)
    return out


def save_pairs(path, samples) -> None:
    with open(path, "w") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_dict(), separators=(",", ":")) + "\n")


def load_pairs(path) -> list[Sample]:
    with open(path) as fh:
        return [Sample.from_dict(json.loads(line)) for line in fh if line.strip()]


# -- synthetic generator -----------------------------------------------------

def _guillotine(rng: np.random.Generator, room_count: int):
    rects = [REGION]
    while len(rects) < room_count:
        splittable = [r for r in rects if r[2] - r[0] >= 2 * MIN_SIDE or r[3] - r[1] >= 2 * MIN_SIDE]
        if not splittable:
            return None
        areas = np.array([(r[2] - r[0]) * (r[3] - r[1]) for r in splittable], dtype=np.float64)
        r = splittable[rng.choice(len(splittable), p=areas / areas.sum())]
        w, h = r[2] - r[0], r[3] - r[1]
        axes = [a for a, s in (("x", w), ("y", h)) if s >= 2 * MIN_SIDE]
        if len(axes) == 2:
            axis = "x" if rng.random() < w / (w + h) else "y"
        else:
            axis = axes[0]
        rects.remove(r)
        if axis == "x":
            c = int(rng.integers(r[0] + MIN_SIDE, r[2] - MIN_SIDE + 1))
            rects += [(r[0], r[1], c, r[3]), (c, r[1], r[2], r[3])]
        else:
            c = int(rng.integers(r[1] + MIN_SIDE, r[3] - MIN_SIDE + 1))
            rects += [(r[0], r[1], r[2], c), (r[0], c, r[2], r[3])]
    return rects


def shared_wall(a, b):
    """Shared wall segment of two touching rectangles as ((x0, y0), (x1, y1)), or None."""
    if a[2] == b[0] or b[2] == a[0]:
        x = a[2] if a[2] == b[0] else a[0]
        lo, hi = max(a[1], b[1]), min(a[3], b[3])
        return ((x, lo), (x, hi)) if hi > lo else None
    if a[3] == b[1] or b[3] == a[1]:
        y = a[3] if a[3] == b[1] else a[1]
        lo, hi = max(a[0], b[0]), min(a[2], b[2])
        return ((lo, y), (hi, y)) if hi > lo else None
    return None


def _door_on(wall) -> Loop:
    (x0, y0), (x1, y1) = wall
    length = max(x1 - x0, y1 - y0)
    dl = max(2, min(MAX_DOOR_LEN, length // 2))
    if x0 == x1:
        s = y0 + (length - dl) // 2
        return Loop(((x0, s), (x0, s + dl)), RoomType.InteriorDoor)
    s = x0 + (length - dl) // 2
    return Loop(((s, y0), (s + dl, y0)), RoomType.InteriorDoor)


def _one_plan(rng: np.random.Generator, room_count: int) -> Floorplan | None:
    rects = _guillotine(rng, room_count)
    if rects is None:
        return None
    rects.sort(key=lambda r: (-(r[2] - r[0]) * (r[3] - r[1]), r))
    types = sorted(FILL_ORDER[:room_count - 1], key=lambda t: -SIZE_RANK[t])
    types = [RoomType.LivingRoom] + types

    n = len(rects)
    walls = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = shared_wall(rects[i], rects[j])
            if w is not None and max(w[1][0] - w[0][0], w[1][1] - w[0][1]) >= MIN_DOOR_OVERLAP:
                walls[(i, j)] = w
    # randomized Prim spanning tree rooted at the living room (index 0)
    in_tree = {0}
    tree = []
    while len(in_tree) < n:
        frontier = sorted(e for e in walls if (e[0] in in_tree) != (e[1] in in_tree))
        if not frontier:
            return None
        e = frontier[int(rng.integers(len(frontier)))]
        tree.append(e)
        in_tree.update(e)
    loops = [rect_loop(*r, t) for r, t in zip(rects, types)]
    loops += [_door_on(walls[e]) for e in sorted(tree)]
    return Floorplan(tuple(loops))


def synth_generate(n_samples: int, room_count: int, seed: int, max_retries: int = 100) -> list[Floorplan]:
    """Guillotine-split floorplans tiling ``REGION`` with a spanning tree of interior doors."""
    if not 2 <= room_count <= 10:
        raise ValueError("room_count must be in [2, 10]")
    out = []
    for k in range(n_samples):
        rng = np.random.default_rng([seed, room_count, k])
        for _ in range(max_retries):
            plan = _one_plan(rng, room_count)
            if plan is not None:
                out.append(plan)
                break
        else:
            raise GenerationInfeasibleError(f"no feasible {room_count}-room split after {max_retries} tries")
    return out


# -- Layout-Init derivation ---------------------------------------------------

def _facing_wall(bbox, point) -> str:
    x0, y0, x1, y1 = bbox
    px, py = point
    dists = {"up": abs(py - y0), "down": abs(py - y1), "left": abs(px - x0), "right": abs(px - x1)}
    return min(("up", "down", "left", "right"), key=lambda k: dists[k])


def door_directions(plan: Floorplan) -> dict[int, str]:
    """Per room, the wall facing its nearest door-connected neighbour ("up" if none)."""
    g = extract_bubble_graph(plan)
    door_of = {}
    for d, r in g.door_links:
        door_of.setdefault(r, []).append(d)
    out = {}
    for i, lp in plan.rooms():
        nbrs = sorted(g.neighbors(i))
        if not nbrs:
            out[i] = "up"
            continue
        c = lp.centroid()
        j = min(nbrs, key=lambda k: (float(np.linalg.norm(plan.loops[k].centroid() - c)), k))
        shared = [d for d in door_of.get(i, []) if d in door_of.get(j, [])]
        point = plan.loops[shared[0]].array().mean(axis=0) if shared else plan.loops[j].centroid()
        out[i] = _facing_wall(lp.bbox(), point)
    return out


def perturb_to_init(plan: Floorplan, jitter: int, seed: int) -> LayoutInit:
    """Bounding box of each room with position and size jittered by uniform integers in [-jitter, jitter]."""
    if jitter < 0:
        raise ValueError("jitter must be >= 0")
    rng = np.random.default_rng(seed)
    dirs = door_directions(plan)
    rooms = plan.rooms()
    names = unique_names([lp.room_type.label for _, lp in rooms])
    out = []
    for name, (i, lp) in zip(names, rooms):
        x0, y0, x1, y1 = lp.bbox()
        dx, dy, dw, dh = rng.integers(-jitter, jitter + 1, size=4)
        x = int(np.clip(x0 + dx, 0, GRID_MAX - 1))
        y = int(np.clip(y0 + dy, 0, GRID_MAX - 1))
        w = int(np.clip(x1 - x0 + dw, 1, GRID_MAX - x))
        h = int(np.clip(y1 - y0 + dh, 1, GRID_MAX - y))
        out.append(InitRoom(name, (x, y), (w, h), dirs[i]))
    return LayoutInit(tuple(out))


def build_pairs(plans, mode: str = "perturb", client=None, demos=None, jitter: int = 8,
                seed: int = 0, fallback: bool = True, max_retries: int = 2) -> Pairs:
    """Training pairs. ``llm`` mode describes each plan and asks the client for a Layout-Init."""
    if mode not in ("perturb", "llm"):
        raise ValueError(f"unknown pair mode {mode!r}")
    if mode == "llm" and (client is None or not demos):
        raise ValueError("llm mode needs a client and demos")
    out = Pairs()
    for k, plan in enumerate(plans):
        pseed = int(np.random.default_rng([seed, k]).integers(2**31))
        if mode == "llm":
            from .llm.frontend import describe_layout, generate_layout_init

            try:
                text = describe_layout(plan, client)
                init = generate_layout_init(text, demos, client, max_retries=max_retries)
                align_condition(plan, init)
                out.append(Sample(plan, init, text))
                continue
            except (GenerationFailedError, ClientError) as exc:
                if not fallback:
                    raise
                log.info("pair %d: LLM path failed (%s); using perturbation", k, exc)
                out.fallbacks += 1
        out.append(Sample(plan, perturb_to_init(plan, jitter, pseed)))
    return out


def split(samples, spec: SplitSpec) -> dict[int, tuple[list, list]]:
    """Partition samples by non-door room count; stable for a fixed seed."""
    groups: dict[int, list] = {c: [] for c in spec.room_counts}
    for s in samples:
        plan = s.target if isinstance(s, Sample) else s
        if plan.room_count in groups:
            groups[plan.room_count].append(s)
    out = {}
    for c, items in groups.items():
        if not items:
            log.warning("room-count group %d is empty", c)
            out[c] = ([], [])
            continue
        order = np.random.default_rng([spec.seed, c]).permutation(len(items))
        n_train = int(round(spec.train_fraction * len(items)))
        out[c] = ([items[i] for i in order[:n_train]], [items[i] for i in order[n_train:]])
    return out


def jitter_corners(plan: Floorplan, amount: int, seed: int) -> Floorplan:
    """Move every corner by independent uniform integers in [-amount, amount], clamped to the grid."""
    rng = np.random.default_rng(seed)
    loops = []
    for lp in plan.loops:
        pts = lp.array().astype(int) + rng.integers(-amount, amount + 1, size=(len(lp), 2))
        pts = np.clip(pts, 0, GRID_MAX)
        loops.append(Loop(tuple(separate_corners([(int(x), int(y)) for x, y in pts])), lp.room_type))
    return Floorplan(tuple(loops))
