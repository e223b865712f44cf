"""Pixel IoU between floorplans at the 256 grid resolution."""
from __future__ import annotations

import numpy as np

from ..align import match_rooms
from ..errors import EmptyError
from ..geometry import Floorplan
from ..raster import room_masks


def _rooms(plan: Floorplan):
    rooms = plan.rooms()
    if not rooms:
        raise EmptyError("floorplan has no rooms")
    return rooms


def micro_iou(pred: Floorplan, target: Floorplan, resolution: int = 256) -> float:
    """Summed intersection over summed union across matched rooms; unmatched rooms add their area to the union."""
    pr, tr = _rooms(pred), _rooms(target)
    pm, tm = room_masks(pred, resolution), room_masks(target, resolution)
    pairs = match_rooms([lp.room_type for _, lp in pr], np.array([lp.centroid() for _, lp in pr]),
                        [lp.room_type for _, lp in tr], np.array([lp.centroid() for _, lp in tr]))
    inter = union = 0
    used_p, used_t = set(), set()
    for a, b in pairs:
        p, t = pm[pr[a][0]], tm[tr[b][0]]
        inter += int((p & t).sum())
        union += int((p | t).sum())
        used_p.add(a)
        used_t.add(b)
    union += sum(int(pm[i].sum()) for k, (i, _) in enumerate(pr) if k not in used_p)
    union += sum(int(tm[i].sum()) for k, (i, _) in enumerate(tr) if k not in used_t)
    return inter / union if union else 0.0


def _type_masks(plan: Floorplan, resolution: int) -> dict:
    out = {}
    for i, m in room_masks(plan, resolution).items():
        t = plan.loops[i].room_type
        out[t] = out[t] | m if t in out else m.copy()
    return out


def per_type_iou(pred: Floorplan, target: Floorplan, resolution: int = 256) -> dict:
    _rooms(pred), _rooms(target)
    pm, tm = _type_masks(pred, resolution), _type_masks(target, resolution)
    out = {}
    for t in sorted(set(pm) | set(tm)):
        if t in pm and t in tm:
            union = int((pm[t] | tm[t]).sum())
            out[t] = int((pm[t] & tm[t]).sum()) / union if union else 1.0
        else:
            out[t] = 0.0
    return out


def macro_iou(pred: Floorplan, target: Floorplan, resolution: int = 256) -> float:
    """Unweighted mean over room types of the IoU of each type's pixel union."""
    vals = per_type_iou(pred, target, resolution)
    return float(np.mean(list(vals.values())))
