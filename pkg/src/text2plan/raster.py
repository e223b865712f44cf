"""Pixel rasterization of floorplans on the 256-unit grid."""
from __future__ import annotations

import numpy as np

from .geometry import Floorplan
from .graph import point_in_polygon
from .rooms import NUM_ROOM_TYPES

BACKGROUND = -1
EXTENT = 256.0


def pixel_centers(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    c = (np.arange(resolution) + 0.5) * (EXTENT / resolution)
    return np.meshgrid(c, c)  # (xs, ys), row index = y


def rasterize(plan: Floorplan, resolution: int = 256, include_doors: bool = False) -> np.ndarray:
    """Label grid of loop ids (``-1`` for background); later loops win overlaps.

    Doors are skipped unless ``include_doors``; they are usually zero-area stubs anyway.
    """
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    xs, ys = pixel_centers(resolution)
    out = np.full((resolution, resolution), BACKGROUND, dtype=np.int32)
    for i, lp in enumerate(plan.loops):
        if lp.is_door and not include_doors:
            continue
        if len(lp) < 3:
            continue
        out[point_in_polygon(xs, ys, lp.array())] = i
    return out


def room_masks(plan: Floorplan, resolution: int = 256) -> dict[int, np.ndarray]:
    """Boolean mask per non-door loop, without overlap resolution."""
    xs, ys = pixel_centers(resolution)
    out = {}
    for i, lp in plan.rooms():
        if len(lp) < 3:
            out[i] = np.zeros((resolution, resolution), dtype=bool)
        else:
            out[i] = point_in_polygon(xs, ys, lp.array())
    return out


def type_channels(plan: Floorplan, resolution: int = 32) -> np.ndarray:
    """(25, R, R) one-hot room-type image built from ``rasterize``."""
    grid = rasterize(plan, resolution)
    out = np.zeros((NUM_ROOM_TYPES, resolution, resolution), dtype=np.float64)
    for i, lp in enumerate(plan.loops):
        out[int(lp.room_type)][grid == i] = 1.0
    return out
