"""Per-corner token sequences for the denoiser."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import normalize
from .errors import CapacityError, ShapeError
from .geometry import MAX_CORNERS, MAX_LOOPS

PAD_LENGTHS = (4, 8, 16, 32)


def pad_length(n: int) -> int:
    for p in PAD_LENGTHS:
        if n <= p:
            return p
    raise CapacityError(f"loop with {n} corners exceeds {MAX_CORNERS}")


@dataclass(frozen=True, eq=False)
class TokenSequence:
    coords: np.ndarray        # (L, 2) diffusion space
    cond_coords: np.ndarray   # (L, 2) diffusion space
    room_index: np.ndarray    # (L,) loop index
    corner_index: np.ndarray  # (L,)
    room_type: np.ndarray     # (L,) RoomType ids
    pad_mask: np.ndarray      # (L,) True for padding
    next_index: np.ndarray    # (L,) token index of the next corner in the same loop

    def __len__(self):
        return len(self.pad_mask)

    @property
    def valid(self) -> np.ndarray:
        return ~self.pad_mask

    def loop_slices(self) -> list[np.ndarray]:
        """Token indices (unpadded) of each loop, in loop order."""
        n_loops = int(self.room_index[self.valid].max()) + 1 if self.valid.any() else 0
        return [np.flatnonzero(self.valid & (self.room_index == i)) for i in range(n_loops)]

    def with_coords(self, coords: np.ndarray) -> "TokenSequence":
        coords = np.where(self.pad_mask[:, None], 0.0, coords)
        return TokenSequence(coords, self.cond_coords, self.room_index, self.corner_index,
                             self.room_type, self.pad_mask, self.next_index)


def tokenize(plan, cond, pad_to: int | None = None) -> TokenSequence:
    """Flatten ``plan``'s loops into tokens, each loop padded to a supported length.

    ``plan`` supplies the target coordinates and structure, ``cond`` the aligned
    condition coordinates. ``pad_to`` forces one padded length for all loops.
    """
    if len(plan.loops) > MAX_LOOPS:
        raise CapacityError(f"{len(plan.loops)} loops exceed capacity {MAX_LOOPS}")
    if len(cond.loops) != len(plan.loops):
        raise ShapeError("condition and plan have different loop counts")
    coords, cconds, ridx, cidx, rtype, pad, nxt = [], [], [], [], [], [], []
    base = 0
    for i, (lp, cl) in enumerate(zip(plan.loops, cond.loops)):
        n = len(lp)
        if n > MAX_CORNERS:
            raise CapacityError(f"loop {i} has {n} corners, capacity {MAX_CORNERS}")
        if len(cl) != n:
            raise ShapeError(f"loop {i}: condition has {len(cl)} corners, plan has {n}")
        p = pad_to if pad_to is not None else pad_length(n)
        if p < n:
            raise CapacityError(f"pad length {p} shorter than loop of {n} corners")
        c = np.zeros((p, 2))
        c[:n] = normalize(lp.array())
        k = np.zeros((p, 2))
        k[:n] = normalize(cl.array())
        coords.append(c)
        cconds.append(k)
        ridx.append(np.full(p, i))
        cidx.append(np.arange(p))
        rtype.append(np.full(p, int(lp.room_type)))
        pad.append(np.arange(p) >= n)
        nx = np.arange(p) + base
        nx[:n] = base + (np.arange(n) + 1) % n
        nxt.append(nx)
        base += p
    return TokenSequence(np.concatenate(coords), np.concatenate(cconds),
                         np.concatenate(ridx).astype(np.int64), np.concatenate(cidx).astype(np.int64),
                         np.concatenate(rtype).astype(np.int64), np.concatenate(pad),
                         np.concatenate(nxt).astype(np.int64))
