"""Coordinate codecs: 8-bit binary, affine normalization and angular augmentation."""
from __future__ import annotations

import numpy as np

from .errors import DegenerateError, RangeError
from .geometry import Loop

BITS = 8
_WEIGHTS = 1 << np.arange(BITS - 1, -1, -1)


def int2bit(v: int) -> list[int]:
    """8 binary digits of ``v``, most significant first."""
    if isinstance(v, bool) or int(v) != v or not 0 <= v <= 255:
        raise RangeError(f"int2bit expects an integer in [0, 255], got {v!r}")
    v = int(v)
    return [(v >> (BITS - 1 - k)) & 1 for k in range(BITS)]


def bit2int(bits) -> int:
    bits = list(bits)
    if len(bits) != BITS:
        raise RangeError(f"bit2int expects {BITS} digits, got {len(bits)}")
    out = 0
    for b in bits:
        if b not in (0, 1):
            raise RangeError(f"non-binary digit {b!r}")
        out = (out << 1) | int(b)
    return out


def int2bit_array(v) -> np.ndarray:
    """Vectorized ``int2bit``: shape (...,) -> (..., 8)."""
    v = np.asarray(v)
    if np.any(v < 0) or np.any(v > 255):
        raise RangeError("int2bit_array: values outside [0, 255]")
    v = v.astype(np.int64)
    return ((v[..., None] >> np.arange(BITS - 1, -1, -1)) & 1).astype(np.int64)


def bit2int_array(bits) -> np.ndarray:
    bits = np.asarray(bits).astype(np.int64)
    if bits.shape[-1] != BITS or np.any((bits != 0) & (bits != 1)):
        raise RangeError("bit2int_array: expects trailing axis of 8 binary digits")
    return (bits * _WEIGHTS).sum(axis=-1)


def normalize(v):
    """Grid [0, 255] -> diffusion space [-1, 1]."""
    return np.asarray(v, dtype=np.float64) / 127.5 - 1.0


def denormalize(x):
    """Diffusion space -> nearest grid integer. Inputs are clamped to [-1, 1] first."""
    x = np.clip(np.asarray(x, dtype=np.float64), -1.0, 1.0)
    return np.rint((x + 1.0) * 127.5).astype(np.int64)


def angular_augment(loop: Loop, j: int) -> np.ndarray:
    """(x, y, cos, sin) for corner ``j``: position in diffusion space plus outgoing-edge direction."""
    n = len(loop)
    if not 0 <= j < n:
        raise RangeError(f"corner index {j} outside loop of {n} corners")
    p = np.asarray(loop.corners[j], dtype=np.float64)
    q = np.asarray(loop.corners[(j + 1) % n], dtype=np.float64)
    d = q - p
    length = np.hypot(*d)
    if length == 0:
        raise DegenerateError(f"zero-length edge leaving corner {j}")
    x, y = normalize(p)
    return np.array([x, y, d[0] / length, d[1] / length])
