"""Noise schedules and the condition-shifted forward/reverse updates.

Works on numpy arrays and torch tensors alike; ``t`` is an int or a per-item
integer array broadcast over the trailing (tokens, 2) axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import torch

from .errors import ConfigError, NumericError, ShapeError

ALPHA_BAR_FLOOR = 1e-8
ALPHA_BAR_T_MAX = 1e-4


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    alpha_bar: np.ndarray  # length T + 1, alpha_bar[0] == 1
    kind: str = "cosine"

    @property
    def T(self) -> int:
        return len(self.alpha_bar) - 1

    def __getitem__(self, t):
        return self.alpha_bar[t]


def make_schedule(T: int, kind: str = "cosine") -> NoiseSchedule:
    """Cosine (default) or linear cumulative schedule with ab[0] = 1 and ab[T] <= 1e-4."""
    if int(T) != T or T < 2:
        raise ConfigError(f"schedule needs T >= 2, got {T}")
    T = int(T)
    if kind == "cosine":
        s = 0.008
        f = lambda t: np.cos((t / T + s) / (1 + s) * np.pi / 2) ** 2
        ab = f(np.arange(T + 1, dtype=np.float64)) / f(0.0)
        betas = np.clip(1 - ab[1:] / ab[:-1], 0.0, 0.99)
    elif kind == "linear":
        scale = 1000.0 / T
        betas = np.clip(np.linspace(scale * 1e-4, scale * 0.02, T), 0.0, 0.99)
    else:
        raise ConfigError(f"unknown schedule kind {kind!r}")
    ab = np.concatenate([[1.0], np.cumprod(1.0 - betas)])
    if ab[-1] > ALPHA_BAR_T_MAX:
        ab[-1] = min(ALPHA_BAR_T_MAX, ab[-2] / 2)
    if not np.all(np.diff(ab) < 0):
        raise ConfigError("schedule is not strictly decreasing")
    return NoiseSchedule(ab, kind)


@dataclass(frozen=True)
class DiffusionConfig:
    schedule: NoiseSchedule = field(default_factory=lambda: make_schedule(1000))
    cond_rate: float = 1e-1
    forward_cond: bool = True
    reverse_cond: bool = True
    t_discrete: int | None = None  # None -> max(1, T // 32); discrete branch active for t < t_discrete
    sample_stride: int = 1
    stochastic: bool = False       # fresh Gaussian residual instead of the predicted noise

    def __post_init__(self):
        if self.cond_rate < 0:
            raise ConfigError("cond_rate must be >= 0")
        if self.t_discrete is None:
            object.__setattr__(self, "t_discrete", max(1, self.schedule.T // 32))
        if not 1 <= self.t_discrete <= self.schedule.T:
            raise ConfigError(f"t_discrete {self.t_discrete} outside [1, {self.schedule.T}]")
        if self.sample_stride < 1:
            raise ConfigError("sample_stride must be >= 1")

    @property
    def T(self) -> int:
        return self.schedule.T


def _bcast(values, like):
    if isinstance(like, torch.Tensor):
        v = torch.as_tensor(np.asarray(values, dtype=np.float64), dtype=like.dtype)
        return v.reshape(v.shape + (1,) * (like.dim() - v.dim()))
    v = np.asarray(values, dtype=np.float64)
    return v.reshape(v.shape + (1,) * (np.ndim(like) - v.ndim))


def _coef(schedule: NoiseSchedule, t, like):
    return _bcast(schedule.alpha_bar[np.asarray(t)], like)


def _sqrt(a):
    return torch.sqrt(a) if isinstance(a, torch.Tensor) else np.sqrt(a)


def condition_offset(cond_coords, cfg: DiffusionConfig):
    """e(y): the condition coordinates scaled by ``cond_rate``, or zeros when forward conditioning is off."""
    if not cfg.forward_cond or cfg.cond_rate == 0:
        return cond_coords * 0.0
    return cfg.cond_rate * cond_coords


def forward_sample(x0, t, noise, e_y, schedule: NoiseSchedule):
    """x_t = sqrt(ab_t) x0 + sqrt(1 - ab_t) noise + e_y."""
    if tuple(np.shape(x0)) != tuple(np.shape(noise)) or tuple(np.shape(x0)) != tuple(np.shape(e_y)):
        raise ShapeError(f"shape mismatch: x0 {np.shape(x0)}, noise {np.shape(noise)}, e_y {np.shape(e_y)}")
    ab = _coef(schedule, t, x0)
    return _sqrt(ab) * x0 + _sqrt(1 - ab) * noise + e_y


def predict_x0(x_t, eps_hat, t, e_y, schedule: NoiseSchedule, clip: bool = False):
    """Invert the forward step given a noise estimate."""
    ab = _coef(schedule, t, x_t)
    if float(ab.min()) < ALPHA_BAR_FLOOR:
        raise NumericError(f"alpha_bar below {ALPHA_BAR_FLOOR} at t={t}; x0 estimate undefined")
    x0 = (x_t - e_y - _sqrt(1 - ab) * eps_hat) / _sqrt(ab)
    if clip:
        x0 = x0.clamp(-1, 1) if isinstance(x0, torch.Tensor) else np.clip(x0, -1, 1)
    return x0


def reverse_step(x_t, t, eps_hat, e_y, schedule: NoiseSchedule, t_prev=None, clip: bool = False,
                 residual=None):
    """One reverse update from ``t`` to ``t_prev`` (default ``t - 1``).

    The residual term reuses ``eps_hat`` unless ``residual`` is given. ``e_y`` is
    re-added while ``t_prev >= 1``; at ``t_prev == 0`` the x0 estimate is returned.
    """
    t_prev = np.asarray(t) - 1 if t_prev is None else np.asarray(t_prev)
    x0 = predict_x0(x_t, eps_hat, t, e_y, schedule, clip=clip)
    if np.all(t_prev == 0):
        return x0
    ab = _coef(schedule, t_prev, x_t)
    r = eps_hat if residual is None else residual
    out = _sqrt(ab) * x0 + _sqrt(1 - ab) * r + e_y
    if np.any(t_prev == 0):
        keep = _bcast(t_prev == 0, x_t)
        out = out * (1 - keep) + x0 * keep
    return out
