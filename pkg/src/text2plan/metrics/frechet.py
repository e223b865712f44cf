"""Fréchet distance between Gaussian fits of floorplan features.

Features are a fixed random projection of the rasterized 25-channel type grid,
reported under the label ``frechet-rp64``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SmallSetError
from ..raster import type_channels
from ..rooms import NUM_ROOM_TYPES

LABEL = "frechet-rp64"
RIDGE = 1e-6


@dataclass(frozen=True, eq=False)
class FeatureExtractor:
    resolution: int = 32
    seed: int = 0
    dim: int = 64
    projection: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d_in = NUM_ROOM_TYPES * self.resolution * self.resolution
        rng = np.random.default_rng(self.seed)
        object.__setattr__(self, "projection", rng.standard_normal((d_in, self.dim)) / np.sqrt(d_in))

    def __call__(self, plans) -> np.ndarray:
        flat = np.stack([type_channels(p, self.resolution).ravel() for p in plans])
        return flat @ self.projection


def sqrtm_psd(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.T


def ledoit_wolf(x: np.ndarray) -> np.ndarray:
    """Shrunk covariance toward a scaled identity, with the Ledoit-Wolf optimal weight."""
    n, d = x.shape
    xc = x - x.mean(0)
    s = xc.T @ xc / n
    mu = np.trace(s) / d
    delta = ((s - mu * np.eye(d)) ** 2).sum()
    beta = sum(((np.outer(r, r) - s) ** 2).sum() for r in xc) / n ** 2
    shrink = 0.0 if delta == 0 else min(beta, delta) / delta
    return shrink * mu * np.eye(d) + (1 - shrink) * s


def gaussian_fit(feats: np.ndarray, shrinkage: bool = True) -> tuple[np.ndarray, np.ndarray]:
    n, d = feats.shape
    if n < 2 or (n < d + 1 and not shrinkage):
        raise SmallSetError(f"{n} samples is too few for a {d}-d covariance")
    mu = feats.mean(0)
    sigma = ledoit_wolf(feats) if n < d + 1 else np.cov(feats, rowvar=False)
    if shrinkage:
        sigma = sigma + RIDGE * np.eye(d)
    return mu, sigma


def frechet_distance(mu1, sigma1, mu2, sigma2) -> float:
    mu1, mu2 = np.atleast_1d(mu1), np.atleast_1d(mu2)
    sigma1, sigma2 = np.atleast_2d(sigma1), np.atleast_2d(sigma2)
    r = sqrtm_psd(sigma1)
    cross = sqrtm_psd(r @ sigma2 @ r)
    diff = mu1 - mu2
    d = diff @ diff + np.trace(sigma1) + np.trace(sigma2) - 2 * np.trace(cross)
    return float(max(d, 0.0))


def frechet_diversity(set_a, set_b, fx: FeatureExtractor, shrinkage: bool = True) -> float:
    fa, fb = fx(set_a), fx(set_b)
    return frechet_distance(*gaussian_fit(fa, shrinkage), *gaussian_fit(fb, shrinkage))
