"""Finite-difference check of the denoiser's analytic gradients."""
from __future__ import annotations

import numpy as np
import torch

from .diffusion import DiffusionConfig
from .engine import training_losses
from .model import Batch, Denoiser


def randomize_heads(model: Denoiser, seed: int = 0, std: float = 0.02) -> Denoiser:
    """Give the zero-initialized output heads random weights so every parameter gets a gradient."""
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for head in (model.noise_head, model.bit_head):
            head.weight.copy_(torch.randn(head.weight.shape, generator=g, dtype=head.weight.dtype) * std)
    return model


def gradient_check(model: Denoiser, batch: Batch, cfg: DiffusionConfig, epsilon: float = 1e-5,
                   n_weights: int = 24, seed: int = 0, t=None, corrupt: bool = False) -> float:
    """Max relative error |a - n| / max(|a|, |n|, 1e-6) over randomly drawn scalar weights.

    The loss is made deterministic by fixing ``t`` and the noise. ``corrupt`` perturbs
    the analytic gradient, as a negative control.
    """
    model = model.double()
    batch = batch.to(torch.float64)
    g = torch.Generator().manual_seed(seed)
    B, L, _ = batch.coords.shape
    t = torch.ones(B, dtype=torch.long) if t is None else torch.as_tensor(t)
    noise = torch.randn(B, L, 2, generator=g, dtype=torch.float64)

    def loss() -> torch.Tensor:
        return training_losses(model, batch, cfg, t=t, noise=noise)["combined"]

    model.zero_grad(set_to_none=True)
    loss().backward()
    # weights outside the computation (e.g. attention blocks of a linear-only config) are not sampled
    params = [p for p in model.parameters() if p.grad is not None]
    grads = [p.grad.detach().clone() for p in params]

    rng = np.random.default_rng(seed)
    sizes = np.array([p.numel() for p in params])
    picks = rng.choice(sizes.sum(), size=n_weights, replace=False)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    worst = 0.0
    with torch.no_grad():
        for flat in picks:
            k = int(np.searchsorted(offsets, flat, side="right") - 1)
            i = int(flat - offsets[k])
            w = params[k].view(-1)
            orig = w[i].item()
            w[i] = orig + epsilon
            up = loss().item()
            w[i] = orig - epsilon
            down = loss().item()
            w[i] = orig
            numeric = (up - down) / (2 * epsilon)
            analytic = grads[k].view(-1)[i].item()
            if corrupt:
                analytic = analytic * 1.5 + 1e-3
            err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, err)
    return worst
