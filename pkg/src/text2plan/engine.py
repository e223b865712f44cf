"""Training losses, the training loop and the sampler for the conditional denoiser."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
import torch.nn.functional as F

from .align import ConditionPlan, align_condition
from .data import Sample
from .diffusion import DiffusionConfig, condition_offset, forward_sample, predict_x0, reverse_step
from .errors import ConfigError, DivergedError, EmptyError
from .geometry import Floorplan, Loop, separate_corners
from .graph import extract_bubble_graph
from .model import Batch, Denoiser, DenoiserConfig, MaskSet, bits_of, bits_to_grid, build_masks, collate
from .tokens import TokenSequence, tokenize

log = logging.getLogger(__name__)

DIVERGENCE_PATIENCE = 10


# -- data preparation -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Prepared:
    seq: TokenSequence
    masks: MaskSet


def prepare(target: Floorplan, condition: ConditionPlan, reverse_cond: bool = True) -> Prepared:
    seq = tokenize(target, condition)
    graph = extract_bubble_graph(condition) if reverse_cond else None
    return Prepared(seq, build_masks(seq, graph))


def prepare_sample(sample: Sample, reverse_cond: bool = True) -> Prepared:
    return prepare(sample.target, align_condition(sample.target, sample.condition_init), reverse_cond)


def batch_of(items: Sequence[Prepared], dtype=torch.float32) -> Batch:
    return collate([p.seq for p in items], [p.masks for p in items], dtype)


def model_view(batch: Batch, cfg: DiffusionConfig) -> Batch:
    """What the network sees: condition coordinates are blanked when reverse conditioning is off."""
    return batch if cfg.reverse_cond else batch.replace(cond=torch.zeros_like(batch.cond))


# -- losses -----------------------------------------------------------------

def _per_item_mean(sq: torch.Tensor, valid: torch.Tensor) -> torch.Tensor:
    """Mean of ``sq`` (B, L, C) over valid tokens and channels, per item."""
    w = valid.to(sq.dtype).unsqueeze(-1)
    return (sq * w).sum((1, 2)) / (w.sum((1, 2)) * sq.shape[-1])


def training_losses(model, batch: Batch, cfg: DiffusionConfig, generator: torch.Generator | None = None,
                    t: torch.Tensor | None = None, noise: torch.Tensor | None = None) -> dict:
    """Noise MSE, discrete-branch BCE (for items with t < t_discrete) and their sum.

    ``t`` and ``noise`` may be forced; otherwise they are drawn from ``generator``.
    """
    if len(batch) == 0:
        raise EmptyError("empty batch")
    valid = batch.valid
    n_valid = valid.sum(1)
    if (n_valid == 0).any():
        raise EmptyError("batch item with no unpadded tokens")
    B, L, _ = batch.coords.shape
    dtype = batch.coords.dtype
    T = cfg.T
    if t is None:
        t = torch.randint(1, T + 1, (B,), generator=generator)
    t = torch.as_tensor(t, dtype=torch.long).expand(B) if torch.as_tensor(t).dim() == 0 else torch.as_tensor(t)
    if noise is None:
        noise = torch.randn(B, L, 2, generator=generator, dtype=dtype)
    vmask = valid.unsqueeze(-1).to(dtype)
    noise = noise * vmask
    x0 = batch.coords
    e_y = condition_offset(batch.cond, cfg) * vmask
    t_np = t.numpy()
    x_t = forward_sample(x0, t_np, noise, e_y, cfg.schedule)
    tnorm = t.to(dtype) / T
    mb = model_view(batch, cfg)

    eps_hat = model.predict_noise(x_t, mb, tnorm)
    per_item_n = _per_item_mean((eps_hat - noise) ** 2, valid)
    loss_n = per_item_n.mean()

    active = t < cfg.t_discrete
    loss_r = torch.zeros((), dtype=dtype)
    if active.any():
        idx = torch.nonzero(active).flatten()
        sub = _select(mb, idx)
        x0_hat = predict_x0(x_t[idx], eps_hat[idx], t_np[idx.numpy()], e_y[idx], cfg.schedule, clip=True)
        logits = model.predict_bits(x0_hat, sub, tnorm[idx])
        bce = F.binary_cross_entropy_with_logits(logits, bits_of(x0[idx]), reduction="none")
        loss_r = _per_item_mean(bce, sub.valid).sum() / B
    return {"loss_n": loss_n, "loss_r": loss_r, "combined": loss_n + loss_r, "per_item_n": per_item_n}


def _select(batch: Batch, idx: torch.Tensor) -> Batch:
    return Batch(**{k: v[idx] for k, v in batch.__dict__.items()})


# -- training -----------------------------------------------------------------

@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    weight_decay: float = 1e-2
    batch_size: int = 16
    steps: int = 1000
    seed: int = 0
    checkpoint_every: int = 0      # 0: only at the end (when a checkpoint dir is given)
    grad_clip: float | None = 1.0
    dtype: str = "float32"

    def __post_init__(self):
        if self.lr < 0 or self.weight_decay < 0:
            raise ConfigError("lr and weight_decay must be >= 0")
        if self.batch_size < 1 or self.steps < 0:
            raise ConfigError("batch_size must be >= 1 and steps >= 0")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"unsupported dtype {self.dtype!r}")

    @property
    def torch_dtype(self):
        return getattr(torch, self.dtype)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrainState:
    model: Denoiser
    optimizer: torch.optim.Optimizer
    train_cfg: TrainConfig
    diffusion_cfg: DiffusionConfig
    step: int = 0
    history: list = field(default_factory=list)  # (step, loss_n, loss_r, combined)

    @property
    def seed(self) -> int:
        return self.train_cfg.seed


def step_generator(seed: int, step: int) -> torch.Generator:
    """Independent RNG stream per (seed, step) so resumed runs draw the same numbers."""
    state = np.random.SeedSequence([seed, step]).generate_state(2, dtype=np.uint32)
    return torch.Generator().manual_seed(int(state[0]) << 32 | int(state[1]))


def _epoch_perm(seed: int, epoch: int, n: int) -> np.ndarray:
    return np.random.default_rng([seed, epoch, 7]).permutation(n)


def batch_indices(seed: int, step: int, batch_size: int, n: int) -> list[int]:
    out = []
    for g in range(step * batch_size, (step + 1) * batch_size):
        out.append(int(_epoch_perm(seed, g // n, n)[g % n]))
    return out


def make_optimizer(model: Denoiser, cfg: TrainConfig) -> torch.optim.Optimizer:
    return torch.optim.AdamW(model.parameters(), lr=cfg.lr, weight_decay=cfg.weight_decay)


def new_state(model_cfg: DenoiserConfig, dcfg: DiffusionConfig, tcfg: TrainConfig) -> TrainState:
    torch.manual_seed(tcfg.seed)
    model = Denoiser(model_cfg).to(tcfg.torch_dtype)
    return TrainState(model, make_optimizer(model, tcfg), tcfg, dcfg)


class LossLog:
    """Append-only tab-separated loss log."""

    HEADER = "step\tloss_n\tloss_r\tcombined\twall_time\n"

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists() or self.path.stat().st_size == 0:
            self.path.write_text(self.HEADER)

    def append(self, step, loss_n, loss_r, combined, wall):
        with open(self.path, "a") as fh:
            fh.write(f"{step}\t{loss_n:.8g}\t{loss_r:.8g}\t{combined:.8g}\t{wall:.3f}\n")

    @staticmethod
    def read(path) -> list[dict]:
        lines = Path(path).read_text().splitlines()
        keys = lines[0].split("\t")
        return [dict(zip(keys, map(float, ln.split("\t")))) for ln in lines[1:] if ln]


def train(samples: Sequence[Sample] | Sequence[Prepared], dcfg: DiffusionConfig, tcfg: TrainConfig,
          model_cfg: DenoiserConfig = DenoiserConfig(), state: TrainState | None = None,
          checkpoint_dir=None, loss_log=None, until: int | None = None) -> TrainState:
    """Run optimizer steps until ``until`` (default ``tcfg.steps``), continuing ``state`` if given."""
    from .checkpoint import save_checkpoint

    if not samples:
        raise EmptyError("training set is empty")
    items = [s if isinstance(s, Prepared) else prepare_sample(s, dcfg.reverse_cond) for s in samples]
    state = state or new_state(model_cfg, dcfg, tcfg)
    dtype = tcfg.torch_dtype
    logger = LossLog(loss_log) if loss_log else None
    until = tcfg.steps if until is None else until
    model, opt = state.model, state.optimizer
    model.train()
    bad = 0
    t0 = time.time()
    while state.step < until:
        gen = step_generator(tcfg.seed, state.step)
        idx = batch_indices(tcfg.seed, state.step, tcfg.batch_size, len(items))
        batch = batch_of([items[i] for i in idx], dtype)
        losses = training_losses(model, batch, dcfg, gen)
        combined = losses["combined"]
        if not torch.isfinite(combined):
            bad += 1
            log.warning("step %d: non-finite loss", state.step)
            if bad >= DIVERGENCE_PATIENCE:
                raise DivergedError(f"{bad} consecutive non-finite losses at step {state.step}")
            opt.zero_grad(set_to_none=True)
            state.step += 1
            continue
        bad = 0
        opt.zero_grad(set_to_none=True)
        combined.backward()
        if tcfg.grad_clip:
            torch.nn.utils.clip_grad_norm_(model.parameters(), tcfg.grad_clip)
        opt.step()
        state.step += 1
        rec = (state.step, losses["loss_n"].item(), losses["loss_r"].item(), combined.item())
        state.history.append(rec)
        if logger:
            logger.append(*rec, time.time() - t0)
        if checkpoint_dir and tcfg.checkpoint_every and state.step % tcfg.checkpoint_every == 0:
            save_checkpoint(Path(checkpoint_dir) / f"step_{state.step:08d}.ckpt", state)
    if checkpoint_dir:
        final = Path(checkpoint_dir) / f"step_{state.step:08d}.ckpt"
        if not final.exists():
            save_checkpoint(final, state)
    model.eval()
    return state


# -- sampling -----------------------------------------------------------------

def to_floorplan(grid: np.ndarray, seq: TokenSequence, types) -> Floorplan:
    loops = []
    for i, idx in enumerate(seq.loop_slices()):
        corners = [(int(x), int(y)) for x, y in grid[idx]]
        loops.append(Loop(tuple(separate_corners(corners)), types[i]))
    return Floorplan(tuple(loops))


@torch.no_grad()
def sample_batch(model: Denoiser, conditions: Sequence[ConditionPlan], cfg: DiffusionConfig,
                 seeds: Sequence[int]) -> list[Floorplan]:
    """Sample one floorplan per (condition, seed); each item's noise depends only on its own seed."""
    if len(conditions) != len(seeds):
        raise ValueError("one seed per condition")
    if not conditions:
        return []
    dtype = next(model.parameters()).dtype
    preps = [prepare(c, c, cfg.reverse_cond) for c in conditions]
    batch = batch_of(preps, dtype)
    B, L, _ = batch.coords.shape
    vmask = batch.valid.unsqueeze(-1).to(dtype)
    e_y = condition_offset(batch.cond, cfg) * vmask
    gens = [torch.Generator().manual_seed(int(s)) for s in seeds]
    lengths = [len(p.seq) for p in preps]

    def draw():
        # each item draws at its own length so batching does not change its stream
        out = torch.zeros(B, L, 2, dtype=dtype)
        for b, (g, n) in enumerate(zip(gens, lengths)):
            out[b, :n] = torch.randn(n, 2, generator=g, dtype=dtype)
        return out * vmask
    mb = model_view(batch, cfg)
    model.eval()
    T, stride = cfg.T, cfg.sample_stride
    x = draw() + e_y
    t = T
    grid = None
    while t >= 1:
        t_prev = max(t - stride, 0)
        tnorm = torch.full((B,), t / T, dtype=dtype)
        eps_hat = model.predict_noise(x, mb, tnorm)
        if t < cfg.t_discrete or t_prev == 0:
            x0 = predict_x0(x, eps_hat, t, e_y, cfg.schedule, clip=True)
            grid = bits_to_grid(model.predict_bits(x0, mb, tnorm))
            x0 = (grid.to(dtype) / 127.5 - 1.0) * vmask
            if t_prev == 0:
                break
            residual = draw() if cfg.stochastic else eps_hat
            ab = float(cfg.schedule[t_prev])
            x = math.sqrt(ab) * x0 + math.sqrt(1 - ab) * residual + e_y
        else:
            residual = draw() if cfg.stochastic else None
            x = reverse_step(x, t, eps_hat, e_y, cfg.schedule, t_prev=t_prev, clip=True, residual=residual)
        t = t_prev
    grid = grid.numpy()
    return [to_floorplan(grid[b], p.seq, [lp.room_type for lp in c.loops])
            for b, (p, c) in enumerate(zip(preps, conditions))]


def sample(model: Denoiser, condition: ConditionPlan, cfg: DiffusionConfig, seed: int) -> Floorplan:
    """One floorplan with ``condition``'s loop structure and room types."""
    return sample_batch(model, [condition], cfg, [seed])[0]
