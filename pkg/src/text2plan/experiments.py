"""Desk-scale experiment runners shared by scripts/ and the acceptance tests."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .align import align_condition
from .data import Sample, perturb_to_init, synth_generate
from .diffusion import DiffusionConfig, make_schedule
from .engine import TrainConfig, prepare_sample, sample_batch, train
from .metrics import micro_iou
from .model import DenoiserConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ToySetup:
    T: int = 64
    d_model: int = 128
    heads: int = 4
    blocks: int = 4
    discrete_blocks: int = 1
    room_count: int = 6
    jitter: int = 8
    steps: int = 2000
    batch_size: int = 16
    lr: float = 1e-3
    seed: int = 0

    def model_config(self) -> DenoiserConfig:
        return DenoiserConfig(d_model=self.d_model, heads=self.heads, blocks=self.blocks,
                              discrete_blocks=self.discrete_blocks)

    def diffusion_config(self, **kw) -> DiffusionConfig:
        return DiffusionConfig(make_schedule(self.T), **kw)

    def train_config(self) -> TrainConfig:
        return TrainConfig(lr=self.lr, batch_size=self.batch_size, steps=self.steps, seed=self.seed)


def make_samples(n: int, room_count: int, seed: int, jitter: int) -> list[Sample]:
    plans = synth_generate(n, room_count, seed)
    return [Sample(p, perturb_to_init(p, jitter, int(np.random.default_rng([seed, k, 1]).integers(2**31))))
            for k, p in enumerate(plans)]


def loss_drop(history, head: int = 10, tail: int = 50) -> float:
    """Relative fall of the combined loss from the mean of the first ``head`` steps to the last ``tail``."""
    comb = np.array([h[3] for h in history])
    start, end = comb[:head].mean(), comb[-tail:].mean()
    return float(1 - end / start)


def heldout_iou(model, samples, dcfg, seed: int = 0, chunk: int = 32) -> list[float]:
    out = []
    for i in range(0, len(samples), chunk):
        part = samples[i:i + chunk]
        conds = [align_condition(s.target, s.condition_init) for s in part]
        preds = sample_batch(model, conds, dcfg, [seed + i + k for k in range(len(part))])
        out += [micro_iou(p, s.target) for p, s in zip(preds, part)]
    return out


def run_overfit(setup: ToySetup = ToySetup(), n_seeds: int = 4) -> dict:
    """Train on one sample with zero-jitter init, then sample it back from its own condition."""
    sample = make_samples(1, setup.room_count, setup.seed, 0)[0]
    dcfg = setup.diffusion_config()
    t0 = time.time()
    state = train([sample], dcfg, setup.train_config(), setup.model_config())
    elapsed = time.time() - t0
    cond = align_condition(sample.target, sample.condition_init)
    preds = sample_batch(state.model, [cond] * n_seeds, dcfg, list(range(n_seeds)))
    ious = [micro_iou(p, sample.target) for p in preds]
    return {"micro_iou": ious, "train_seconds": elapsed, "loss_drop": loss_drop(state.history),
            "history": state.history, "state": state, "sample": sample, "preds": preds}


def run_toy(setup: ToySetup = ToySetup(steps=3000), n_train: int = 500, n_test: int = 50) -> dict:
    """Train on synthetic plans and score held-out plans conditioned on jittered inits."""
    train_set = make_samples(n_train, setup.room_count, setup.seed, setup.jitter)
    test_set = make_samples(n_test, setup.room_count, setup.seed + 10_000, setup.jitter)
    dcfg = setup.diffusion_config()
    prepared = [prepare_sample(s) for s in train_set]
    t0 = time.time()
    state = train(prepared, dcfg, setup.train_config(), setup.model_config())
    elapsed = time.time() - t0
    ious = heldout_iou(state.model, test_set, dcfg, seed=setup.seed)
    return {"micro_iou": float(np.mean(ious)), "per_sample": ious, "loss_drop": loss_drop(state.history),
            "train_seconds": elapsed, "history": state.history, "state": state}


def quick(setup: ToySetup, **kw) -> ToySetup:
    return replace(setup, **kw)
