"""Byte-deterministic checkpoint container.

Layout: magic, 8-byte little-endian header length, UTF-8 JSON header (sorted
keys), then the raw tensor bytes in header order.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np
import torch

from .diffusion import DiffusionConfig, make_schedule
from .errors import CheckpointError
from .model import Denoiser, DenoiserConfig

MAGIC = b"T2PCKPT1"
FORMAT_VERSION = 1


def diffusion_to_dict(cfg: DiffusionConfig) -> dict:
    return {"T": cfg.T, "schedule": cfg.schedule.kind, "cond_rate": cfg.cond_rate,
            "forward_cond": cfg.forward_cond, "reverse_cond": cfg.reverse_cond,
            "t_discrete": cfg.t_discrete, "sample_stride": cfg.sample_stride, "stochastic": cfg.stochastic}


def diffusion_from_dict(d: dict) -> DiffusionConfig:
    d = dict(d)
    sched = make_schedule(d.pop("T"), d.pop("schedule"))
    return DiffusionConfig(schedule=sched, **d)


def _tensors(state) -> list[tuple[str, torch.Tensor]]:
    out = [(f"model.{k}", v) for k, v in state.model.state_dict().items()]
    opt = state.optimizer.state_dict()
    for pid in sorted(opt["state"]):
        for k in sorted(opt["state"][pid]):
            out.append((f"optim.{pid}.{k}", opt["state"][pid][k]))
    return out


def save_checkpoint(path, state) -> Path:
    from .engine import TrainState  # noqa: F401  (type only)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    entries, blobs, offset = [], [], 0
    for name, t in _tensors(state):
        a = t.detach().cpu().contiguous().numpy()
        raw = a.tobytes()
        entries.append({"name": name, "dtype": a.dtype.str, "shape": list(a.shape), "offset": offset})
        blobs.append(raw)
        offset += len(raw)
    opt = state.optimizer.state_dict()
    header = {
        "format_version": FORMAT_VERSION,
        "model_config": state.model.cfg.to_dict(),
        "diffusion_config": diffusion_to_dict(state.diffusion_cfg),
        "train_config": state.train_cfg.to_dict(),
        "step": state.step,
        "history": [list(h) for h in state.history],
        "param_groups": opt["param_groups"],
        "tensors": entries,
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(head)))
        fh.write(head)
        for b in blobs:
            fh.write(b)
    tmp.replace(path)
    return path


def read_checkpoint(path) -> tuple[dict, dict[str, torch.Tensor]]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not data.startswith(MAGIC) or len(data) < len(MAGIC) + 8:
        raise CheckpointError(f"{path} is not a checkpoint file")
    (n,) = struct.unpack("<Q", data[len(MAGIC):len(MAGIC) + 8])
    start = len(MAGIC) + 8
    try:
        header = json.loads(data[start:start + n])
    except ValueError as exc:
        raise CheckpointError(f"corrupt checkpoint header in {path}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {header.get('format_version')!r}")
    body = memoryview(data)[start + n:]
    tensors = {}
    for e in header["tensors"]:
        dt = np.dtype(e["dtype"])
        count = int(np.prod(e["shape"])) if e["shape"] else 1
        a = np.frombuffer(body, dtype=dt, count=count, offset=e["offset"]).reshape(e["shape"])
        tensors[e["name"]] = torch.from_numpy(a.copy())
    return header, tensors


def load_checkpoint(path, expect_model: DenoiserConfig | None = None,
                    expect_diffusion: DiffusionConfig | None = None):
    """Rebuild a TrainState; a mismatch with the expected configs raises CheckpointError."""
    from .engine import TrainConfig, TrainState, make_optimizer

    header, tensors = read_checkpoint(path)
    mcfg = DenoiserConfig(**header["model_config"])
    if expect_model is not None and expect_model != mcfg:
        raise CheckpointError(f"model config mismatch: checkpoint {mcfg}, expected {expect_model}")
    dcfg = diffusion_from_dict(header["diffusion_config"])
    if expect_diffusion is not None and diffusion_to_dict(expect_diffusion) != header["diffusion_config"]:
        raise CheckpointError("diffusion config mismatch with checkpoint")
    tcfg = TrainConfig(**header["train_config"])
    model = Denoiser(mcfg).to(tcfg.torch_dtype)
    sd = {k[len("model."):]: v for k, v in tensors.items() if k.startswith("model.")}
    try:
        model.load_state_dict(sd)
    except RuntimeError as exc:
        raise CheckpointError(f"weights do not fit the model: {exc}") from exc
    opt = make_optimizer(model, tcfg)
    ostate: dict = {}
    for k, v in tensors.items():
        if k.startswith("optim."):
            _, pid, name = k.split(".", 2)
            ostate.setdefault(int(pid), {})[name] = v
    opt.load_state_dict({"state": ostate, "param_groups": header["param_groups"]})
    history = [tuple(h) for h in header["history"]]
    return TrainState(model, opt, tcfg, dcfg, header["step"], history)


def latest_checkpoint(directory) -> Path | None:
    files = sorted(Path(directory).glob("step_*.ckpt")) if Path(directory).is_dir() else []
    return files[-1] if files else None


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
