"""Denoising network: corner-token embedding, structured-mask attention, continuous and discrete heads."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from .errors import CapacityError, ConfigError, NumericError
from .graph import BubbleGraph
from .rooms import NUM_ROOM_TYPES
from .tokens import TokenSequence

INDEX_WIDTH = 32
AU_WIDTH = 4
BIT_WIDTH = 16


@dataclass(frozen=True)
class DenoiserConfig:
    d_model: int = 512
    heads: int = 8
    blocks: int = 4
    discrete_blocks: int = 2
    ff_mult: int = 4
    timestep_encoding: str = "scalar"  # "scalar" (t/T appended) or "sinusoidal"
    sinusoidal_dim: int = 16
    linear_only: bool = False  # embedding -> head, no attention; used by gradient checks
    bit_prior: float = 4.0     # logit offset toward the input bits of the rounded estimate

    def __post_init__(self):
        if self.d_model % self.heads:
            raise ConfigError(f"d_model {self.d_model} not divisible by heads {self.heads}")
        if self.blocks < 1 or self.discrete_blocks < 0:
            raise ConfigError("blocks must be >= 1 and discrete_blocks >= 0")
        if self.timestep_encoding not in ("scalar", "sinusoidal"):
            raise ConfigError(f"unknown timestep encoding {self.timestep_encoding!r}")

    @property
    def time_width(self) -> int:
        return 1 if self.timestep_encoding == "scalar" else self.sinusoidal_dim

    @property
    def token_width(self) -> int:
        # AU(noisy) + AU(cond) + type + room index + corner index + t
        return 2 * AU_WIDTH + NUM_ROOM_TYPES + 2 * INDEX_WIDTH + self.time_width

    @property
    def bit_width(self) -> int:
        return 2 * AU_WIDTH + BIT_WIDTH + NUM_ROOM_TYPES + 2 * INDEX_WIDTH + self.time_width

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class MaskSet:
    csa: np.ndarray
    gsa: np.ndarray
    rca: np.ndarray


def build_masks(seq: TokenSequence, cond_graph: BubbleGraph | None) -> MaskSet:
    """Boolean attention masks; ``cond_graph`` None means unrestricted relational attention."""
    valid = seq.valid
    both = valid[:, None] & valid[None, :]
    ri = seq.room_index
    csa = both & (ri[:, None] == ri[None, :])
    if cond_graph is None:
        return MaskSet(csa, both.copy(), both.copy())
    n = int(ri.max()) + 1
    allowed = np.eye(n, dtype=bool)
    for a, b in cond_graph.edges:
        allowed[a, b] = allowed[b, a] = True
    for d, r in cond_graph.door_links:
        allowed[d, r] = allowed[r, d] = True
    rca = both & allowed[ri[:, None], ri[None, :]]
    return MaskSet(csa, both.copy(), rca)


@dataclass
class Batch:
    """Padded batch of token sequences as tensors."""

    coords: torch.Tensor       # (B, L, 2) clean target coordinates
    cond: torch.Tensor         # (B, L, 2)
    room_type: torch.Tensor    # (B, L) long
    room_index: torch.Tensor
    corner_index: torch.Tensor
    pad: torch.Tensor          # (B, L) bool, True = padding
    next_index: torch.Tensor   # (B, L) long
    csa: torch.Tensor          # (B, L, L) bool
    gsa: torch.Tensor
    rca: torch.Tensor

    @property
    def valid(self) -> torch.Tensor:
        return ~self.pad

    def to(self, dtype) -> "Batch":
        return Batch(self.coords.to(dtype), self.cond.to(dtype), self.room_type, self.room_index,
                     self.corner_index, self.pad, self.next_index, self.csa, self.gsa, self.rca)

    def replace(self, **kw) -> "Batch":
        d = dict(self.__dict__)
        d.update(kw)
        return Batch(**d)

    def __len__(self):
        return self.coords.shape[0]


def _safe(mask: np.ndarray) -> np.ndarray:
    # rows with nothing to attend (padding queries) attend to their own slot
    empty = ~mask.any(axis=1)
    out = mask.copy()
    idx = np.flatnonzero(empty)
    out[idx, idx] = True
    return out


def collate(seqs: Sequence[TokenSequence], masks: Sequence[MaskSet], dtype=torch.float32) -> Batch:
    B = len(seqs)
    L = max(len(s) for s in seqs)
    coords = np.zeros((B, L, 2))
    cond = np.zeros((B, L, 2))
    rt = np.zeros((B, L), dtype=np.int64)
    ri = np.zeros((B, L), dtype=np.int64)
    ci = np.zeros((B, L), dtype=np.int64)
    pad = np.ones((B, L), dtype=bool)
    nxt = np.tile(np.arange(L), (B, 1))
    m = {k: np.zeros((B, L, L), dtype=bool) for k in ("csa", "gsa", "rca")}
    for b, (s, ms) in enumerate(zip(seqs, masks)):
        n = len(s)
        coords[b, :n] = s.coords
        cond[b, :n] = s.cond_coords
        rt[b, :n] = s.room_type
        ri[b, :n] = s.room_index
        ci[b, :n] = s.corner_index
        pad[b, :n] = s.pad_mask
        nxt[b, :n] = s.next_index
        for k in m:
            full = np.zeros((L, L), dtype=bool)
            full[:n, :n] = getattr(ms, k)
            m[k][b] = _safe(full)
    if ri.max() >= INDEX_WIDTH or ci.max() >= INDEX_WIDTH:
        raise CapacityError("room or corner index exceeds one-hot width 32")
    t = lambda a: torch.as_tensor(a)
    return Batch(t(coords).to(dtype), t(cond).to(dtype), t(rt), t(ri), t(ci), t(pad), t(nxt),
                 t(m["csa"]), t(m["gsa"]), t(m["rca"]))


def angular(x: torch.Tensor, next_index: torch.Tensor, pad: torch.Tensor) -> torch.Tensor:
    """(x, y, cos, sin) of the outgoing edge per token, zero on padding."""
    nxt = torch.gather(x, 1, next_index.unsqueeze(-1).expand(-1, -1, 2))
    d = nxt - x
    unit = d / torch.sqrt((d * d).sum(-1, keepdim=True) + 1e-8)
    out = torch.cat([x, unit], dim=-1)
    return out.masked_fill(pad.unsqueeze(-1), 0.0)


def timestep_features(tnorm: torch.Tensor, cfg: DenoiserConfig, L: int, dtype) -> torch.Tensor:
    tnorm = tnorm.to(dtype).view(-1, 1, 1)
    if cfg.timestep_encoding == "scalar":
        return tnorm.expand(-1, L, 1)
    half = cfg.sinusoidal_dim // 2
    freqs = torch.exp(-math.log(1000.0) * torch.arange(half, dtype=dtype) / half)
    ang = tnorm * 1000.0 * freqs.view(1, 1, -1)
    return torch.cat([torch.sin(ang), torch.cos(ang)], dim=-1).expand(-1, L, -1)


def bits_of(x: torch.Tensor) -> torch.Tensor:
    """int2bit of the rounded grid coordinates of ``x`` (diffusion space): (..., 2) -> (..., 16)."""
    grid = torch.round((x.clamp(-1, 1) + 1) * 127.5).long()
    shifts = torch.arange(7, -1, -1)
    bits = (grid.unsqueeze(-1) >> shifts) & 1
    return bits.flatten(-2).to(x.dtype)


def bits_to_grid(logits: torch.Tensor) -> torch.Tensor:
    """Threshold 16 logits at zero and decode to (..., 2) integers in [0, 255]."""
    bits = (logits > 0).long().view(*logits.shape[:-1], 2, 8)
    weights = 1 << torch.arange(7, -1, -1)
    return (bits * weights).sum(-1)


class MaskedAttention(nn.Module):
    def __init__(self, d: int, heads: int):
        super().__init__()
        self.heads = heads
        self.q = nn.Linear(d, d)
        self.k = nn.Linear(d, d)
        self.v = nn.Linear(d, d)
        self.o = nn.Linear(d, d)

    def forward(self, x, ctx, mask):
        B, Lq, D = x.shape
        Lk = ctx.shape[1]
        h = self.heads
        q = self.q(x).view(B, Lq, h, -1).transpose(1, 2)
        k = self.k(ctx).view(B, Lk, h, -1).transpose(1, 2)
        v = self.v(ctx).view(B, Lk, h, -1).transpose(1, 2)
        scores = q @ k.transpose(-1, -2) / math.sqrt(q.shape[-1])
        scores = scores.masked_fill(~mask.unsqueeze(1), float("-inf"))
        att = torch.softmax(scores, dim=-1)
        out = (att @ v).transpose(1, 2).reshape(B, Lq, D)
        return self.o(out)


class AttentionBlock(nn.Module):
    """CSA -> GSA -> RCA -> feed-forward, pre-norm residual."""

    def __init__(self, d: int, heads: int, ff_mult: int):
        super().__init__()
        self.csa = MaskedAttention(d, heads)
        self.gsa = MaskedAttention(d, heads)
        self.rca = MaskedAttention(d, heads)
        self.norms = nn.ModuleList([nn.LayerNorm(d) for _ in range(4)])
        self.ff = nn.Sequential(nn.Linear(d, ff_mult * d), nn.GELU(), nn.Linear(ff_mult * d, d))

    def forward(self, h, cond_h, batch: Batch):
        n = self.norms
        y = n[0](h)
        h = h + self.csa(y, y, batch.csa)
        y = n[1](h)
        h = h + self.gsa(y, y, batch.gsa)
        h = h + self.rca(n[2](h), cond_h, batch.rca)
        return h + self.ff(n[3](h))


class Denoiser(nn.Module):
    def __init__(self, cfg: DenoiserConfig = DenoiserConfig()):
        super().__init__()
        self.cfg = cfg
        d = cfg.d_model
        self.embed = nn.Linear(cfg.token_width, d)
        self.cond_norm = nn.LayerNorm(d)
        self.blocks = nn.ModuleList([AttentionBlock(d, cfg.heads, cfg.ff_mult) for _ in range(cfg.blocks)])
        self.out_norm = nn.LayerNorm(d)
        self.noise_head = nn.Linear(d, 2)
        self.bit_embed = nn.Linear(cfg.bit_width, d)
        self.bit_blocks = nn.ModuleList(
            [AttentionBlock(d, cfg.heads, cfg.ff_mult) for _ in range(cfg.discrete_blocks)])
        self.bit_norm = nn.LayerNorm(d)
        self.bit_head = nn.Linear(d, BIT_WIDTH)
        self.reset_parameters()

    def reset_parameters(self):
        for m in self.modules():
            if isinstance(m, nn.Linear):
                nn.init.normal_(m.weight, std=0.02)
                nn.init.zeros_(m.bias)
            elif isinstance(m, nn.LayerNorm):
                nn.init.ones_(m.weight)
                nn.init.zeros_(m.bias)
        for head in (self.noise_head, self.bit_head):
            nn.init.zeros_(head.weight)
            nn.init.zeros_(head.bias)

    # -- features ---------------------------------------------------------
    def _index_features(self, batch: Batch, dtype):
        return torch.cat([F.one_hot(batch.room_type, NUM_ROOM_TYPES).to(dtype),
                          F.one_hot(batch.room_index, INDEX_WIDTH).to(dtype),
                          F.one_hot(batch.corner_index, INDEX_WIDTH).to(dtype)], dim=-1)

    def token_features(self, x_t, batch: Batch, tnorm) -> torch.Tensor:
        """Per-token input vector: AU(noisy), AU(cond), type, room index, corner index, t."""
        dtype = x_t.dtype
        L = x_t.shape[1]
        return torch.cat([angular(x_t, batch.next_index, batch.pad),
                          angular(batch.cond.to(dtype), batch.next_index, batch.pad),
                          self._index_features(batch, dtype),
                          timestep_features(tnorm, self.cfg, L, dtype)], dim=-1)

    def bit_features(self, x0, batch: Batch, tnorm) -> torch.Tensor:
        dtype = x0.dtype
        L = x0.shape[1]
        cond = batch.cond.to(dtype)
        return torch.cat([angular(x0, batch.next_index, batch.pad),
                          angular(cond, batch.next_index, batch.pad),
                          bits_of(x0).masked_fill(batch.pad.unsqueeze(-1), 0.0),
                          self._index_features(batch, dtype),
                          timestep_features(tnorm, self.cfg, L, dtype)], dim=-1)

    def embed_tokens(self, x_t, batch: Batch, tnorm) -> torch.Tensor:
        return self.embed(self.token_features(x_t, batch, tnorm))

    def _cond_stream(self, batch: Batch, tnorm, dtype):
        feats = self.token_features(torch.zeros_like(batch.cond, dtype=dtype), batch, tnorm)
        feats[..., :AU_WIDTH] = 0.0
        return self.cond_norm(self.embed(feats))

    # -- heads ------------------------------------------------------------
    def predict_noise(self, x_t, batch: Batch, tnorm) -> torch.Tensor:
        """Noise estimate (B, L, 2); exactly zero on padding."""
        h = self.embed_tokens(x_t, batch, tnorm)
        if not self.cfg.linear_only:
            cond_h = self._cond_stream(batch, tnorm, x_t.dtype)
            for blk in self.blocks:
                h = blk(h, cond_h, batch)
            h = self.out_norm(h)
        eps = self.noise_head(h).masked_fill(batch.pad.unsqueeze(-1), 0.0)
        if not torch.isfinite(eps).all():
            raise NumericError("non-finite noise prediction")
        return eps

    def predict_bits(self, x0, batch: Batch, tnorm) -> torch.Tensor:
        """16 bit-logits per token (x bits then y bits, most significant first)."""
        x0 = x0.clamp(-1, 1)
        feats = self.bit_features(x0, batch, tnorm)
        h = self.bit_embed(feats)
        if not self.cfg.linear_only:
            cond_h = self._cond_stream(batch, tnorm, x0.dtype)
            for blk in self.bit_blocks:
                h = blk(h, cond_h, batch)
            h = self.bit_norm(h)
        prior = self.cfg.bit_prior * (2 * feats[..., 2 * AU_WIDTH:2 * AU_WIDTH + BIT_WIDTH] - 1)
        logits = (self.bit_head(h) + prior).masked_fill(batch.pad.unsqueeze(-1), 0.0)
        if not torch.isfinite(logits).all():
            raise NumericError("non-finite bit logits")
        return logits

    forward = predict_noise
