"""Run configuration: nested dataclasses loaded from YAML or JSON, unknown keys rejected."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from pathlib import Path

import yaml

from .diffusion import DiffusionConfig, make_schedule
from .engine import TrainConfig
from .errors import ConfigError
from .experiments import ToySetup
from .model import DenoiserConfig
from .render import PALETTE, RenderStyle
from .rooms import RoomType


@dataclass(frozen=True)
class PathsSection:
    corpus: str = "data/pairs.jsonl"
    checkpoints: str = "runs/checkpoints"
    fixtures: str = "fixtures/llm"
    output: str = "runs/out"


@dataclass(frozen=True)
class DiffusionSection:
    T: int = 1000
    schedule: str = "cosine"
    cond_rate: float = 1e-1
    forward_cond: bool = True
    reverse_cond: bool = True
    t_discrete: int | None = None
    sample_stride: int = 1
    stochastic: bool = False

    def build(self) -> DiffusionConfig:
        return DiffusionConfig(make_schedule(self.T, self.schedule), self.cond_rate, self.forward_cond,
                               self.reverse_cond, self.t_discrete, self.sample_stride, self.stochastic)


@dataclass(frozen=True)
class ModelSection:
    d_model: int = 512
    heads: int = 8
    blocks: int = 4
    discrete_blocks: int = 2
    ff_mult: int = 4
    timestep_encoding: str = "scalar"
    sinusoidal_dim: int = 16
    linear_only: bool = False
    bit_prior: float = 4.0

    def build(self) -> DenoiserConfig:
        return DenoiserConfig(**asdict(self))


@dataclass(frozen=True)
class TrainSection:
    lr: float = 1e-3
    weight_decay: float = 1e-2
    batch_size: int = 16
    steps: int = 1000
    checkpoint_every: int = 0
    grad_clip: float | None = 1.0
    dtype: str = "float32"

    def build(self, seed: int) -> TrainConfig:
        return TrainConfig(seed=seed, **asdict(self))


@dataclass(frozen=True)
class LLMSection:
    variant: str = "P4"
    max_retries: int = 2
    demos: str | None = None  # None: the bundled demonstrations


@dataclass(frozen=True)
class DataSection:
    room_count: int = 6
    n_samples: int = 500
    jitter: int = 8


@dataclass(frozen=True)
class AblationSection:
    n_train: int = 100
    n_test: int = 20
    T: int = 64
    d_model: int = 64
    heads: int = 4
    blocks: int = 2
    steps: int = 300
    batch_size: int = 16
    room_count: int = 6
    jitter: int = 8

    def setup(self, seed: int) -> ToySetup:
        return ToySetup(T=self.T, d_model=self.d_model, heads=self.heads, blocks=self.blocks,
                        discrete_blocks=1, room_count=self.room_count, jitter=self.jitter,
                        steps=self.steps, batch_size=self.batch_size, seed=seed)


@dataclass(frozen=True)
class RenderSection:
    canvas: int = 512
    stroke_width: float = 2.0
    door_width: float = 6.0
    font_size: int = 12
    labels: bool = True
    png: bool = False
    palette: dict = field(default_factory=dict)  # overrides, keyed by room type label

    def build(self) -> RenderStyle:
        pal = dict(PALETTE)
        for k, v in self.palette.items():
            try:
                pal[RoomType.from_label(k)] = v
            except Exception as exc:
                raise ConfigError(f"render.palette: unknown room type {k!r}") from exc
        return RenderStyle(canvas=self.canvas, stroke_width=self.stroke_width, door_width=self.door_width,
                           font_size=self.font_size, labels=self.labels, palette=pal)


@dataclass(frozen=True)
class CliConfig:
    seed: int = 0
    paths: PathsSection = PathsSection()
    diffusion: DiffusionSection = DiffusionSection()
    model: ModelSection = ModelSection()
    train: TrainSection = TrainSection()
    llm: LLMSection = LLMSection()
    data: DataSection = DataSection()
    ablation: AblationSection = AblationSection()
    render: RenderSection = RenderSection()

    def to_dict(self) -> dict:
        return asdict(self)


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a mapping")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where or 'config'}: {', '.join(unknown)}")
    kw = {}
    for k, v in data.items():
        default = getattr(cls(), k)
        kw[k] = _build(type(default), v, f"{where}.{k}".lstrip(".")) if is_dataclass(default) else v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_dict(data: dict | None) -> CliConfig:
    return _build(CliConfig, data or {}, "")


def load_config(path=None, seed: int | None = None) -> CliConfig:
    """Defaults, overlaid with ``path`` (YAML or JSON), then ``seed`` when given."""
    data = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file {p} not found")
        text = p.read_text()
        try:
            data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
        except (ValueError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot parse {p}: {exc}") from exc
    cfg = config_from_dict(data)
    return replace(cfg, seed=seed) if seed is not None else cfg
