"""Aggregate metric report with per-metric error isolation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FloorplanError
from ..graph import DEFAULT_EPS
from .frechet import LABEL, FeatureExtractor, frechet_diversity
from .ged import compatibility
from .iou import macro_iou, micro_iou

log = logging.getLogger(__name__)

KEYS = ("micro_iou", "macro_iou", "compatibility", LABEL, "n_pairs", "n_pred", "n_target")


@dataclass
class MetricReport:
    micro_iou: float | None = None
    macro_iou: float | None = None
    compatibility: float | None = None
    diversity: float | None = None
    n_pairs: int = 0
    n_pred: int = 0
    n_target: int = 0
    errors: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"micro_iou": self.micro_iou, "macro_iou": self.macro_iou,
               "compatibility": self.compatibility, LABEL: self.diversity,
               "n_pairs": self.n_pairs, "n_pred": self.n_pred, "n_target": self.n_target}
        out.update(self.extra)
        out.update({f"error.{k}": v for k, v in sorted(self.errors.items())})
        out.update({f"config.{k}": v for k, v in sorted(self.config.items())})
        return out

    def write(self, path) -> Path:
        """One ``key<TAB>value`` line per entry; missing metrics are written as ``NA``."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [f"{k}\t{_fmt(v)}" for k, v in self.as_dict().items()]
        path.write_text("\n".join(lines) + "\n")
        return path

    @staticmethod
    def read(path) -> dict:
        out = {}
        for line in Path(path).read_text().splitlines():
            k, _, v = line.partition("\t")
            out[k] = v
        return out


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "NA"
    return str(v).replace("\t", " ").replace("\n", " ")


def evaluate(pred_set, target_set, pairs=(), fx: FeatureExtractor | None = None,
             eps: float = DEFAULT_EPS, resolution: int = 256, shrinkage: bool = True) -> MetricReport:
    """IoU and compatibility over ``pairs``; diversity between the two sets."""
    fx = fx or FeatureExtractor()
    pairs = list(pairs)
    rep = MetricReport(n_pairs=len(pairs), n_pred=len(pred_set), n_target=len(target_set),
                       config={"resolution": resolution, "fx_resolution": fx.resolution,
                               "fx_seed": fx.seed, "fx_dim": fx.dim, "eps": eps})

    def guarded(name, fn):
        try:
            return fn()
        except FloorplanError as e:
            log.warning("%s failed: %s", name, e)
            rep.errors[name] = f"{e.code}: {e}"
            return None

    if pairs:
        rep.micro_iou = guarded("micro_iou", lambda: float(np.mean([micro_iou(p, t, resolution) for p, t in pairs])))
        rep.macro_iou = guarded("macro_iou", lambda: float(np.mean([macro_iou(p, t, resolution) for p, t in pairs])))
        rep.compatibility = guarded("compatibility",
                                    lambda: float(np.mean([compatibility(p, t, eps) for p, t in pairs])))
    if len(pred_set) and len(target_set):
        rep.diversity = guarded(LABEL, lambda: frechet_diversity(pred_set, target_set, fx, shrinkage))
    return rep
