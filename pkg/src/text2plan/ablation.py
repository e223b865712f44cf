"""Conditioning ablation: forward/reverse conditioning rows and the condition-rate sweep."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .align import align_condition
from .data import Sample
from .engine import prepare_sample, sample_batch, train
from .errors import FloorplanError
from .experiments import ToySetup
from .metrics import FeatureExtractor, evaluate

log = logging.getLogger(__name__)

CONDITIONING_COLUMNS = ("Forward", "Reverse", "Diversity", "Compatibility", "Macro IoU", "Micro IoU", "Status")
RATE_COLUMNS = ("Rate", "Macro IoU", "Micro IoU", "Diversity", "Compatibility", "Status")
RATES = (1e-1, 1e-2, 1e-3)


@dataclass(frozen=True)
class RowSpec:
    forward: bool
    reverse: bool
    rate: float

    @property
    def key(self) -> tuple:
        return (self.forward, self.reverse, self.rate)


@dataclass
class Row:
    spec: RowSpec
    metrics: dict = field(default_factory=dict)
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class AblationResult:
    conditioning: list[Row]
    rates: list[Row]
    control: Row
    reference: Row  # reverse-only row the control is compared against

    @property
    def rows(self) -> list[Row]:
        return self.conditioning + self.rates + [self.control]


def conditioning_specs(rate: float = 1e-1) -> list[RowSpec]:
    return [RowSpec(True, False, rate), RowSpec(False, True, rate), RowSpec(True, True, rate)]


def run_row(spec: RowSpec, train_set: Sequence[Sample], test_set: Sequence[Sample], setup: ToySetup,
            fx: FeatureExtractor) -> dict:
    dcfg = setup.diffusion_config(cond_rate=spec.rate, forward_cond=spec.forward, reverse_cond=spec.reverse)
    prepared = [prepare_sample(s, dcfg.reverse_cond) for s in train_set]
    state = train(prepared, dcfg, setup.train_config(), setup.model_config())
    conds = [align_condition(s.target, s.condition_init) for s in test_set]
    preds = sample_batch(state.model, conds, dcfg, [setup.seed + k for k in range(len(conds))])
    targets = [s.target for s in test_set]
    rep = evaluate(preds, targets, list(zip(preds, targets)), fx)
    if rep.errors:
        raise FloorplanError("; ".join(f"{k}: {v}" for k, v in rep.errors.items()))
    return {"Diversity": rep.diversity, "Compatibility": rep.compatibility,
            "Macro IoU": rep.macro_iou, "Micro IoU": rep.micro_iou}


def ablation_harness(train_set: Sequence[Sample], test_set: Sequence[Sample], setup: ToySetup,
                     fx: FeatureExtractor | None = None,
                     runner: Callable[..., dict] = run_row) -> AblationResult:
    """Train and evaluate every row; a failing row is recorded and the rest still run."""
    fx = fx or FeatureExtractor(seed=setup.seed)
    cache: dict[tuple, Row] = {}

    def get(spec: RowSpec) -> Row:
        if spec.key not in cache:
            row = Row(spec)
            try:
                row.metrics = runner(spec, train_set, test_set, setup, fx)
            except (FloorplanError, RuntimeError, ValueError) as exc:
                log.warning("ablation row %s failed: %s", spec, exc)
                row.status = f"error: {exc}"
            cache[spec.key] = row
        return cache[spec.key]

    cond_rows = [get(s) for s in conditioning_specs()]
    rate_rows = [get(RowSpec(True, True, r)) for r in RATES]
    control = get(RowSpec(True, True, 0.0))
    return AblationResult(cond_rows, rate_rows, control, cond_rows[1])


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "NA"
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _cells(row: Row, columns) -> list[str]:
    out = []
    for c in columns:
        if c == "Forward":
            out.append("yes" if row.spec.forward else "no")
        elif c == "Reverse":
            out.append("yes" if row.spec.reverse else "no")
        elif c == "Rate":
            out.append(f"{row.spec.rate:.0e}" if row.spec.rate else "0")
        elif c == "Status":
            out.append(row.status.replace("\t", " ").replace("\n", " "))
        else:
            out.append(_fmt(row.metrics.get(c)))
    return out


def write_table(path, rows: Sequence[Row], columns) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["\t".join(columns)] + ["\t".join(_cells(r, columns)) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split("\t")
    return [dict(zip(head, ln.split("\t"))) for ln in lines[1:]]


def write_tables(result: AblationResult, out_dir) -> dict[str, Path]:
    out_dir = Path(out_dir)
    control_cols = ("Role",) + RATE_COLUMNS
    paths = {
        "conditioning": write_table(out_dir / "conditioning.tsv", result.conditioning, CONDITIONING_COLUMNS),
        "rates": write_table(out_dir / "rates.tsv", result.rates, RATE_COLUMNS),
    }
    lines = ["\t".join(control_cols)]
    for role, row in (("control", result.control), ("reverse-only", result.reference)):
        lines.append("\t".join([role] + _cells(row, RATE_COLUMNS)))
    paths["control"] = out_dir / "control.tsv"
    paths["control"].write_text("\n".join(lines) + "\n")
    return paths


def control_gap(result: AblationResult) -> float:
    """Largest absolute metric difference between the rate-0 control and the reverse-only row."""
    a, b = result.control.metrics, result.reference.metrics
    if not (result.control.ok and result.reference.ok):
        return math.inf
    return max(abs(a[k] - b[k]) for k in a)
