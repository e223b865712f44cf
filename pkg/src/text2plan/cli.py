"""Command-line entry point: ``text2plan <command> [options]``."""
from __future__ import annotations

import argparse
import logging
import shutil
import sys
from pathlib import Path

from .errors import (CheckpointError, ClientError, ConfigError, DivergedError, EmptyInputError,
                     FloorplanError, GenerationFailedError)

log = logging.getLogger("text2plan")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LLM, EXIT_DIVERGED, EXIT_MISSING = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class MissingArtifact(Exception):
    pass


def _exists(paths, force: bool) -> bool:
    """True when every output already exists and ``--force`` was not given."""
    paths = [Path(p) for p in paths]
    if force or not paths:
        return False
    return all(p.exists() for p in paths)


def _read_plan(path):
    from .geometry import Floorplan

    p = Path(path)
    if not p.is_file():
        raise MissingArtifact(f"plan file {p} not found")
    text = p.read_text().strip()
    return Floorplan.from_json(text.splitlines()[0] if p.suffix == ".jsonl" else text)


def _client(cfg):
    from .llm import client_from_env

    return client_from_env(cfg.paths.fixtures)


def _demos(cfg):
    from .llm import load_demos

    return load_demos(cfg.llm.demos)


def _write_render(path: Path, plan, cfg):
    from .render import render_png, render_svg

    style = cfg.render.build()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(render_svg(plan, style))
    if cfg.render.png:
        path.with_suffix(".png").write_bytes(render_png(plan, style))


# -- commands -------------------------------------------------------------------

def cmd_init(args, cfg) -> int:
    from .llm import generate_layout_init, init_to_floorplan

    text = (args.text or "").strip()
    if not text:
        raise UsageError("init needs a non-empty description")
    out = Path(args.out or Path(cfg.paths.output) / "init")
    json_path, svg_path = out / "layout_init.json", out / "layout_init.svg"
    if _exists([json_path, svg_path], args.force):
        print(f"{json_path} exists; use --force to regenerate")
        return EXIT_OK
    init = generate_layout_init(text, _demos(cfg), _client(cfg), cfg.llm.max_retries, cfg.llm.variant)
    out.mkdir(parents=True, exist_ok=True)
    json_path.write_text(init.to_json(indent=2) + "\n")
    _write_render(svg_path, init_to_floorplan(init), cfg)
    print(json_path)
    return EXIT_OK


def cmd_describe(args, cfg) -> int:
    from .llm import describe_layout

    plan = _read_plan(args.plan)
    client = None if args.template else _client(cfg)
    text = describe_layout(plan, client)
    if args.out:
        if _exists([args.out], args.force):
            print(f"{args.out} exists; use --force to regenerate")
            return EXIT_OK
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def _load_training_data(path, cfg):
    from .data import build_pairs, load_corpus, load_pairs

    p = Path(path)
    if not p.exists():
        raise MissingArtifact(f"dataset {p} not found")
    first = p.read_text().lstrip().split("\n", 1)[0] if p.is_file() else ""
    if first and '"init"' in first:
        return load_pairs(p)
    plans = load_corpus(p)
    return list(build_pairs(plans, "perturb", jitter=cfg.data.jitter, seed=cfg.seed))


def cmd_train(args, cfg) -> int:
    from .checkpoint import latest_checkpoint, load_checkpoint
    from .engine import train

    data = _load_training_data(args.data or cfg.paths.corpus, cfg)
    if not data:
        raise MissingArtifact("dataset is empty")
    ckpt_dir = Path(args.checkpoints or cfg.paths.checkpoints)
    dcfg, mcfg, tcfg = cfg.diffusion.build(), cfg.model.build(), cfg.train.build(cfg.seed)
    if args.force and ckpt_dir.exists():
        shutil.rmtree(ckpt_dir)
    state = None
    last = latest_checkpoint(ckpt_dir)
    if last is not None:
        state = load_checkpoint(last, expect_model=mcfg, expect_diffusion=dcfg)
        if state.train_cfg != tcfg:
            raise CheckpointError(f"{last} was written with a different training config; use --force")
        if state.step >= tcfg.steps:
            print(f"{last} already at step {state.step}; use --force to retrain")
            return EXIT_OK
        print(f"resuming from {last} at step {state.step}")
    state = train(data, dcfg, tcfg, mcfg, state=state, checkpoint_dir=ckpt_dir,
                  loss_log=ckpt_dir / "loss_log.tsv")
    print(latest_checkpoint(ckpt_dir))
    return EXIT_OK


def cmd_sample(args, cfg) -> int:
    from .align import condition_from_init
    from .checkpoint import latest_checkpoint, load_checkpoint
    from .engine import sample_batch
    from .llm import generate_layout_init
    from .llm.parse import parse_layout_init

    if bool(args.init) == bool(args.text):
        raise UsageError("sample needs exactly one of --init or --text")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    ckpt = Path(args.checkpoint) if args.checkpoint else latest_checkpoint(cfg.paths.checkpoints)
    if ckpt is None or not Path(ckpt).is_file():
        raise MissingArtifact(f"no checkpoint found ({args.checkpoint or cfg.paths.checkpoints})")
    out = Path(args.out or Path(cfg.paths.output) / "samples")
    paths = [out / f"sample_{k:03d}.json" for k in range(args.n)]
    if _exists(paths, args.force):
        print(f"{out} already holds {args.n} samples; use --force to regenerate")
        return EXIT_OK
    if args.init:
        p = Path(args.init)
        if not p.is_file():
            raise MissingArtifact(f"Layout-Init file {p} not found")
        init, _ = parse_layout_init(p.read_text())
    else:
        init = generate_layout_init(args.text, _demos(cfg), _client(cfg), cfg.llm.max_retries, cfg.llm.variant)
    state = load_checkpoint(ckpt)
    dcfg = state.diffusion_cfg
    _, cond = condition_from_init(init)
    plans = sample_batch(state.model, [cond] * args.n, dcfg, [cfg.seed + k for k in range(args.n)])
    out.mkdir(parents=True, exist_ok=True)
    for path, plan in zip(paths, plans):
        path.write_text(plan.to_json() + "\n")
        _write_render(path.with_suffix(".svg"), plan, cfg)
    print(out)
    return EXIT_OK


def cmd_eval(args, cfg) -> int:
    from .metrics import FeatureExtractor, evaluate

    pred_dir, target_dir = Path(args.pred), Path(args.target)
    for d in (pred_dir, target_dir):
        if not d.is_dir() or not any(d.glob("*.json")):
            raise MissingArtifact(f"{d} is missing or holds no .json plans")
    report_path = Path(args.out or Path(cfg.paths.output) / "metrics.tsv")
    if _exists([report_path], args.force):
        print(f"{report_path} exists; use --force to recompute")
        return EXIT_OK
    preds = {p.name: p for p in sorted(pred_dir.glob("*.json"))}
    targets = {p.name: p for p in sorted(target_dir.glob("*.json"))}
    common = sorted(set(preds) & set(targets))
    excluded = sorted(set(preds) ^ set(targets))
    for name in excluded:
        log.warning("no counterpart for %s; excluded", name)
    pairs = [(_read_plan(preds[n]), _read_plan(targets[n])) for n in common]
    pred_set = [_read_plan(p) for p in preds.values()]
    target_set = [_read_plan(p) for p in targets.values()]
    rep = evaluate(pred_set, target_set, pairs, FeatureExtractor(seed=cfg.seed))
    rep.extra["n_excluded"] = len(excluded)
    rep.write(report_path)
    print(report_path)
    return EXIT_OK


def cmd_ablate(args, cfg) -> int:
    from .ablation import ablation_harness, write_tables
    from .experiments import make_samples

    out = Path(args.out or Path(cfg.paths.output) / "ablation")
    names = [out / "conditioning.tsv", out / "rates.tsv", out / "control.tsv"]
    if _exists(names, args.force):
        print(f"{out} already holds ablation tables; use --force to rerun")
        return EXIT_OK
    a = cfg.ablation
    setup = a.setup(cfg.seed)
    train_set = make_samples(a.n_train, a.room_count, cfg.seed, a.jitter)
    test_set = make_samples(a.n_test, a.room_count, cfg.seed + 10_000, a.jitter)
    result = ablation_harness(train_set, test_set, setup)
    for p in write_tables(result, out).values():
        print(p)
    return EXIT_OK if any(r.ok for r in result.rows) else EXIT_FAIL


def cmd_synth(args, cfg) -> int:
    from .data import build_pairs, save_pairs, synth_generate
    from .geometry import write_jsonl

    out = Path(args.out or cfg.paths.corpus)
    if _exists([out], args.force):
        print(f"{out} exists; use --force to regenerate")
        return EXIT_OK
    n = args.n if args.n is not None else cfg.data.n_samples
    rooms = args.rooms if args.rooms is not None else cfg.data.room_count
    plans = synth_generate(n, rooms, cfg.seed)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.plans_only:
        write_jsonl(out, plans)
    else:
        save_pairs(out, build_pairs(plans, "perturb", jitter=cfg.data.jitter, seed=cfg.seed))
    print(out)
    return EXIT_OK


def cmd_render(args, cfg) -> int:
    out = Path(args.out)
    if _exists([out], args.force):
        print(f"{out} exists; use --force to overwrite")
        return EXIT_OK
    _write_render(out, _read_plan(args.plan), cfg)
    print(out)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON config file")
    common.add_argument("--seed", type=int, help="seed for every random choice in the command")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="text2plan", description="Text-to-floorplan pipeline.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", parents=[common], help="description -> Layout-Init JSON + preview")
    p.add_argument("text", nargs="?", default="")
    p.add_argument("--out", help="output directory")
    p.set_defaults(fn=cmd_init)

    p = sub.add_parser("describe", parents=[common], help="floorplan -> textual description")
    p.add_argument("plan")
    p.add_argument("--out")
    p.add_argument("--template", action="store_true", help="use the built-in template, no client")
    p.set_defaults(fn=cmd_describe)

    p = sub.add_parser("train", parents=[common], help="train the denoiser (resumable)")
    p.add_argument("--data", help="pairs JSONL or floorplan corpus")
    p.add_argument("--checkpoints", help="checkpoint directory")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("sample", parents=[common], help="Layout-Init or text -> floorplans")
    p.add_argument("--init", help="Layout-Init JSON file (skips the language model)")
    p.add_argument("--text", help="description to send through the language model first")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--checkpoint")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("eval", parents=[common], help="score predicted plans against targets")
    p.add_argument("pred")
    p.add_argument("target")
    p.add_argument("--out", help="report file")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("ablate", parents=[common], help="conditioning ablation tables")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_ablate)

    p = sub.add_parser("synth", parents=[common], help="generate synthetic training data")
    p.add_argument("--n", type=int)
    p.add_argument("--rooms", type=int)
    p.add_argument("--out")
    p.add_argument("--plans-only", action="store_true", help="write floorplans without Layout-Inits")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("render", parents=[common], help="floorplan -> SVG")
    p.add_argument("plan")
    p.add_argument("out")
    p.set_defaults(fn=cmd_render)
    return ap


def main(argv=None) -> int:
    from .config import load_config

    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.seed)
        return args.fn(args, cfg)
    except (UsageError, ConfigError, EmptyInputError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GenerationFailedError, ClientError) as exc:
        print(f"language model failure: {exc}", file=sys.stderr)
        return EXIT_LLM
    except DivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (MissingArtifact, CheckpointError) as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except FloorplanError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
