"""Conditioning ablation on the toy dataset; writes three TSV tables.

    python scripts/ablation.py [--config cfg.yaml] [--out runs/ablation]
"""
import argparse
import logging

from text2plan.ablation import ablation_harness, control_gap, write_tables
from text2plan.config import load_config
from text2plan.experiments import make_samples


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", default="runs/ablation")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = load_config(args.config, args.seed)
    a = cfg.ablation
    train_set = make_samples(a.n_train, a.room_count, cfg.seed, a.jitter)
    test_set = make_samples(a.n_test, a.room_count, cfg.seed + 10_000, a.jitter)
    result = ablation_harness(train_set, test_set, a.setup(cfg.seed))
    for name, path in write_tables(result, args.out).items():
        print(f"== {name} ({path})")
        print(path.read_text(), end="")
    print(f"control vs reverse-only max gap: {control_gap(result):.3g}")


if __name__ == "__main__":
    main()
