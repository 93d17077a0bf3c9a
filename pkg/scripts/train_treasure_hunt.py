#!/usr/bin/env python3
"""Train a tabular-Q agent on Treasure Hunt and compare against random.

Writes per-epoch metrics for both policies and prints the tail-window
summary that the learning-sanity check uses.

Usage: python scripts/train_treasure_hunt.py [--seed N] [--epochs N] [--out DIR]
"""

import argparse
from pathlib import Path

from magrid.envs import TreasureHuntConfig
from magrid.models import EpsilonSchedule
from magrid.runner import ExperimentConfig, run_experiment, write_metrics


def tail_mean(metrics, k=50):
    tail = metrics[-k:]
    return sum(m.per_agent_reward[0] for m in tail) / len(tail)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--epochs", type=int, default=500)
    parser.add_argument("--turns", type=int, default=50)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = dict(
        env="treasure_hunt",
        env_config=TreasureHuntConfig(size=5, n_agents=1, gem_prob=0.2),
        seed=args.seed,
        epochs=args.epochs,
        turns_per_epoch=args.turns,
        epsilon=EpsilonSchedule(1.0, 0.1, 0.75),
    )

    print(f"training tabular-Q: {args.epochs} epochs x {args.turns} turns, seed {args.seed}")
    learned = run_experiment(ExperimentConfig(
        **base, model="tabular_q", model_params={"alpha": 0.1, "gamma": 0.9},
    ))
    baseline = run_experiment(ExperimentConfig(**base, model="random"))

    write_metrics(learned, out / "tabular_q.csv")
    write_metrics(baseline, out / "random.csv")

    q, r = tail_mean(learned), tail_mean(baseline)
    print(f"final-50-epoch mean reward: tabular_q {q:.2f}  random {r:.2f}  ratio {q / r:.2f}")
    print(f"metrics in {out}/")


if __name__ == "__main__":
    main()
