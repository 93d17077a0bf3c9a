#!/usr/bin/env python3
"""Record a Cleanup run to a replay file and print a few rendered frames.

The output file can be viewed with ``magrid replay FILE`` or loaded into
the web UI's replay viewer.

Usage: python scripts/record_cleanup_replay.py [--seed N] [--agents N] [--out FILE]
"""

import argparse

from magrid.envs import CleanupConfig
from magrid.replay import read_replay, render_ascii
from magrid.runner import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--agents", type=int, default=3)
    parser.add_argument("--epochs", type=int, default=2)
    parser.add_argument("--turns", type=int, default=60)
    parser.add_argument("--out", default="cleanup_replay.jsonl")
    args = parser.parse_args()

    cfg = ExperimentConfig(
        env="cleanup",
        env_config=CleanupConfig(n_agents=args.agents),
        seed=args.seed,
        epochs=args.epochs,
        turns_per_epoch=args.turns,
        model="random",
        record_path=args.out,
    )
    run_experiment(cfg)
    header, frames = read_replay(args.out)
    print(f"recorded {len(frames)} frames to {args.out}")
    for frame in (frames[0], frames[len(frames) // 2], frames[-1]):
        print(f"-- epoch {frame.epoch} turn {frame.turn} --")
        for line in render_ascii(header, frame):
            print(line)


if __name__ == "__main__":
    main()
