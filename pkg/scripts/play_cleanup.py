#!/usr/bin/env python3
"""Host a live Cleanup session: you drive agent 0 from the browser, the
rest are random policies. Open http://127.0.0.1:8765/ once it starts.

Usage: python scripts/play_cleanup.py [--port N] [--agents N] [--turns N]
"""

import argparse

from magrid.envs import CleanupConfig
from magrid.runner import ExperimentConfig
from magrid.server import serve


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=8765)
    parser.add_argument("--agents", type=int, default=3)
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--turns", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    model = ["human"] + ["random"] * (args.agents - 1)
    cfg = ExperimentConfig(
        env="cleanup",
        env_config=CleanupConfig(n_agents=args.agents),
        seed=args.seed,
        epochs=args.epochs,
        turns_per_epoch=args.turns,
        model=model,
    )
    serve(cfg, port=args.port)


if __name__ == "__main__":
    main()
