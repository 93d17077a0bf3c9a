"""Command line entry points.

``magrid run``    -- run an experiment, optionally recording replay/metrics.
``magrid serve``  -- run an interactive session server (human play + web UI).
``magrid replay`` -- print a recorded replay as ASCII frames.

``--config FILE`` takes a JSON document mirroring ExperimentConfig;
explicit flags override file values; unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

from .envs import CleanupConfig, TreasureHuntConfig
from .errors import ConfigError, EngineError
from .models import MODEL_KINDS, EpsilonSchedule
from .replay import read_replay, render_ascii
from .runner import ENV_KINDS, ExperimentConfig, run_experiment


def _dataclass_from(cls, obj: dict, where: str):
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = set(obj) - fields
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    return cls(**obj)


def load_config_file(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top level must be an object")
    env = obj.get("env", "treasure_hunt")
    env_cls = {"treasure_hunt": TreasureHuntConfig, "cleanup": CleanupConfig}.get(env)
    if env_cls is None:
        raise ConfigError(f"unknown env {env!r} (expected one of {ENV_KINDS})")
    sub = dict(obj)
    sub["env"] = env
    if "env_config" in sub:
        sub["env_config"] = _dataclass_from(env_cls, sub["env_config"], "env_config")
    else:
        sub["env_config"] = env_cls()
    if "epsilon" in sub:
        sub["epsilon"] = _dataclass_from(EpsilonSchedule, sub["epsilon"], "epsilon")
    return _dataclass_from(ExperimentConfig, sub, path)


def _experiment_config(args) -> ExperimentConfig:
    if args.config:
        config = load_config_file(args.config)
    else:
        config = ExperimentConfig()
    if args.env is not None:
        config.env = args.env
        if args.env == "treasure_hunt" and not isinstance(config.env_config, TreasureHuntConfig):
            config.env_config = TreasureHuntConfig()
        if args.env == "cleanup" and not isinstance(config.env_config, CleanupConfig):
            config.env_config = CleanupConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.epochs is not None:
        config.epochs = args.epochs
    if args.turns is not None:
        config.turns_per_epoch = args.turns
    if args.agents is not None:
        config.env_config.n_agents = args.agents
    if args.model is not None:
        config.model = args.model
    if args.human_agent is not None:
        kinds = config.model_kinds()
        if not 0 <= args.human_agent < len(kinds):
            raise ConfigError(
                f"--human-agent {args.human_agent} out of range for {len(kinds)} agents"
            )
        kinds[args.human_agent] = "human"
        config.model = kinds
    if args.record is not None:
        config.record_path = args.record
    if args.metrics is not None:
        config.metrics_path = args.metrics
    return config


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--env", choices=ENV_KINDS)
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--turns", type=int)
    p.add_argument("--agents", type=int)
    p.add_argument("--model", choices=[k for k in MODEL_KINDS if k != "human"])
    p.add_argument("--human-agent", type=int, metavar="ID",
                   help="give this agent slot to a human player")
    p.add_argument("--config", metavar="FILE", help="JSON ExperimentConfig document")
    p.add_argument("--record", metavar="FILE", help="write a replay file")
    p.add_argument("--metrics", metavar="FILE", help="write a metrics CSV")


def cmd_run(args) -> int:
    config = _experiment_config(args)
    every = max(1, config.epochs // 10)
    t0 = time.perf_counter()

    def progress(m):
        if m.epoch % every == 0 or m.epoch == config.epochs - 1:
            rewards = " ".join(f"{r:.2f}" for r in m.per_agent_reward)
            loss = "-" if m.mean_loss is None else f"{m.mean_loss:.4f}"
            print(
                f"epoch {m.epoch:4d}  reward [{rewards}]  loss {loss}  eps {m.epsilon:.3f}",
                file=sys.stderr,
            )

    metrics = run_experiment(config, on_epoch=progress)
    elapsed = time.perf_counter() - t0
    n = config.n_agents
    totals = [sum(m.per_agent_reward[i] for m in metrics) for i in range(n)]
    print(f"{config.epochs} epochs x {config.turns_per_epoch} turns in {elapsed:.2f}s")
    for i, total in enumerate(totals):
        print(f"agent {i}: total reward {total:.2f}, mean/epoch {total / config.epochs:.3f}")
    if config.record_path:
        print(f"replay: {config.record_path}")
    if config.metrics_path:
        print(f"metrics: {config.metrics_path}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    config = _experiment_config(args)
    if "human" not in config.model_kinds():
        raise ConfigError("serve needs at least one human agent (use --human-agent ID)")
    serve(
        config,
        port=args.port,
        host=args.host,
        timeout_ms=args.timeout_ms,
        wait_for_human=not args.no_wait,
        ui_dir=args.ui_dir,
    )
    return 0


def cmd_replay(args) -> int:
    header, frames = read_replay(args.file)
    for frame in frames:
        print(f"-- epoch {frame.epoch} turn {frame.turn} --")
        for line in render_ascii(header, frame):
            print(line)
        scores = " ".join(f"{aid}:{s:.1f}" for aid, s in frame.scores)
        print(f"scores  {scores}")
        if args.fps > 0:
            time.sleep(1.0 / args.fps)
    print(f"{len(frames)} frames ({header.env}, {header.n_agents} agents)")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="magrid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment")
    _add_run_flags(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_serve = sub.add_parser("serve", help="serve an interactive session")
    _add_run_flags(p_serve)
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--timeout-ms", type=int, default=10_000,
                         help="per-turn human action deadline")
    p_serve.add_argument("--no-wait", action="store_true",
                         help="start without waiting for human clients to join")
    p_serve.add_argument("--ui-dir", default=None, help="static web UI bundle directory")
    p_serve.set_defaults(fn=cmd_serve)

    p_replay = sub.add_parser("replay", help="print a replay as ASCII frames")
    p_replay.add_argument("file")
    p_replay.add_argument("--fps", type=float, default=0.0,
                          help="frames per second (0 = no delay)")
    p_replay.set_defaults(fn=cmd_replay)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
