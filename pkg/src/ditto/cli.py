"""Operator entry point: run pipelines, inspect manifests, emit reports.

Exit codes: 0 success, 1 bad usage/config, 2 partial (some assets FAILED),
3 budget exceeded, 4 corrupt state.
"""

import argparse
import json
import os
import sys

from . import manifest, pipeline, training
from .encoding import canonical_json
from .backends.server import serve_forever
from .errors import CorruptJournal, DittoError, InvalidConfig


def _state_dir() -> str:
    return os.environ.get("DITTO_HOME", os.path.join(os.path.expanduser("~"), ".ditto"))


def _parse_override(text: str):
    if "=" not in text:
        raise InvalidConfig(f"override must be key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _apply_override(cfg: dict, dotted: str, value):
    parts = dotted.split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise InvalidConfig(f"cannot override through scalar at {p!r}")
    node[parts[-1]] = value


def _load_config(args) -> pipeline.RunConfig:
    cfg = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            cfg = json.load(f)
    for item in args.set or []:
        key, value = _parse_override(item)
        _apply_override(cfg, key, value)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.backends:
        cfg["backends"] = "inprocess" if args.backends == "inprocess" else args.backends.split(",")
    return pipeline.RunConfig.from_dict(cfg)


def _print_summary(summary: pipeline.RunSummary):
    print(f"assets      {summary.total_assets}")
    print(f"filtered    {summary.filtered}")
    print(f"published   {summary.published}")
    print(f"rejected    {summary.rejected}")
    print(f"failed      {summary.failed}")
    print(f"gpu-seconds {canonical_json(summary.total_gpu_seconds)}")
    print(f"manifest    {summary.manifest_digest}")
    if summary.budget_exceeded:
        print("budget exceeded: dispatch halted")


def cmd_run(args) -> int:
    config = _load_config(args)
    run_dir = args.run_dir or os.path.join(_state_dir(), "runs", "default")
    assets = sorted(args.assets)
    summary = pipeline.execute(config, assets, run_dir)
    _print_summary(summary)
    return summary.exit_code


def cmd_resume(args) -> int:
    summary = pipeline.resume(args.run_dir)
    _print_summary(summary)
    return summary.exit_code


def cmd_report(args) -> int:
    state = manifest.replay(args.manifest)
    if args.kind == "composition":
        row = manifest.stats_composition(state)
        print("count resolution frames fps global local")
        print(f"{row.count} {row.width}x{row.height} {row.frames} {row.fps} "
              f"{row.global_count} {row.local_count}")
        if row.count:
            print(f"global_fraction {row.global_count / row.count:.4f}")
            print(f"local_fraction {row.local_count / row.count:.4f}")
    elif args.kind == "tokens":
        for token, count in manifest.stats_tokens(state, args.top_k):
            print(f"{token} {count}")
    elif args.kind == "cost":
        report = pipeline.budget_report(state, args.target_count)
        print("stage total_gpu_seconds count mean")
        for stage, total, count, mean in report.rows():
            print(f"{stage} {canonical_json(total)} {count} {canonical_json(round(mean, 6))}")
        print(f"per_sample_mean_gpu_seconds {canonical_json(round(report.per_sample_mean, 6))}")
        print(f"projected_gpu_days_at_{report.target_count} {canonical_json(round(report.projected_gpu_days, 2))}")
    return 0


def cmd_mock_serve(args) -> int:
    os.makedirs(args.media_root, exist_ok=True)
    serve_forever(args.media_root, args.address, args.port)
    return 0


def cmd_math(args) -> int:
    schedule = training.CurriculumSchedule(args.warmup, args.total)
    if args.math_op == "schedule":
        print("step scaffold_probability")
        step = 0
        while step <= schedule.total_steps:
            p = training.scaffold_probability(step, schedule)
            print(f"{step} {p:.6f}")
            step += args.every
        return 0
    if args.math_op == "loss":
        with open(args.vectors, "r", encoding="utf-8") as f:
            for i, line in enumerate(f):
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                sample = training.FlowSample(obj["z0"], obj["eps"], obj["t"])
                loss = training.flow_matching_loss(obj["predicted_field"], sample,
                                                   reduction=args.reduction)
                print(f"{i} {loss:.9f}")
        return 0
    raise InvalidConfig(f"unknown math op {args.math_op!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ditto", description="video-editing data synthesis pipeline")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a pipeline over source videos")
    run.add_argument("assets", nargs="+", help="source .dvf video files")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")
    run.add_argument("--run-dir", help="state directory for this run")
    run.add_argument("--backends", help="'inprocess' or comma-separated URLs")
    run.set_defaults(fn=cmd_run)

    res = sub.add_parser("resume", help="resume an interrupted run")
    res.add_argument("--run-dir", required=True)
    res.set_defaults(fn=cmd_resume)

    rep = sub.add_parser("report", help="reports over a manifest journal")
    rep.add_argument("--manifest", required=True, help="journal file path")
    rep.add_argument("--kind", choices=("composition", "tokens", "cost"), required=True)
    rep.add_argument("--top-k", type=int, default=10)
    rep.add_argument("--target-count", type=int, default=1_000_000)
    rep.set_defaults(fn=cmd_report)

    srv = sub.add_parser("mock-serve", help="serve the mock backends over HTTP")
    srv.add_argument("--address", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8787)
    srv.add_argument("--media-root", required=True)
    srv.set_defaults(fn=cmd_mock_serve)

    math = sub.add_parser("math", help="training-math oracles")
    math.add_argument("math_op", choices=("schedule", "loss"))
    math.add_argument("--warmup", type=int, default=5000)
    math.add_argument("--total", type=int, default=16000)
    math.add_argument("--every", type=int, default=1000)
    math.add_argument("--vectors", help="line-delimited JSON flow samples")
    math.add_argument("--reduction", choices=("sum", "mean"), default="sum")
    math.set_defaults(fn=cmd_math)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InvalidConfig as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except CorruptJournal as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except DittoError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
