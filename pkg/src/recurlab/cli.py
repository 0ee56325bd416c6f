"""Command line entry point: ``recurlab <kind> [--config FILE] [--seed S] [--out DIR] [--threads T]``.

Exit status is 0 when the run passed every configured threshold, 1 when it
ran but some threshold or point failed, and 2 for usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import KINDS, ConfigError, ExperimentConfig, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="recurlab", description="Shrinking-ball recurrence experiments.")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="KIND")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        p.add_argument("--config", type=Path, help="JSON config; flags override its top-level fields")
        p.add_argument("--seed", type=int, help="master seed (required here or in the config)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, help="worker threads")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
    if data.get("kind", args.kind) != args.kind:
        raise ConfigError("kind", f"config is for {data['kind']!r}, not {args.kind!r}")
    data["kind"] = args.kind
    for name in ("seed", "out", "threads"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    return ExperimentConfig.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
    except (ConfigError, TypeError) as exc:
        print(f"recurlab: config error: {exc}", file=sys.stderr)
        return 2
    if config.out is None:
        config.out = f"results/{config.kind}"
    result = run(config)
    doc = result.summary_document()
    verdicts = doc["summary"].get("thresholds", {})
    for name, v in verdicts.items():
        print(f"{name}: {'PASS' if v['passed'] else 'FAIL'} value={v['value']} limit={v['limit']}")
    for failure in result.failures:
        print(f"task {failure['task']} failed: {failure['error']}", file=sys.stderr)
    print(f"wrote {config.out} in {result.wall_time:.1f}s")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
