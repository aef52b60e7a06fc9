"""Command line front end of the experiment harness.

Configuration can come from a flat "key = value" file, from flags, or both;
flags win. Exit codes: 0 on success, 1 on configuration errors, 2 on a
runtime invariant failure inside a simulation.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional

from .controllers import CONTROLLERS, ControllerParams
from .harness import ExperimentPlan, run_plan, summarize, write_results_csv, write_summary_csv
from .network import NetworkConfig

_NETWORK_KEYS = {f.name for f in dataclasses.fields(NetworkConfig)} - {"q", "f", "seed", "duration_s"}
_CONTROL_KEYS = {f.name for f in dataclasses.fields(ControllerParams)}
_PLAN_KEYS = {
    "controllers",
    "scenarios",
    "q",
    "f",
    "runs",
    "duration",
    "warmup",
    "seed",
    "out",
    "summary_out",
    "workers",
}


class ConfigError(Exception):
    pass


def _parse_list(text: str) -> list[str]:
    return [part for chunk in text.split(",") for part in chunk.split() if part]


def load_config_file(path: str) -> dict[str, str]:
    """Read a flat key = value file; '#' starts a comment."""
    out: dict[str, str] = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _coerce(value: str, like) -> object:
    kind = type(like)
    if kind is bool:
        return value.lower() in ("1", "true", "yes", "on")
    return kind(value)


def build_plan(file_cfg: dict[str, str], args: argparse.Namespace) -> tuple[ExperimentPlan, dict]:
    network: dict = {}
    control: dict = {}
    plan_kwargs: dict = {}
    io_cfg = {"out": None, "summary_out": None, "workers": 1}

    net_defaults = NetworkConfig()
    ctl_defaults = ControllerParams()
    for key, value in file_cfg.items():
        if key in _NETWORK_KEYS:
            network[key] = _coerce(value, getattr(net_defaults, key))
        elif key in _CONTROL_KEYS:
            control[key] = _coerce(value, getattr(ctl_defaults, key))
        elif key == "controllers":
            plan_kwargs["controllers"] = tuple(_parse_list(value))
        elif key == "scenarios":
            plan_kwargs["scenarios"] = tuple(_parse_list(value))
        elif key == "q":
            plan_kwargs["q_values"] = tuple(float(x) for x in _parse_list(value))
        elif key == "f":
            plan_kwargs["f_values"] = tuple(float(x) for x in _parse_list(value))
        elif key == "runs":
            plan_kwargs["runs_per_cell"] = int(value)
        elif key == "duration":
            plan_kwargs["duration_s"] = int(value)
        elif key == "warmup":
            plan_kwargs["warmup_s"] = int(value)
        elif key == "seed":
            plan_kwargs["base_seed"] = int(value)
        elif key in ("out", "summary_out"):
            io_cfg[key] = value
        elif key == "workers":
            io_cfg["workers"] = int(value)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    if args.controllers:
        plan_kwargs["controllers"] = tuple(_parse_list(args.controllers))
    if args.scenario:
        plan_kwargs["scenarios"] = tuple(_parse_list(args.scenario))
    if args.q:
        plan_kwargs["q_values"] = tuple(float(x) for x in _parse_list(args.q))
    if args.f:
        plan_kwargs["f_values"] = tuple(float(x) for x in _parse_list(args.f))
    if args.runs is not None:
        plan_kwargs["runs_per_cell"] = args.runs
    if args.duration is not None:
        plan_kwargs["duration_s"] = args.duration
    if args.warmup is not None:
        plan_kwargs["warmup_s"] = args.warmup
    if args.seed is not None:
        plan_kwargs["base_seed"] = args.seed
    if args.full_scale:
        plan_kwargs.setdefault("runs_per_cell", 100)
        plan_kwargs.setdefault("duration_s", 10800)
    if args.out:
        io_cfg["out"] = args.out
    if args.summary_out:
        io_cfg["summary_out"] = args.summary_out
    if args.workers is not None:
        io_cfg["workers"] = args.workers

    try:
        plan = ExperimentPlan(network=network, control=control, **plan_kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not plan.cells():
        raise ConfigError("the plan contains no runnable cells")
    if not io_cfg["out"]:
        raise ConfigError("an output path is required (--out or 'out = ...')")
    return plan, io_cfg


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridsignals",
        description="Batch traffic-signal control experiments on a simulated road grid.",
    )
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--controllers", help="comma separated controller names")
    parser.add_argument("--scenario", help="detection scenarios: rvd, vsn")
    parser.add_argument("--q", help="entry flows in vehicles/hour, comma separated")
    parser.add_argument("--f", help="slow-vehicle fractions in [0, 1], comma separated")
    parser.add_argument("--runs", type=int, help="replications per cell")
    parser.add_argument("--duration", type=int, help="simulated seconds per run")
    parser.add_argument("--warmup", type=int, help="warm-up seconds excluded from statistics")
    parser.add_argument("--seed", type=int, help="base seed of the sweep")
    parser.add_argument("--out", help="results CSV path")
    parser.add_argument("--summary-out", help="summary CSV path")
    parser.add_argument("--workers", type=int, help="parallel worker processes")
    parser.add_argument(
        "--log-detections",
        metavar="PATH",
        help="write every detection as newline-delimited JSON (single process)",
    )
    parser.add_argument("--audit", action="store_true", help="run per-step invariant checks")
    parser.add_argument(
        "--full-scale",
        action="store_true",
        help="use 100 runs of 3 simulated hours per cell unless overridden",
    )
    parser.add_argument(
        "--list-controllers", action="store_true", help="print the controller names and exit"
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    if args.list_controllers:
        for name in CONTROLLERS:
            print(name)
        return 0
    try:
        file_cfg = load_config_file(args.config) if args.config else {}
        plan, io_cfg = build_plan(file_cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    collected = []
    interrupted = False
    try:
        results = run_plan(
            plan,
            workers=io_cfg["workers"],
            audit=args.audit,
            progress=collected.append,
            detection_log_path=args.log_detections,
        )
    except KeyboardInterrupt:
        interrupted = True
        results = sorted(collected, key=lambda r: (r.controller, r.scenario, r.q, r.f, r.run))
    except AssertionError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2

    write_results_csv(io_cfg["out"], results)
    summaries = summarize(results)
    if io_cfg["summary_out"]:
        write_summary_csv(io_cfg["summary_out"], summaries)
    for s in summaries:
        mean = "n/a" if s.mean_delay_s is None else f"{s.mean_delay_s:.1f}s"
        half = "n/a" if s.ci95_half_width_s is None else f"{s.ci95_half_width_s:.1f}s"
        print(
            f"{s.controller} {s.scenario} q={s.q:g} f={s.f:g}: "
            f"mean delay {mean} (+/- {half}, n={s.n_runs})"
        )
    if interrupted:
        print("interrupted: partial results flushed", file=sys.stderr)
        return 130
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
