"""Command line interface: run a configuration, a built-in preset, or the invariant suite.

Exit codes: 0 success, 1 configuration or usage error, 2 breakdown,
3 push-out failure, 4 invariant failure in ``verify``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import PRESETS, parse_config, preset, serialize_config
from .obstacle import signed_distance
from .output import OutputError, atomic_write, is_planar, render_svg, write_frames, write_json
from .sim import ConfigError, RunOutcome, SimConfig, run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BREAKDOWN = 2
EXIT_PUSH_FAILURE = 3
EXIT_VERIFY = 4
STATUS_CODES = {"completed": EXIT_OK, "breakdown": EXIT_BREAKDOWN, "push_failure": EXIT_PUSH_FAILURE}


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with the configuration error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stemgrowth", description="Grow stems and vines around obstacles.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    r = sub.add_parser("run", help="run a configuration file")
    r.add_argument("--config", required=True, help="JSON or YAML configuration")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--no-png", action="store_true", help="skip the matplotlib figure")

    q = sub.add_parser("preset", help="run a built-in scenario")
    q.add_argument("--name", required=True, choices=PRESETS)
    q.add_argument("--out", required=True, help="output directory")
    q.add_argument("--ds", type=float, default=0.05, help="grid spacing (default 0.05)")
    q.add_argument("--no-png", action="store_true", help="skip the matplotlib figure")
    q.add_argument("--save-config", action="store_true",
                   help="also write the preset as config.json")

    v = sub.add_parser("verify", help="check structural invariants on a short run")
    v.add_argument("--config", required=True, help="JSON or YAML configuration")
    v.add_argument("--steps", type=int, default=100, help="number of steps (default 100)")
    return p


def summary(outcome: RunOutcome, cfg: SimConfig) -> dict:
    final = outcome.log.last.positions
    depth = 0.0
    if len(cfg.obstacles):
        depth = max(0.0, -float(np.min(signed_distance(cfg.obstacles, final))))
    return {
        "status": outcome.status,
        "t_final": outcome.t,
        "penetration_final": depth,
        "max_step_omega_norm": outcome.max_step_omega_norm,
        "max_step_measure_mass": outcome.max_step_measure_mass,
        "frames_written": len(outcome.log),
    }


def execute(cfg: SimConfig, out_dir, png: bool = True, title: str | None = None) -> int:
    """Run ``cfg`` and write frames.csv, summary.json and, for planar runs, the figures."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    outcome = run(cfg)
    info = summary(outcome, cfg)
    write_frames(outcome.log, out_dir / "frames.csv", cfg.obstacles)
    write_json(out_dir / "summary.json", info)
    written = ["frames.csv", "summary.json"]
    if is_planar(outcome.log, cfg.obstacles):
        render_svg(outcome.log, cfg.obstacles, out_dir / "figure.svg")
        written.append("figure.svg")
        if png:
            from .plotting import plot_run

            plot_run(outcome.log, cfg.obstacles, out_dir / "figure.png", title=title)
            written.append("figure.png")
    for key, value in info.items():
        print(f"{key}\t{value}")
    if outcome.report is not None:
        for key, value in outcome.report.as_dict().items():
            print(f"breakdown.{key}\t{value}")
    if outcome.message:
        print(f"message\t{outcome.message}")
    print(f"wrote\t{', '.join(written)} in {out_dir}")
    return STATUS_CODES[outcome.status]


def _verify(cfg: SimConfig, steps: int) -> int:
    from .invariants import check_invariants

    if steps < 1:
        raise ConfigError("--steps", "must be at least 1")
    results = check_invariants(cfg, steps)
    for res in results:
        print(res.line())
    return EXIT_OK if all(r.passed is not False for r in results) else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = parse_config(args.config)
            return execute(cfg, args.out, png=not args.no_png, title=Path(args.config).stem)
        if args.command == "preset":
            cfg = preset(args.name, args.ds)
            code = execute(cfg, args.out, png=not args.no_png, title=args.name)
            if args.save_config:
                atomic_write(Path(args.out) / "config.json", serialize_config(cfg))
            return code
        return _verify(parse_config(args.config), args.steps)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
