"""Command-line entry point: converge / sweep / timing / plots."""

import argparse
import os
import sys

from . import runner
from .config import ExperimentConfig, load_config


def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seeds", help="comma-separated seed list override")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--sweep-axis", dest="sweep_axis",
                   choices=("power", "elements", "kappa", "users"))
    p.add_argument("--sweep-values", dest="sweep_values",
                   help="comma-separated sweep grid override")
    p.add_argument("--multiplier-mode", dest="multiplier_mode",
                   choices=("dual-ascent", "paper"))
    p.add_argument("--multiplier-solve", dest="multiplier_solve",
                   choices=("exact", "single"))
    p.add_argument("--scenario", help="scenario name override")


def _build_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    updates = {}
    if args.seeds:
        updates["seeds"] = tuple(int(s) for s in args.seeds.split(","))
    if args.sweep_axis:
        updates["sweep_axis"] = args.sweep_axis
    if args.sweep_values:
        updates["sweep_values"] = tuple(
            float(v) for v in args.sweep_values.split(","))
    if args.multiplier_mode:
        updates["multiplier_mode"] = args.multiplier_mode
    if args.multiplier_solve:
        updates["multiplier_solve"] = args.multiplier_solve
    if args.scenario:
        updates["scenario"] = args.scenario
    if args.out:
        updates["out_dir"] = args.out
    if updates:
        base = {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}
        base.update(updates)
        cfg = ExperimentConfig(**base)
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risbeam",
        description="max-min SINR beamforming experiments for the "
                    "time-modulated transmissive-surface downlink",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_conv = sub.add_parser("converge", help="per-iteration solver traces")
    _add_common(p_conv)
    p_conv.add_argument("--wall-clock", action="store_true",
                        help="record measured wall time per iteration "
                             "(breaks byte-reproducibility)")

    p_sweep = sub.add_parser("sweep", help="final min-SINR across a grid")
    _add_common(p_sweep)
    p_sweep.add_argument("--wall-clock", action="store_true")

    p_time = sub.add_parser("timing", help="per-iteration wall time scaling")
    _add_common(p_time)
    p_time.add_argument("--iters", type=int, default=30,
                        help="iterations per timing cell")

    p_plots = sub.add_parser("plots", help="emit the plot script")
    p_plots.add_argument("--out", required=True, help="directory with CSVs")

    args = parser.parse_args(argv)

    if args.command == "plots":
        path = runner_plots(args.out)
        print(f"plot script written to {path}")
        return 0

    cfg = _build_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    if args.command == "converge":
        rows = runner.run_convergence(cfg, wall_clock=args.wall_clock)
        out = os.path.join(cfg.out_dir, "convergence.csv")
    elif args.command == "sweep":
        rows = runner.run_sweep(cfg, wall_clock=args.wall_clock)
        out = os.path.join(cfg.out_dir, f"sweep_{cfg.sweep_axis}.csv")
    else:
        rows = runner.run_timing(cfg, iters=args.iters)
        out = os.path.join(cfg.out_dir, f"timing_{cfg.sweep_axis}.csv")
    runner.write_rows(rows, out)
    print(f"{len(rows)} rows written to {out}")
    return 0


def runner_plots(out_dir):
    from .plots import emit_plots

    return emit_plots(out_dir)


if __name__ == "__main__":
    sys.exit(main())
