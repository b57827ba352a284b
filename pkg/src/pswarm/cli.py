"""Command-line front end.

Subcommands::

    pswarm run --config FILE [--seed N] [--t-max N] [--trace PATH] [--dump PATH]
    pswarm analyze [--omega LO:HI] [--phi LO:HI] [--res N|NxM] [--output PATH]
    pswarm init-preview --config FILE [--seed N] [--output PATH]
    pswarm list-problems

Relative output paths are resolved against ``$PSWARM_OUTPUT_DIR`` when it is
set, else against the working directory.  Exit status: 0 on success, 2 on
bad usage, 3 on an invalid configuration, 4 on a failure during the run.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import os
import re
import sys
from pathlib import Path

from . import config as configio
from .engine import ConfigError, EvaluationError, resolve_problem, run, sample_initial_states
from .problems import get_problem, problem_names
from .trajectory import convergence_triangle, dominant_root_grid, write_grid_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

OUTPUT_DIR_ENV = "PSWARM_OUTPUT_DIR"


def output_path(path: str | None, default_name: str) -> Path | None:
    """Where to write an output; ``-`` means standard output (returns None)."""
    if path == "-":
        return None
    p = Path(path if path is not None else default_name)
    if not p.is_absolute():
        p = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / p
    return p


def _write_text(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _range(text: str) -> tuple[float, float]:
    m = re.fullmatch(r"\s*([^:]+):([^:]+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        lo, hi = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in LO:HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"need LO < HI, got {text!r}")
    return lo, hi


def _resolution(text: str) -> int | tuple[int, int]:
    m = re.fullmatch(r"(\d+)(?:x(\d+))?", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected N or NxM, got {text!r}")
    n = int(m.group(1))
    res = n if m.group(2) is None else (n, int(m.group(2)))
    if min(res if isinstance(res, tuple) else (res,)) < 2:
        raise argparse.ArgumentTypeError("resolution must be at least 2")
    return res


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pswarm", description="Configurable particle swarm optimization.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configuration and write its trace")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=_seed, help="override swarm.seed")
    p.add_argument("--t-max", type=_positive_int, help="override termination.t_max")
    p.add_argument("--trace", help="trace CSV path (default: output.trace, else trace.csv); '-' for stdout")
    p.add_argument("--dump", help="full trajectory dump CSV path")

    p = sub.add_parser("analyze", help="dominant-root grid over (omega, phi)")
    p.add_argument("--omega", type=_range, default=(-1.0, 2.0), help="omega range LO:HI (default -1:2)")
    p.add_argument("--phi", type=_range, default=(0.0, 5.0), help="phi range LO:HI (default 0:5)")
    p.add_argument("--res", type=_resolution, default=300, help="N or NxM grid points (default 300)")
    p.add_argument("--output", default=None, help="grid CSV path (default grid.csv); '-' for stdout")

    p = sub.add_parser("init-preview", help="sample and write the initial populations")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=_seed, help="override swarm.seed")
    p.add_argument("--output", default=None, help="CSV path (default init.csv); '-' for stdout")

    sub.add_parser("list-problems", help="list the registered problems")
    return parser


def _negative_range_args(argv: list[str]) -> list[str]:
    # argparse mistakes "-1:2" for an option; glue it to its flag
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in ("--omega", "--phi") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def _load_config(args) -> configio.RunConfig:
    cfg = configio.load(args.config)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "t_max", None) is not None:
        changes["termination"] = dataclasses.replace(cfg.termination, t_max=args.t_max)
    outputs = {}
    if getattr(args, "trace", None) is not None:
        outputs["trace"] = args.trace
    if getattr(args, "dump", None) is not None:
        outputs["dump"] = args.dump
    if outputs:
        changes["output"] = dataclasses.replace(cfg.output, **outputs)
    return dataclasses.replace(cfg, **changes) if changes else cfg


def cmd_run(args) -> int:
    cfg = _load_config(args)
    result = run(cfg)
    _write_text(output_path(cfg.output.trace, "trace.csv"), result.trace_csv())
    if cfg.output.dump is not None:
        _write_text(output_path(cfg.output.dump, "dump.csv"), result.dump_csv())
    out = sys.stderr if cfg.output.trace == "-" else sys.stdout
    best = result.best_evaluation
    print(f"problem: {cfg.problem} (d={cfg.dimension}, m={cfg.swarm_size})", file=out)
    print(f"seed: {result.seed}", file=out)
    print(f"iterations: {result.iterations}", file=out)
    print(f"termination: {result.reason.value}", file=out)
    print(f"best objective: {best.objective!r}", file=out)
    print(f"feasible: {str(best.feasible).lower()}", file=out)
    print("best position: " + " ".join(repr(float(v)) for v in result.best_position), file=out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        cells = dominant_root_grid(args.omega, args.phi, args.res)
    except ValueError as exc:
        print(f"invalid range: {exc}", file=sys.stderr)
        return EXIT_USAGE
    path = output_path(args.output, "grid.csv")
    if path is None:
        write_grid_csv(cells, sys.stdout)
        out = sys.stderr
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            write_grid_csv(cells, fh)
        out = sys.stdout
        print(f"wrote {len(cells)} rows to {path}", file=out)
    vertices = ", ".join(f"({w:g}, {f:g})" for w, f in convergence_triangle())
    print(f"convergence triangle (omega, phi) vertices: {vertices}", file=out)
    print("boundary lines: omega = 1, phi = 0, omega = phi/2 - 1", file=out)
    return EXIT_OK


def cmd_init_preview(args) -> int:
    cfg = _load_config(args)
    problem = resolve_problem(cfg)
    starts, _ = sample_initial_states(cfg, problem)
    d = cfg.dimension
    header = ["particle"]
    for role in ("x1", "x0", "xm"):
        header += [f"{role}_{j}" for j in range(d)]
    header += ["f_x1", "f_x0", "f_xm", "feasible_x1", "feasible_x0", "feasible_xm"]
    rows = []
    for i, s in enumerate(starts):
        row = [i]
        for x in (s.x1, s.x0, s.xm):
            row += [repr(float(v)) for v in x]
        evs = (s.eval_x1, s.eval_x0, s.eval_xm)
        row += [repr(e.objective) for e in evs]
        row += [str(e.feasible).lower() for e in evs]
        rows.append(row)
    path = output_path(args.output, "init.csv")
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return EXIT_OK
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {len(rows)} particles to {path}")
    return EXIT_OK


def cmd_list_problems(args) -> int:
    for name in problem_names():
        try:
            p = get_problem(name, 2)
        except ValueError:
            print(name)
            continue
        lo, hi = p.bounds.lower[0], p.bounds.upper[0]
        extra = f", {len(p.constraints)} constraint(s)" if p.constraints else ""
        print(f"{name}: bounds [{lo:g}, {hi:g}] per dimension{extra}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "analyze": cmd_analyze,
    "init-preview": cmd_init_preview,
    "list-problems": cmd_list_problems,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_negative_range_args(argv))
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EvaluationError, ArithmeticError, OSError, ValueError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
