"""Command-line entry point: ``komparo run | preset | oracle-suite``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import envelope as env
from .certify import CertReport, ConfigError, ReportConfig, full_report
from .config import PROBE_KEYS, RunConfig, UnknownPresetError, preset
from .funcspec import EvalError, ParseError, resolve
from .grid import GridError, make_grid
from .oracle import equivalence_suite

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_CHECK_FAILED = 4

REPORT_NAME = "report.json"


def _s_values(cfg: RunConfig, g, grid) -> list:
    if "auto" in cfg.s_grid:
        s = env.s_grid_select(g, grid, cfg.breakpoints, cfg.s_grid["auto"])
    else:
        s = sorted(set(float(v) for v in cfg.s_grid["explicit"]) | set(map(float, cfg.breakpoints)))
    if cfg.hahn and s[0] < 0:
        raise ConfigError("norm mode restricts the s-grid to s >= 0")
    return s


def _report_config(cfg: RunConfig, s_values: list) -> ReportConfig:
    probes = {k: cfg.probes.get(k) for k in PROBE_KEYS}
    probes["table_probe_s"] = probes["table_probe_s"] or ()
    return ReportConfig(s_values=s_values, hahn=cfg.hahn, checks=tuple(cfg.checks),
                        tau_zero=float(cfg.tolerances.get("tau_zero", 1e-9)),
                        tau_grid=cfg.tolerances.get("tau_grid"),
                        tau_table=cfg.tolerances.get("tau_table"),
                        tau_probe=cfg.tolerances.get("tau_probe"), **probes)


def build_report(cfg: RunConfig) -> CertReport:
    """Resolve functions and grid from a configuration and run the checks."""
    cfg.validate()
    f = resolve(cfg.f_spec, cfg.dimension)
    g = resolve(cfg.g_spec, cfg.dimension)
    grid = make_grid(cfg.bounds, cfg.resolution, cfg.symmetric)
    s_values = _s_values(cfg, g, grid)
    return full_report(f, None if cfg.hahn else g, grid, _report_config(cfg, s_values))


def run(cfg: RunConfig, base_dir: Path | str = ".", out=None) -> int:
    """Compute tables and the report, write them to the output directory, return the exit code.

    A relative ``output_dir`` is taken relative to ``base_dir``. The directory
    must already exist.
    """
    out = out or sys.stdout
    err = sys.stderr
    target = Path(base_dir) / cfg.output_dir
    try:
        cfg.validate()
        if not target.is_dir():
            print(f"io error: output directory {target} does not exist", file=err)
            return EXIT_IO
        report = build_report(cfg)
    except (ConfigError, GridError) as e:
        print(f"config error: {e}", file=err)
        return EXIT_CONFIG
    except ParseError as e:
        print(f"parse error: {e}", file=err)
        return EXIT_PARSE
    except EvalError as e:
        print(f"evaluation error: {e}", file=err)
        return EXIT_PARSE

    try:
        for kind, table in report.tables.items():
            table.to_csv(target / f"{kind}.csv")
        (target / REPORT_NAME).write_text(report.to_json())
    except OSError as e:
        print(f"io error: {e}", file=err)
        return EXIT_IO

    for line in report.summary_lines():
        print(line, file=out)
    return EXIT_CHECK_FAILED if report.any_fails else EXIT_OK


def _cmd_run(args) -> int:
    path = Path(args.config)
    try:
        cfg = RunConfig.load(path)
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, path.parent)


def _cmd_preset(args) -> int:
    try:
        cfg = preset(args.name)
    except UnknownPresetError as e:
        print(f"config error: {e.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    text = cfg.to_json()
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        Path(args.out).write_text(text)
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_oracle_suite(args) -> int:
    try:
        summary = equivalence_suite(args.seed, args.trials)
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(summary.to_json())
    return EXIT_OK if summary.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="komparo",
                                description="Lattice envelopes of f over level sets of g.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="compute tables and a certification report")
    r.add_argument("--config", required=True, help="JSON run configuration")
    r.set_defaults(func=_cmd_run)

    pr = sub.add_parser("preset", help="write a canned configuration")
    pr.add_argument("name")
    pr.add_argument("--out", help="destination file (default: stdout)")
    pr.set_defaults(func=_cmd_preset)

    o = sub.add_parser("oracle-suite", help="compare envelopes with brute force")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--trials", type=int, default=100)
    o.set_defaults(func=_cmd_oracle_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
