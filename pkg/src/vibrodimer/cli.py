"""Command line entry point: ``vibrodimer {fig1,sweep,convergence,validate,run}``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from importlib import resources

from .errors import (NoConvergence, NotConverged, ParseError, StepTooLarge,
                     ValidationError)
from .runner import (SWEEP_SCENARIOS, check_convergence_table, load_config,
                     shipped_config_path, run_convergence, run_fig1, run_scenario,
                     run_sweep, write_results)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

_DEFAULT_CONFIG = {"fig1": "fig1", "sweep": "fig2_pop", "convergence": "convergence",
                   "validate": "fig1", "run": "fig1"}
_EXPECTED = {"fig1": ("fig1",), "sweep": SWEEP_SCENARIOS, "convergence": ("convergence",)}

log = logging.getLogger("vibrodimer")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vibrodimer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "fig1": "negativity, discord and EoF bound of dimer|vib over time",
        "sweep": "time series for each bath coupling g0 (sweep_* scenarios)",
        "convergence": "compare observables at truncation n and n+2",
        "validate": "parse and validate a config without running it",
        "run": "run whatever scenario the config names",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="flat TOML config (default: shipped config)")
        p.add_argument("--out", help="output CSV path; overrides output_path, '-' for stdout")
        p.add_argument("--workers", type=int, help="concurrent jobs for sweeps / time points")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _resolve(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        with resources.as_file(shipped_config_path(_DEFAULT_CONFIG[args.command])) as path:
            cfg = load_config(path)
    if args.workers is not None:
        if args.workers < 1:
            raise ValidationError("workers", "must be >= 1")
        cfg = replace(cfg, workers=args.workers)
    expected = _EXPECTED.get(args.command)
    if expected and cfg.scenario not in expected:
        raise ValidationError("scenario", f"'{args.command}' needs one of {expected}, got {cfg.scenario!r}")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _resolve(args)
        if args.command == "validate":
            print(f"ok: scenario={cfg.scenario} model={cfg.model}")
            return EXIT_OK
        out = args.out if args.out is not None else cfg.output_path
        if args.command == "fig1":
            table = run_fig1(cfg)
        elif args.command == "sweep":
            table = run_sweep(cfg)
        elif args.command == "convergence":
            table = run_convergence(cfg)
        else:
            table = run_scenario(cfg)
        write_results(table, out)
        log.info("wrote %d rows to %s", len(table.rows), out or "stdout")
        if table.report is not None:
            check_convergence_table(table)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NotConverged, NoConvergence, StepTooLarge) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
