"""Command-line front end.

    antipt fig1 --out results/ --set Q0=0.5
    antipt fig2 --preset paper
    antipt mass-sense --set m_p=1e-26

Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from . import experiments
from .dynamics import DivergenceError, StepBoundError
from .experiments import ConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antipt",
        description="Anti-PT damped resonator and optomechanical EP experiments.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    helps = {
        "fig1": "damped trajectories at three damping ratios and the eigenvalue sweep",
        "fig2": "steady-state branches and drive-dependent eigenvalues",
        "fig3": "sensitivity versus drive and near-EP splitting versus frequency shift",
        "mass-sense": "EP2 mass-sensing report (JSON)",
        "eigen": "eigen-decomposition of the bare resonator (JSON)",
        "simulate": "single trajectory of the resonator, mean-field or adiabatic model",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="JSON file of flat key/value overrides (or a previous sidecar)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one parameter or option; repeatable, applied after --config")
        p.add_argument("--preset", choices=sorted(experiments.PRESETS),
                       help="base parameter set (default desk; paper_mass for mass-sense)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = []
        if args.config:
            overrides += list(experiments.load_config_file(args.config).items())
        overrides += [experiments.parse_override(s) for s in args.set]
        # --preset on the command line wins over a preset inside the config file
        if args.preset:
            overrides = [kv for kv in overrides if kv[0] != "preset"]
        cfg = experiments.resolve_config(args.experiment, overrides, args.out, args.preset)
        outputs = experiments.run(cfg)
    except (ConfigError, StepBoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DivergenceError, ArithmeticError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        where = exc.filename or args.config or args.out
        print(f"I/O error: {where}: {exc.strerror or exc}", file=sys.stderr)
        return 4
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
