"""Batch command-line front end.

One subcommand per experiment: ``norm`` (depth sweep of the operator-norm
estimate), ``steer commuting`` / ``steer seesaw`` (strategy evaluation),
``heatvision`` (channel purity run), and ``report`` (the full reproduction
pipeline).  Configuration comes from flags, optionally seeded from a
key=value config file that explicit flags override.

Exit codes: 0 success, 1 invalid configuration, 2 resource or convergence
failure, 3 report criteria failed.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import BufferExhaustedError, CapacityError, ConvergenceError
from .freegroup import GroupParams, word_from_str
from .heatvision import iterate_channel
from .hilbert import DensityMatrix, build_basis, unit_state
from .report import ReportSettings, run_report
from .serialize import csv_text, json_dumps, run_meta, write_text
from .spectral import analytic_norm, norm_sweep
from .steering import commuting_strategy_result, seesaw_tensor_optimize


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exceptions, not sys.exit(2)."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="steergap", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    leaves: dict[str, _Parser] = {}

    norm = sub.add_parser("norm", help="depth sweep of the norm estimate")
    norm.add_argument("--s", type=int)
    norm.add_argument("--depth-max", type=int)
    norm.required_options = ["--s", "--depth-max"]
    norm.add_argument("--depth-min", type=int, default=1)
    norm.add_argument(
        "--method",
        choices=["lanczos", "power-on-square"],
        default="lanczos",
    )
    norm.add_argument(
        "--representation", choices=["auto", "sparse", "radial"], default="auto"
    )
    norm.add_argument("--tol", type=float, default=1e-10)
    norm.add_argument("--max-iter", type=int, default=None)
    norm.add_argument("--seed", type=int, default=0)
    norm.add_argument("--csv", default="-", help="CSV path, '-' for stdout")
    norm.add_argument("--json", default=None, help="JSON path, '-' for stdout")
    norm.add_argument("--config", default=None, help="key=value defaults file")
    norm.set_defaults(run=_cmd_norm)
    leaves["norm"] = norm

    steer = sub.add_parser("steer", help="evaluate steering strategies")
    steer_sub = steer.add_subparsers(dest="strategy", required=True)

    commuting = steer_sub.add_parser(
        "commuting", help="the exact commuting-shift strategy"
    )
    commuting.add_argument("--s", type=int)
    commuting.required_options = ["--s"]
    commuting.add_argument("--depth", type=int, default=2)
    commuting.add_argument("--json", default="-")
    commuting.add_argument("--config", default=None)
    commuting.set_defaults(run=_cmd_steer_commuting)
    leaves["steer commuting"] = commuting

    seesaw = steer_sub.add_parser(
        "seesaw", help="alternating optimization over tensor strategies"
    )
    seesaw.add_argument("--s", type=int)
    seesaw.required_options = ["--s"]
    seesaw.add_argument("--alice-dim", type=int, default=8)
    seesaw.add_argument("--bob-depth", type=int, default=5)
    seesaw.add_argument("--restarts", type=int, default=20)
    seesaw.add_argument("--max-iter", type=int, default=100)
    seesaw.add_argument("--tol", type=float, default=1e-11)
    seesaw.add_argument("--dim-cap", type=int, default=4000)
    seesaw.add_argument("--seed", type=int, default=0)
    seesaw.add_argument("--json", default="-")
    seesaw.add_argument("--config", default=None)
    seesaw.set_defaults(run=_cmd_steer_seesaw)
    leaves["steer seesaw"] = seesaw

    heat = sub.add_parser("heatvision", help="iterated-channel purity run")
    heat.add_argument("--s", type=int)
    heat.add_argument("--depth", type=int)
    heat.add_argument("--steps", type=int)
    heat.required_options = ["--s", "--depth", "--steps"]
    heat.add_argument(
        "--state",
        default="e",
        help="comma-separated serialized words mixed uniformly (default 'e')",
    )
    heat.add_argument("--csv", default="-")
    heat.add_argument("--json", default=None)
    heat.add_argument("--config", default=None)
    heat.set_defaults(run=_cmd_heatvision)
    leaves["heatvision"] = heat

    report = sub.add_parser("report", help="run the full reproduction report")
    report.add_argument("--quick", action="store_true", help="smoke-test profile")
    report.add_argument("--tolerance-scale", type=float, default=1.0)
    report.add_argument("--seed", type=int, default=ReportSettings.seed)
    report.add_argument("--seesaw-restarts", type=int, default=None)
    report.add_argument("--chain-samples", type=int, default=None)
    report.add_argument("--table-samples", type=int, default=None)
    report.add_argument("--norm-depth-max", type=int, default=None)
    report.add_argument("--json", default=None)
    report.add_argument("--config", default=None)
    report.set_defaults(run=_cmd_report)
    leaves["report"] = report

    return parser, leaves


def _load_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(
                    f"{path}:{lineno}: expected key=value, got {line!r}"
                )
            key, value = line.split("=", 1)
            entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


def _apply_config(leaf: _Parser, entries: dict[str, str]) -> None:
    """Install config-file values as parser defaults; flags still win."""
    actions = {a.dest: a for a in leaf._actions}
    converted = {}
    for key, value in entries.items():
        action = actions.get(key)
        if action is None:
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            converted[key] = _parse_bool(value)
        elif action.type is not None:
            converted[key] = action.type(value)
        else:
            converted[key] = value
    leaf.set_defaults(**converted)


def _leaf_name(args: argparse.Namespace) -> str:
    if args.command == "steer":
        return f"steer {args.strategy}"
    return args.command


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"run", "config"}
    return {
        "command": _leaf_name(args),
        **{
            k: v
            for k, v in sorted(vars(args).items())
            if k not in skip and k not in ("command", "strategy")
        },
    }


def _document(args: argparse.Namespace, result: dict) -> str:
    return json_dumps(
        {"config": _config_echo(args), "result": result, "meta": run_meta(__version__)}
    )


def _cmd_norm(args) -> int:
    params = GroupParams(args.s)
    sweep = norm_sweep(
        params,
        args.depth_max,
        depth_min=args.depth_min,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        method=args.method,
        representation=args.representation,
    )
    rows = [
        (r.depth, r.estimated_norm, r.analytic_bound, r.gap, r.iterations)
        for r in sweep
    ]
    if args.csv is not None:
        write_text(
            csv_text(["N", "estimate", "analytic_bound", "gap", "iterations"], rows),
            args.csv,
        )
    if args.json is not None:
        result = {
            "s": args.s,
            "method": args.method,
            "analytic_bound": analytic_norm(args.s),
            "final_estimate": sweep[-1].estimated_norm,
            "final_gap": sweep[-1].gap,
            "estimates": [
                {
                    "depth": r.depth,
                    "estimate": r.estimated_norm,
                    "gap": r.gap,
                    "iterations": r.iterations,
                    "residual": r.residual,
                    "representation": r.representation,
                }
                for r in sweep
            ],
        }
        write_text(_document(args, result), args.json)
    return 0


def _cmd_steer_commuting(args) -> int:
    result = commuting_strategy_result(GroupParams(args.s), args.depth)
    write_text(_document(args, result.to_json_dict()), args.json)
    return 0


def _cmd_steer_seesaw(args) -> int:
    result = seesaw_tensor_optimize(
        GroupParams(args.s),
        args.alice_dim,
        args.bob_depth,
        restarts=args.restarts,
        max_iter=args.max_iter,
        tol=args.tol,
        seed=args.seed,
        dim_cap=args.dim_cap,
    )
    write_text(_document(args, result.to_json_dict()), args.json)
    return 0


def _cmd_heatvision(args) -> int:
    params = GroupParams(args.s)
    words = [word_from_str(tok) for tok in args.state.split(",")]
    basis = build_basis(params, args.depth)
    for w in words:
        if len(w) > args.depth:
            raise ValueError(
                f"state word {w} has length {len(w)} beyond depth {args.depth}"
            )
    rho0 = DensityMatrix.uniform_mixture([unit_state(basis, w) for w in words])
    run = iterate_channel(params, args.depth, args.steps, rho0)
    if args.csv is not None:
        write_text(csv_text(["t", "purity", "bound", "ratio"], run.rows()), args.csv)
    if args.json is not None:
        result = {
            "s": run.s,
            "N": run.depth,
            "T": run.steps,
            "k0": run.initial_support_depth,
            "fstar": run.fstar,
            "final_purity": run.purity_series[-1],
        }
        write_text(_document(args, result), args.json)
    return 0


def _cmd_report(args) -> int:
    settings = ReportSettings.quick() if args.quick else ReportSettings()
    settings.tolerance_scale = args.tolerance_scale
    settings.seed = args.seed
    for attr in ("seesaw_restarts", "chain_samples", "table_samples", "norm_depth_max"):
        value = getattr(args, attr)
        if value is not None:
            setattr(settings, attr, value)
    results = run_report(settings)
    for res in results:
        print(res.line())
    failing = [r.number for r in results if not r.passed]
    if args.json is not None:
        result = {
            "criteria": [r.to_json_dict() for r in results],
            "all_passed": not failing,
            "failing": failing,
        }
        write_text(_document(args, result), args.json)
    if failing:
        print(
            "failing criteria: " + ", ".join(str(n) for n in failing),
            file=sys.stderr,
        )
        return 3
    return 0


def main(argv: list[str] | None = None) -> int:
    parser, leaves = _build_parser()
    try:
        args = parser.parse_args(argv)
        leaf = leaves[_leaf_name(args)]
        if getattr(args, "config", None):
            _apply_config(leaf, _load_config_file(args.config))
            args = parser.parse_args(argv)
        # Required options are checked only now so the config file can
        # supply them.
        missing = [
            opt
            for opt in getattr(leaf, "required_options", [])
            if getattr(args, opt.lstrip("-").replace("-", "_")) is None
        ]
        if missing:
            raise _UsageError(
                f"{leaf.prog}: the following arguments are required: "
                + ", ".join(missing)
            )
        return args.run(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CapacityError, ConvergenceError, BufferExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
