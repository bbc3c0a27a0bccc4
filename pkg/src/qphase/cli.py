"""Command-line interface: ``qphase {report,sweep,figure,verify}``.

Exit codes: 0 success or Match, 2 parameter/domain/config error, 3 Mismatch,
4 ClosedFormUndefined, 5 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .closed_forms import PACS_QUANTITIES, Verdict, cross_check
from .errors import ConfigError, QPhaseError
from .metrics import bp_phase_report, witnesses
from .states import DEFAULT_EPSILON, DEFAULT_NMAX_CAP, FAMILY_PARAMS, Family, StateSpec
from .sweep import Axis, config_from_mapping, figure_config, load_config, rows_to_csv, run_sweep, write_csv

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_MISMATCH = 3
EXIT_UNDEFINED = 4
EXIT_IO = 5

VERDICT_EXIT = {Verdict.MATCH: EXIT_OK, Verdict.MISMATCH: EXIT_MISMATCH, Verdict.UNDEFINED: EXIT_UNDEFINED}

_PARAM_FLAGS = {"p": float, "M": int, "alpha": float, "beta": float, "N": int, "L": float, "m": int}


def _global_parent() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    parent = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parent.add_argument("--epsilon", type=float,
                        help=f"truncation tolerance for infinite states (default {DEFAULT_EPSILON:g})")
    parent.add_argument("--nmax-cap", type=int,
                        help=f"hard cap on retained Fock levels (default {DEFAULT_NMAX_CAP})")
    parent.add_argument("--out", help="output file (sweep/figure: CSV path or directory)")
    parent.add_argument("--format", choices=("csv", "human", "structured"))
    return parent


def _add_state_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", required=True, choices=[f.value for f in Family])
    for name, typ in _PARAM_FLAGS.items():
        parser.add_argument(f"--{name}", type=typ, default=None, dest=f"param_{name}", metavar=name)


def build_parser() -> argparse.ArgumentParser:
    parent = _global_parent()
    parser = argparse.ArgumentParser(
        prog="qphase",
        description="Barnett-Pegg phase fluctuations of intermediate photon states.",
        parents=[parent],
        allow_abbrev=False,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("report", parents=[parent], allow_abbrev=False,
                         help="phase metrics and witnesses for one state")
    _add_state_args(rep)
    rep.add_argument("--hoa-orders", default="2,3")

    sw = sub.add_parser("sweep", parents=[parent], allow_abbrev=False,
                        help="grid sweep emitted as CSV")
    sw.add_argument("--config", help="JSON config file; flags override its values")
    sw.add_argument("--family", choices=[f.value for f in Family])
    sw.add_argument("--fixed", action="append", default=[], metavar="NAME=VALUE")
    sw.add_argument("--axis", action="append", default=[], metavar="NAME:START:STOP:STEP")
    sw.add_argument("--hoa-orders", default=None)
    sw.add_argument("--jobs", type=int, default=1)

    fig = sub.add_parser("figure", parents=[parent], allow_abbrev=False,
                         help="regenerate preset figure data")
    fig.add_argument("figure_id", type=int)
    fig.add_argument("--jobs", type=int, default=1)

    ver = sub.add_parser("verify", parents=[parent], allow_abbrev=False,
                         help="cross-check a printed closed form against the Fock oracle")
    _add_state_args(ver)
    ver.add_argument("--tol", type=float, default=1e-8)
    ver.add_argument("--quantity", choices=PACS_QUANTITIES, default="d_u")
    return parser


def _spec_from_args(args) -> StateSpec:
    family = Family(args.family)
    params = {}
    for name in FAMILY_PARAMS[family]:
        value = getattr(args, f"param_{name}")
        if value is None:
            raise ConfigError(f"--{name} is required for family {family.value}")
        params[name] = value
    for name in _PARAM_FLAGS:
        if name not in FAMILY_PARAMS[family] and getattr(args, f"param_{name}") is not None:
            raise ConfigError(f"--{name} does not apply to family {family.value}")
    return StateSpec(
        family,
        params,
        epsilon=args.epsilon if args.epsilon is not None else DEFAULT_EPSILON,
        nmax_cap=args.nmax_cap if args.nmax_cap is not None else DEFAULT_NMAX_CAP,
    )


def _parse_orders(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad order list {text!r}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_report(args) -> int:
    spec = _spec_from_args(args)
    state, trunc = spec.build()
    report = bp_phase_report(state)
    wit = witnesses(state, _parse_orders(args.hoa_orders))
    record: Dict = {
        "family": spec.family.value,
        "params": dict(spec.params),
        "n_max": trunc.n_max,
        "residual_mass": trunc.residual_mass,
        **dataclasses.asdict(report),
        "antibunch": wit.antibunch,
        "hoa": {str(k): v for k, v in wit.hoa.items()},
    }
    fmt = args.format or "human"
    if fmt == "structured":
        text = json.dumps(record, indent=2) + "\n"
    elif fmt == "csv":
        flat = {k: v for k, v in record.items() if k not in ("params", "hoa")}
        flat.update(record["params"])
        flat.update({f"hoa{k}": v for k, v in record["hoa"].items()})
        text = ",".join(flat) + "\n" + ",".join(
            v if isinstance(v, str) else f"{v:.12g}" for v in flat.values()
        ) + "\n"
    else:
        width = max(len(k) for k in record) + 2
        lines = []
        for key, value in record.items():
            if isinstance(value, float):
                value = f"{value:.12g}"
            elif isinstance(value, dict):
                value = ", ".join(f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}" for k, v in value.items())
            lines.append(f"{key:<{width}}{value}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _parse_axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"axis {text!r} must be NAME:START:STOP:STEP")
    try:
        return Axis(parts[0], float(parts[1]), float(parts[2]), float(parts[3]))
    except ValueError:
        raise ConfigError(f"axis {text!r} has non-numeric bounds") from None


def _parse_fixed(items: List[str]) -> Dict[str, float]:
    fixed = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--fixed expects NAME=VALUE, got {item!r}")
        try:
            fixed[name] = float(value)
        except ValueError:
            raise ConfigError(f"--fixed {item!r}: value is not a number") from None
    return fixed


def _sweep_output(config, rows, args, default_name: str) -> None:
    fmt = args.format or "csv"
    if fmt == "structured":
        text = json.dumps([dataclasses.asdict(r) for r in rows], indent=1) + "\n"
        _emit(text, args.out)
        return
    if fmt == "human":
        _emit(rows_to_csv(config, rows).replace(",", "\t"), args.out)
        return
    target = args.out or config.output_path
    if target is None:
        sys.stdout.write(rows_to_csv(config, rows))
        return
    trailing_sep = str(target).endswith(("/", "\\"))
    target = Path(target)
    if target.is_dir() or trailing_sep:
        target = target / default_name
    path = write_csv(config, rows, target)
    ok = sum(r.status == "ok" for r in rows)
    print(f"wrote {len(rows)} rows ({ok} ok) to {path}", file=sys.stderr)


def cmd_sweep(args) -> int:
    data = load_config(args.config) if args.config else {}
    if args.family:
        data["family"] = args.family
    if args.fixed:
        data["fixed"] = {**data.get("fixed", {}), **_parse_fixed(args.fixed)}
    if args.axis:
        data["axes"] = [dataclasses.asdict(_parse_axis(a)) for a in args.axis]
    if args.hoa_orders:
        data["hoa_orders"] = _parse_orders(args.hoa_orders)
    if args.epsilon is not None:
        data["epsilon"] = args.epsilon
    if args.nmax_cap is not None:
        data["nmax_cap"] = args.nmax_cap
    if "family" not in data:
        raise ConfigError("sweep needs --family or a config file naming one")
    config = config_from_mapping(data)
    rows = run_sweep(config, jobs=args.jobs)
    _sweep_output(config, rows, args, "sweep.csv")
    return EXIT_OK


def cmd_figure(args) -> int:
    config = figure_config(
        args.figure_id,
        epsilon=args.epsilon if args.epsilon is not None else DEFAULT_EPSILON,
        nmax_cap=args.nmax_cap if args.nmax_cap is not None else DEFAULT_NMAX_CAP,
    )
    rows = run_sweep(config, jobs=args.jobs)
    if args.out is None and (args.format or "csv") == "csv":
        args.out = f"figure{args.figure_id}.csv"
    _sweep_output(config, rows, args, f"figure{args.figure_id}.csv")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec_from_args(args)
    rep = cross_check(spec, tol=args.tol, quantity=args.quantity)
    record = dataclasses.asdict(rep)
    record["family"] = rep.family.value
    record["verdict"] = rep.verdict.value
    fmt = args.format or "human"
    if fmt == "structured":
        text = json.dumps(record, indent=2) + "\n"
    elif fmt == "csv":
        keys = ["family", "quantity", "closed_value", "oracle_value", "abs_diff", "tolerance", "verdict"]
        text = ",".join(keys) + "\n" + ",".join(
            f"{record[k]:.12g}" if isinstance(record[k], float) else str(record[k]) for k in keys
        ) + "\n"
    else:
        params = " ".join(f"{k}={v}" for k, v in rep.params.items())
        text = (
            f"{rep.family.value} {params} [{rep.quantity}]\n"
            f"  closed form : {rep.closed_value:.12g}\n"
            f"  oracle      : {rep.oracle_value:.12g}\n"
            f"  abs diff    : {rep.abs_diff:.3e} (tol {rep.tolerance:g})\n"
            f"  verdict     : {rep.verdict.value}\n"
        )
        if rep.note:
            text += f"  note        : {rep.note}\n"
    _emit(text, args.out)
    return VERDICT_EXIT[rep.verdict]


COMMANDS = {"report": cmd_report, "sweep": cmd_sweep, "figure": cmd_figure, "verify": cmd_verify}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("epsilon", "nmax_cap", "out", "format"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"qphase: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QPhaseError as exc:
        print(f"qphase: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
