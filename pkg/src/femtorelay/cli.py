"""Command-line front end.

Subcommands
-----------
single          rate points and region metrics for one realization
sweep-backhaul  Monte Carlo sweep over the backhaul uplink capacity
sweep-position  Monte Carlo sweep over the FBS distance from the MBS
verify          randomized property battery

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import NetworkGeometry, PropagationParams, SnrTriplet
from .montecarlo import (
    ScenarioConfig,
    SummaryRow,
    SweepSummary,
    SweepVariable,
    run_sweep,
    run_trial,
    trial_seed,
)
from .region import RateRegion, max_min_region, max_sum_rate
from .schemes import BackhaulCapacities, SchemeId, quantization_state, scheme_points
from .verification import run_battery

CSV_FIELDS = [f.name for f in dataclasses.fields(SummaryRow)]
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(x))


def _schemes(text: str) -> tuple[SchemeId, ...]:
    try:
        return tuple(SchemeId(s.strip().upper()) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_scenario_flags(p, *, c_up=None, c_down=None, c_down_ratio=None):
    g = p.add_argument_group("scenario")
    g.add_argument("--s-o", type=float, default=150.0, help="FBS distance from the MBS [m]")
    g.add_argument("--r-m", type=float, default=200.0, help="macrocell radius [m]")
    g.add_argument("--r-f", type=float, default=20.0, help="femtocell radius [m]")
    g.add_argument("--alpha", type=float, default=3.0, help="path-loss exponent")
    g.add_argument("--shadow-db", type=float, default=8.0, help="shadowing std [dB], 0 disables")
    g.add_argument("--d-min", type=float, default=1.0, help="minimum link distance [m]")
    g.add_argument("--snr-db", type=float, default=10.0, help="power-controlled received SNR [dB]")
    g.add_argument("--c-up", type=float, default=c_up, required=c_up is None, help="backhaul uplink [b/s/Hz]")
    g.add_argument("--c-down", type=float, default=c_down, help="backhaul downlink [b/s/Hz]")
    g.add_argument("--c-down-ratio", type=float, default=c_down_ratio, help="set c_down = ratio * c_up")
    g.add_argument("--schemes", type=_schemes, default=tuple(SchemeId), help="comma list of DF,QF_EQ,QF_WZQ,DFQSI")
    g.add_argument("--seed", type=int, default=0, help="master seed")


def _add_output_flags(p, default_format):
    p.add_argument("-o", "--output", type=Path, help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "table"), default=default_format)


def _add_sweep_flags(p):
    p.add_argument("--values", type=_values, help="comma-separated sweep values")
    p.add_argument("--min", dest="vmin", type=float)
    p.add_argument("--max", dest="vmax", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="femtorelay", description="Macro/femto uplink rate regions with a limited backhaul.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", help="one realization or explicit SNRs")
    _add_scenario_flags(p, c_down=0.0)
    for name in ("uf", "vf", "ub"):
        p.add_argument(f"--gamma-{name}", type=float, help=f"linear SNR gamma_{name.upper()} override")
    _add_output_flags(p, "table")

    p = sub.add_parser("sweep-backhaul", help="sweep the backhaul uplink capacity")
    _add_scenario_flags(p, c_up=4.0, c_down=None, c_down_ratio=3.0)
    _add_sweep_flags(p)
    _add_output_flags(p, "csv")

    p = sub.add_parser("sweep-position", help="sweep the FBS distance s_o")
    _add_scenario_flags(p, c_up=4.0, c_down=1.0)
    _add_sweep_flags(p)
    _add_output_flags(p, "csv")

    p = sub.add_parser("verify", help="run the randomized property battery")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _geometry(args) -> NetworkGeometry:
    return NetworkGeometry(s_o=args.s_o, r_m=args.r_m, r_f=args.r_f)


def _propagation(args) -> PropagationParams:
    return PropagationParams(alpha=args.alpha, shadow_sigma_db=args.shadow_db, d_min=args.d_min, rx_snr_db=args.snr_db)


def _c_down(args, c_up: float) -> float:
    if args.c_down_ratio is not None:
        return args.c_down_ratio * c_up
    return args.c_down if args.c_down is not None else 0.0


def _sweep_values(args) -> tuple[float, ...]:
    if args.values is not None:
        if any(v is not None for v in (args.vmin, args.vmax, args.step)):
            raise UsageError("give either --values or --min/--max/--step, not both")
        return args.values
    if any(v is None for v in (args.vmin, args.vmax, args.step)):
        raise UsageError("sweep values required: --values or all of --min, --max, --step")
    if not args.step > 0 or args.vmax < args.vmin:
        raise UsageError("--step must be > 0 and --max >= --min")
    count = int(math.floor((args.vmax - args.vmin) / args.step + 1e-9)) + 1
    return tuple(float(v) for v in args.vmin + args.step * np.arange(count))


def _open_output(path: Path | None):
    if path is None:
        return sys.stdout, False
    try:
        return open(path, "w", newline="", encoding="utf-8"), True
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


# --- single -----------------------------------------------------------------


def single_rows(snr: SnrTriplet, caps: BackhaulCapacities, schemes) -> list[tuple]:
    """``(scheme, item, r_u, r_v, value)`` rows; unused cells are ``None``."""
    rows = []
    for scheme in schemes:
        uv, vu = scheme_points(scheme, snr, caps)
        rows.append((scheme.value, "UV", uv.r_u, uv.r_v, None))
        rows.append((scheme.value, "VU", vu.r_u, vu.r_v, None))
        if scheme in (SchemeId.QF_EQ, SchemeId.QF_WZQ):
            rows.append((scheme.value, "beta", None, None, quantization_state(scheme, snr, caps).beta))
        if scheme is SchemeId.DFQSI:
            rows.append((scheme.value, "gamma_qu", None, None, quantization_state(scheme, snr, caps).gamma_qu))
        region = RateRegion([uv.pair, vu.pair])
        ms = max_sum_rate(region)
        mm = max_min_region(region)
        rows.append((scheme.value, "max_sum", ms.r_u, ms.r_v, ms.value))
        rows.append((scheme.value, "max_min", mm.r_u, mm.r_v, mm.value))
    return rows


def _write_single(out, fmt, header, rows):
    if fmt == "csv":
        for key, value in header:
            out.write(f"# {key}: {value}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["scheme", "item", "r_u", "r_v", "value"])
        for row in rows:
            w.writerow([row[0], row[1]] + ["" if x is None else _fmt(x) for x in row[2:]])
        return
    for key, value in header:
        out.write(f"{key}: {value}\n")
    cells = [["scheme", "item", "r_u", "r_v", "value"]]
    cells += [[row[0], row[1]] + ["" if x is None else f"{x:.12g}" for x in row[2:]] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(5)]
    for r in cells:
        out.write("  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() + "\n")


def cmd_single(args) -> int:
    gammas = (args.gamma_uf, args.gamma_vf, args.gamma_ub)
    caps = BackhaulCapacities(args.c_up, _c_down(args, args.c_up))
    header = [("c_up", _fmt(caps.c_up)), ("c_down", _fmt(caps.c_down))]
    if all(g is not None for g in gammas):
        snr = SnrTriplet(*gammas)
    elif any(g is not None for g in gammas):
        raise UsageError("--gamma-uf, --gamma-vf and --gamma-ub must be given together")
    else:
        config = ScenarioConfig(
            geometry=_geometry(args),
            propagation=_propagation(args),
            c_up=caps.c_up,
            c_down=caps.c_down,
            schemes=args.schemes,
            trials=1,
            master_seed=args.seed,
            sweep_values=(caps.c_up,),
        )
        trial = run_trial(trial_seed(args.seed, 0, 0), config.at(caps.c_up), args.schemes)
        snr = trial.snr
        header.append(("seed", str(args.seed)))
    header += [("gamma_uf", _fmt(snr.gamma_uf)), ("gamma_vf", _fmt(snr.gamma_vf)), ("gamma_ub", _fmt(snr.gamma_ub))]
    out, close = _open_output(args.output)
    try:
        _write_single(out, args.format, header, single_rows(snr, caps, args.schemes))
    finally:
        if close:
            out.close()
    return 0


# --- sweeps -----------------------------------------------------------------


def write_summary_csv(summary: SweepSummary, out) -> None:
    meta = summary.metadata
    out.write(f"# femtorelay {meta['version']}\n")
    out.write(f"# master_seed: {meta['master_seed']}\n")
    out.write(f"# seed_scheme: {meta['seed_scheme']}\n")
    out.write(f"# kernels: {meta['kernels']}\n")
    out.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for row in summary.rows:
        values = dataclasses.astuple(row)
        w.writerow([v if isinstance(v, (str, int)) else _fmt(v) for v in values])


def read_summary_csv(source) -> SweepSummary:
    """Parse a file written by :func:`write_summary_csv`."""
    text = Path(source).read_text(encoding="utf-8") if not hasattr(source, "read") else source.read()
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            if key == "config":
                meta["config"] = json.loads(value)
            elif key == "master_seed":
                meta["master_seed"] = int(value)
            elif value:
                meta[key] = value
            else:
                meta["version"] = key.split()[-1]
        else:
            body.append(line)
    rows = []
    for rec in csv.DictReader(io.StringIO("\n".join(body))):
        kwargs = {}
        for name in CSV_FIELDS:
            raw = rec[name]
            if name in ("sweep_var", "scheme"):
                kwargs[name] = raw
            elif name == "trials":
                kwargs[name] = int(raw)
            else:
                kwargs[name] = float(raw)
        rows.append(SummaryRow(**kwargs))
    return SweepSummary(tuple(rows), meta)


def _write_summary_table(summary: SweepSummary, out) -> None:
    cols = ["sweep_value", "scheme", "mean_max_sum", "se_max_sum", "mean_max_min", "se_max_min"]
    cells = [cols] + [
        [f"{r.sweep_value:g}", r.scheme] + [f"{getattr(r, c):.6f}" for c in cols[2:]] for r in summary.rows
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
    for r in cells:
        out.write("  ".join(c.rjust(wd) for c, wd in zip(r, widths)) + "\n")


def sweep_config(args, variable: SweepVariable) -> ScenarioConfig:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    values = _sweep_values(args)
    return ScenarioConfig(
        geometry=_geometry(args),
        propagation=_propagation(args),
        c_up=args.c_up,
        c_down=args.c_down if args.c_down is not None else 0.0,
        c_down_ratio=args.c_down_ratio,
        schemes=args.schemes,
        trials=args.trials,
        master_seed=args.seed,
        sweep_variable=variable,
        sweep_values=values,
    )


def cmd_sweep(args, variable: SweepVariable) -> int:
    config = sweep_config(args, variable)
    out, close = _open_output(args.output)
    try:
        summary = run_sweep(config, workers=args.workers)
        if args.format == "csv":
            write_summary_csv(summary, out)
        else:
            _write_summary_table(summary, out)
    finally:
        if close:
            out.close()
    return 0


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    checks = run_battery(args.samples, args.seed)
    for check in checks:
        print(check.report())
    return 0 if all(c.passed for c in checks) else EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "single":
            return cmd_single(args)
        if args.command == "sweep-backhaul":
            if args.c_down is not None:
                args.c_down_ratio = None
            return cmd_sweep(args, SweepVariable.C_UP)
        if args.command == "sweep-position":
            return cmd_sweep(args, SweepVariable.S_O)
        return cmd_verify(args)
    except (UsageError, ValueError) as exc:
        print(f"femtorelay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
