"""Command-line frontend.

Subcommands: simulate, flux, norms, classify, regions, cascade, synth,
check-type1.  Every output is accompanied by a run manifest recording
the command, parameters, version and wall clock, so a run can be
reproduced bit-for-bit (--seed pins all randomness; ONSAGER_THREADS only
caps transform parallelism and never changes results).

Exit codes: 0 success, 1 precondition violation (bad arguments or bad
parameter ranges), 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, defaults
from ._rational import from_reciprocal
from .criteria import (
    check_classical,
    check_type1_rate,
    check_weak_onsager,
    check_type2,
    classify_region,
    write_regions_csv,
)
from .dyadic import BesovSpec
from .flux import flux_report, write_flux_report_csv, write_flux_summary_csv
from .generators import intermittent_field, random_divfree, shear_mode, taylor_green
from .heuristics import cascade_simulate, write_cascade_csv
from .onsf import TrajectoryDir, TrajectoryWriter, atomic_write_bytes, write_snapshot
from .solver import SolverConfig, simulate
from .spectral import make_grid
from .timenorms import besov_series, read_series_csv, write_series_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 with usage, not argparse's default 2
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    """Argument errors funneled to exit code 1."""


def _parse_exponent(text: str) -> float | Fraction:
    """Exponent values: 'inf', a fraction like '7/2', or a float."""
    text = text.strip()
    if text in ("inf", "Inf", "INF", "oo"):
        return math.inf
    if "/" in text:
        return Fraction(text)
    if "." not in text and "e" not in text and "E" not in text:
        return Fraction(int(text))
    return float(text)


def _manifest(command: str, params: dict, outputs: list[str], started: float,
              seed=None) -> dict:
    return {
        "command": command,
        "parameters": params,
        "toolkit_version": __version__,
        "outputs": outputs,
        "wall_clock_seconds": time.time() - started,
        "seed": seed,
    }


def _write_manifest(manifest: dict, anchor: Path) -> None:
    """Next to a file output, or inside a directory output."""
    if anchor.is_dir():
        path = anchor / "run_manifest.json"
    else:
        path = anchor.with_name(anchor.name + ".manifest.json")
    atomic_write_bytes(path, json.dumps(manifest, indent=2, default=str).encode() + b"\n")


def _verdict_json(verdict) -> dict:
    return {
        "criterion": verdict.criterion_id,
        "hypotheses": {k: bool(v) for k, v in verdict.hypotheses.items()},
        "hypotheses_ok": verdict.hypotheses_ok,
        "norm_value": verdict.norm_value,
        "norm_finite_at_resolution": verdict.norm_finite,
        "boundary_margin": verdict.margin,
        "satisfied": verdict.satisfied,
    }


def _cmd_simulate(args) -> list[str]:
    grid = make_grid(args.n)
    config = SolverConfig(
        grid=grid,
        nu=args.nu,
        dt=args.dt,
        t_end=args.t_end,
        snapshot_stride=args.stride,
        init=args.init,
        seed=args.seed,
    )
    writer = TrajectoryWriter(args.out, nu=args.nu)
    simulate(config, sink=writer)
    writer.finalize()
    return [str(args.out)]


def _cmd_flux(args) -> list[str]:
    traj = TrajectoryDir(args.traj)
    report = flux_report(traj)
    write_flux_report_csv(report, args.out)
    outputs = [str(args.out)]
    if args.summary:
        write_flux_summary_csv(report, args.summary)
        outputs.append(str(args.summary))
    return outputs


def _cmd_norms(args) -> list[str]:
    traj = TrajectoryDir(args.traj)
    spec = BesovSpec(s=float(args.s), p=float(args.p), q=float(args.sum_q))
    series = besov_series(traj, spec)
    write_series_csv(series, args.out)
    return [str(args.out)]


def _cmd_classify(args) -> list[str]:
    traj = TrajectoryDir(args.traj)
    beta, p = args.beta, args.p
    point = classify_region(beta, p)
    verdicts = {
        "theorem-1.1": check_weak_onsager(traj, beta, p),
        "theorem-1.3": check_type2(traj, beta, p),
        "classical-1": check_classical(traj, 1, beta, p),
        "classical-2": check_classical(traj, 2, beta, p),
        "classical-3": check_classical(traj, 3, beta, p),
    }
    payload = {
        "beta": float(from_reciprocal(point.inv_beta)),
        "p": float(from_reciprocal(point.inv_p)),
        "region": point.label,
        "minimal_alpha": None if point.minimal_alpha is None else float(point.minimal_alpha),
        "criteria": {k: _verdict_json(v) for k, v in verdicts.items()},
    }
    atomic_write_bytes(Path(args.out), json.dumps(payload, indent=2).encode() + b"\n")
    return [str(args.out)]


def _cmd_regions(args) -> list[str]:
    write_regions_csv(args.out, grid_points=args.grid)
    return [str(args.out)]


def _cmd_cascade(args) -> list[str]:
    run = cascade_simulate(
        d=args.d,
        e0=args.e0,
        start_shell=args.start_shell,
        n_shells=args.shells,
        alpha=args.alpha,
        p=float(args.p),
    )
    write_cascade_csv(run, args.out)
    return [str(args.out)]


def _cmd_synth(args) -> list[str]:
    grid = make_grid(args.n)
    if args.kind == "taylor-green":
        fld = taylor_green(grid)
    elif args.kind == "shear":
        fld = shear_mode(grid)
    elif args.kind == "random":
        amps = [float(a) for a in args.profile.split(",")] if args.profile else [0.0, 1.0, 0.5]
        fld = random_divfree(grid, amps, seed=args.seed)
    elif args.kind == "intermittent":
        fld = intermittent_field(grid, q=args.shell, d=args.d, seed=args.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown generator {args.kind!r}")
    write_snapshot(fld.with_coeffs(fld.coeffs, time=0.0), args.out)
    return [str(args.out)]


def _cmd_check_type1(args) -> list[str]:
    series = read_series_csv(args.series)
    constant, ok = check_type1_rate(series, args.T, args.p, threshold=args.threshold)
    payload = {
        "criterion": "type-1",
        "p": float(args.p),
        "blowup_time": args.T,
        "rate_exponent": 0.5 - (0.0 if math.isinf(float(args.p)) else 1.0 / float(args.p)),
        "fitted_constant": constant,
        "threshold": args.threshold,
        "satisfied": bool(ok),
    }
    atomic_write_bytes(Path(args.out), json.dumps(payload, indent=2).encode() + b"\n")
    return [str(args.out)]


def build_parser() -> _Parser:
    parser = _Parser(prog="onsagerkit", description=__doc__)
    parser.add_argument("--print-defaults", action="store_true",
                        help="print the pinned tolerances/constants as JSON and exit")
    sub = parser.add_subparsers(dest="command")

    p_sim = sub.add_parser("simulate", help="integrate a flow and write a trajectory directory")
    p_sim.add_argument("--init", default="taylor-green",
                       choices=["taylor-green", "shear", "random"])
    p_sim.add_argument("--n", type=int, default=64)
    p_sim.add_argument("--nu", type=float, required=True)
    p_sim.add_argument("--t-end", dest="t_end", type=float, required=True)
    p_sim.add_argument("--dt", type=float, required=True)
    p_sim.add_argument("--stride", type=int, default=1)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_flux = sub.add_parser("flux", help="flux/balance report CSV from a trajectory")
    p_flux.add_argument("--traj", required=True)
    p_flux.add_argument("--out", required=True)
    p_flux.add_argument("--summary", default=None,
                        help="also write the per-shell |flux| time-integral CSV here")
    p_flux.set_defaults(func=_cmd_flux)

    p_norms = sub.add_parser("norms", help="Besov-norm time series CSV from a trajectory")
    p_norms.add_argument("--traj", required=True)
    p_norms.add_argument("--s", type=_parse_exponent, required=True)
    p_norms.add_argument("--p", type=_parse_exponent, required=True)
    p_norms.add_argument("--sum-q", dest="sum_q", type=_parse_exponent, default=math.inf)
    p_norms.add_argument("--out", required=True)
    p_norms.set_defaults(func=_cmd_norms)

    p_cls = sub.add_parser("classify", help="criterion verdicts for a trajectory at (beta, p)")
    p_cls.add_argument("--traj", required=True)
    p_cls.add_argument("--beta", type=_parse_exponent, required=True)
    p_cls.add_argument("--p", type=_parse_exponent, required=True)
    p_cls.add_argument("--out", default="verdict.json")
    p_cls.set_defaults(func=_cmd_classify)

    p_reg = sub.add_parser("regions", help="region-map CSV over the (1/beta, 1/p) plane")
    p_reg.add_argument("--grid", type=int, default=200)
    p_reg.add_argument("--out", required=True)
    p_reg.set_defaults(func=_cmd_regions)

    p_cas = sub.add_parser("cascade", help="cascade-model scaling history CSV")
    p_cas.add_argument("--d", type=float, required=True)
    p_cas.add_argument("--alpha", type=float, required=True)
    p_cas.add_argument("--p", type=_parse_exponent, required=True)
    p_cas.add_argument("--e0", type=float, default=1.0)
    p_cas.add_argument("--start-shell", dest="start_shell", type=int, default=0)
    p_cas.add_argument("--shells", type=int, default=40)
    p_cas.add_argument("--out", required=True)
    p_cas.set_defaults(func=_cmd_cascade)

    p_syn = sub.add_parser("synth", help="write one generated snapshot file")
    p_syn.add_argument("--kind", required=True,
                       choices=["taylor-green", "shear", "random", "intermittent"])
    p_syn.add_argument("--n", type=int, default=64)
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.add_argument("--shell", type=int, default=4, help="shell index for intermittent")
    p_syn.add_argument("--d", type=float, default=1.0, help="dimension for intermittent")
    p_syn.add_argument("--profile", default=None,
                       help="comma-separated shell amplitudes for random")
    p_syn.add_argument("--out", required=True)
    p_syn.set_defaults(func=_cmd_synth)

    p_t1 = sub.add_parser("check-type1", help="rate-constant fit for a norm series CSV")
    p_t1.add_argument("--series", required=True)
    p_t1.add_argument("--p", type=_parse_exponent, required=True)
    p_t1.add_argument("--T", type=float, required=True)
    p_t1.add_argument("--threshold", type=float, default=math.inf)
    p_t1.add_argument("--out", default="type1.json")
    p_t1.set_defaults(func=_cmd_check_type1)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    started = time.time()
    try:
        args = parser.parse_args(argv)
        if args.print_defaults:
            print(json.dumps(defaults.as_dict(), indent=2, default=str))
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            print("onsagerkit: error: a subcommand is required", file=sys.stderr)
            return 1
        outputs = args.func(args)
        params = {
            k: (str(v) if isinstance(v, Fraction) else v)
            for k, v in vars(args).items()
            if k not in ("func", "command", "print_defaults")
        }
        manifest = _manifest(args.command, params, outputs, started,
                             seed=getattr(args, "seed", None))
        _write_manifest(manifest, Path(outputs[0]))
        return 0
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"onsagerkit: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"onsagerkit: i/o error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())
