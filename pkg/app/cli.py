#!/usr/bin/env python3
"""
Command-line surface: every operation with file-based I/O, plus the reproduction scenarios.

Usage:
  python -m app.cli lusky-search --family qgevrey:2 --horizon 200 --b 2.72 --K 22026 --a1 1
  python -m app.cli repro prop-ajexample --gaps linear --C 3
  python -m app.cli ab --family qalpha:2,3 --horizon 20 --k 5 --l 9

Exit status: 0 on success, 1 on a domain error or a negative result (failure trace,
failed verification, scenario not reproduced), 2 on usage errors and malformed input.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.config import settings
from app.exceptions import MalformedInputError, WeightSequenceError
from app.models import FailureTrace, NormKind, WeightSequence
from app.services import codecs
from app.services.assoc_weight import (
    conjugate_sequence,
    counting_log,
    omega_log,
    ramification_check,
    sandwich_check,
    weight_from_sequence,
)
from app.services.condition_b import ABOracle, log_ab, log_ab_delta, search_lusky, verify_certificate
from app.services.disk import disk_block_stats, disk_geometry_table, disk_log_ab, disk_log_ab_direct, disk_oracle
from app.services.growth_props import compare_sequences, omega6_check, property_table
from app.services.hull_core import block_stats, coeff_class_bound, core_sup_grid
from app.services.repro import SCENARIOS, run_scenario
from app.services.sequences import family, interpolate, parse_family, power_scale, to_deltas

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


# Helpers

def _sequence(args: argparse.Namespace, flag: str = "family", path_flag: str = "seq") -> WeightSequence:
    spec = getattr(args, flag, None)
    path = getattr(args, path_flag, None)
    if (spec is None) == (path is None):
        raise UsageError(f"give exactly one of --{flag.replace('_', '-')} or --{path_flag.replace('_', '-')}")
    if path is not None:
        return codecs.read_sequence(path)
    if args.horizon is None:
        raise UsageError("--family needs --horizon")
    return family(parse_family(spec, args.horizon))


def _emit(args: argparse.Namespace, payload, norm: NormKind = NormKind.BOTH) -> None:
    codecs.write_output(codecs.report(args.format, payload, norm), args.out)


def _log_bound(linear: Optional[float], log_value: Optional[float], name: str) -> float:
    if (linear is None) == (log_value is None):
        raise UsageError(f"give exactly one of --{name} or --log{name}")
    if log_value is not None:
        return log_value
    if not linear > 0:
        raise UsageError(f"--{name} must be positive")
    return math.log(linear)


# Commands

def command_family(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    if args.power is not None:
        ws = power_scale(ws, args.power)
    _emit(args, ws)
    return 0


def command_props(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    if args.compare_family is not None or args.compare_seq is not None:
        other = _sequence(args, "compare_family", "compare_seq")
        result = compare_sequences(ws, other)
        payload = [result.forward, result.backward] if args.format == "csv" else result
        _emit(args, payload)
        return 0
    table = property_table(ws, args.Q, args.tail_fraction)
    if args.omega6:
        table["omega6"] = omega6_check(ws)
    _emit(args, table)
    return 0


def command_ab(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    log_a, log_b = log_ab_delta(to_deltas(ws), args.k, args.l) if args.delta else log_ab(ws, args.k, args.l)
    _emit(args, {"sequence": ws.name, "k": args.k, "l": args.l, "logA": log_a, "logB": log_b})
    return 0


def command_lusky_search(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    logb = _log_bound(args.b, args.logb, "b")
    logK = _log_bound(args.K, args.logK, "K")
    oracle = disk_oracle(ws) if args.disk else ABOracle.entire(ws)
    horizon = args.search_horizon or ws.horizon
    result = search_lusky(oracle, horizon, logb, logK, a1=args.a1, gap_max=args.gap_max)
    _emit(args, result)
    return 1 if isinstance(result, FailureTrace) else 0


def command_verify(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    cert = codecs.read_certificate(args.cert)
    oracle = disk_oracle(ws) if args.disk else ABOracle.entire(ws)
    check = verify_certificate(oracle, cert)
    _emit(args, check)
    return 0 if check.ok else 1


def command_interp(args: argparse.Namespace) -> int:
    _emit(args, interpolate(_sequence(args), args.r))
    return 0


def command_ramify_check(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    if args.logt:
        samples = args.logt
    elif args.t:
        if min(args.t) <= 0:
            raise UsageError("--t samples must be positive")
        samples = np.log(args.t).tolist()
    else:
        samples = np.linspace(0.0, float(ws.lam[-1]) / args.r, args.samples).tolist()
    _emit(args, ramification_check(ws, args.r, samples))
    return 0


def command_convert(args: argparse.Namespace) -> int:
    if args.grid is not None:
        if args.P is None:
            raise UsageError("converting a weight grid needs --P")
        w = codecs.read_grid(args.grid)
        _emit(args, conjugate_sequence(w, args.P, name=args.name or Path(args.grid).stem))
        return 0
    ws = _sequence(args)
    logt = np.linspace(args.logt_min, args.logt_max, args.points)
    if args.to == "sequence":
        _emit(args, ws)
    elif args.to == "deltas":
        _emit(args, {"name": ws.name, "horizon": ws.horizon, "delta": to_deltas(ws).delta})
    elif args.to == "grid":
        _emit(args, codecs.grid_payload(weight_from_sequence(ws, logt)))
    else:
        omega = omega_log(ws, logt)
        logh = -omega_log(ws, -logt)
        rows = [
            (x, om, lh, counting_log(ws, x))
            for x, om, lh in zip(logt.tolist(), omega.tolist(), logh.tolist())
        ]
        codecs.write_output(codecs.omega_trace_csv(rows).encode(), args.out)
    return 0


def command_sandwich(args: argparse.Namespace) -> int:
    w = codecs.read_grid(args.grid)
    conj = conjugate_sequence(w, args.P)
    samples = np.linspace(float(w.logt[0]), min(float(w.logt[-1]), float(conj.lam[-1])), args.samples)
    _emit(args, sandwich_check(w, conj, samples))
    return 0


def _blocks(args: argparse.Namespace, disk: bool) -> int:
    ws = _sequence(args)
    cert = codecs.read_certificate(args.cert)
    coeffs = codecs.read_coefficients(args.coeffs)
    if disk:
        result = disk_block_stats(ws, cert, args.c, coeffs, forward_shift=args.forward_shift)
    else:
        result = block_stats(ws, cert, args.c, coeffs, forward_shift=args.forward_shift)
    _emit(args, result, NormKind(args.norm))
    return 0


def command_hull(args: argparse.Namespace) -> int:
    return _blocks(args, disk=False)


def command_disk_hull(args: argparse.Namespace) -> int:
    return _blocks(args, disk=True)


def command_core_sup(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    coeffs = codecs.read_coefficients(args.coeffs)
    grid = np.linspace(args.logr_min, args.logr_max, args.points)
    _emit(args, {"sequence": ws.name, "c": args.c, "log_sup": core_sup_grid(ws, args.c, coeffs, grid)})
    return 0


def command_coeff_bound(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    coeffs = codecs.read_coefficients(args.coeffs)
    _emit(args, {"sequence": ws.name, "c": args.c, "logD": coeff_class_bound(ws, args.c, coeffs)})
    return 0


def command_disk_geom(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    p_to = args.p_to if args.p_to is not None else ws.horizon - 1
    _emit(args, disk_geometry_table(ws, args.c, range(args.p_from, p_to + 1)))
    return 0


def command_disk_ab(args: argparse.Namespace) -> int:
    ws = _sequence(args)
    log_a, log_b = disk_log_ab(ws, args.p, args.q)
    direct_a, direct_b = disk_log_ab_direct(ws, args.p, args.q)
    _emit(args, {
        "sequence": ws.name,
        "p": args.p,
        "q": args.q,
        "logA": log_a,
        "logB": log_b,
        "logA_direct": direct_a,
        "logB_direct": direct_b,
    })
    return 0


def command_repro(args: argparse.Namespace) -> int:
    kwargs = {}
    if args.name == "prop-ajexample":
        kwargs = {"gaps": args.gaps, "C": args.C, "blocks": args.blocks}
    summary = run_scenario(args.name, **kwargs)
    codecs.write_output(codecs.report("json", summary), args.out)
    return 0 if summary["ok"] else 1


# Parser

def _add_sequence_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", help="Family spec, e.g. qgevrey:2, gevrey:1, qalpha:2,3, steps-dyadic:3.")
    parser.add_argument("--seq", type=Path, help="Sequence JSON file.")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, help="Horizon P for --family sequences.")
    common.add_argument("--tol", type=float, help=f"Relative tolerance for exact checks (default: {settings.EXACT_TOL}).")
    common.add_argument("--out", help="Output path (default: stdout).")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="Output format (default: json).")

    parser = argparse.ArgumentParser(
        description="Weight sequences, associated weights, Lusky numbers and solid hulls/cores on a finite horizon.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    fam = subparsers.add_parser("family", parents=[common], help="Write a built-in family as a sequence file.")
    _add_sequence_source(fam)
    fam.add_argument("--power", type=float, help="Raise to the s-th power.")
    fam.set_defaults(func=command_family)

    props = subparsers.add_parser("props", parents=[common], help="Structural and asymptotic property report.")
    _add_sequence_source(props)
    props.add_argument("--Q", type=int, default=2, help="Window ratio for (beta1)/(beta3) (default: 2).")
    props.add_argument("--tail-fraction", type=float, help=f"Tail window fraction (default: {settings.TAIL_FRACTION}).")
    props.add_argument("--omega6", action="store_true", help="Also check the (omega6) inequality.")
    props.add_argument("--compare-family", help="Compare with a second family (same horizon).")
    props.add_argument("--compare-seq", type=Path, help="Compare with a second sequence file.")
    props.set_defaults(func=command_props)

    ab = subparsers.add_parser("ab", parents=[common], help="log A_M(k, l) and log B_M(k, l).")
    _add_sequence_source(ab)
    ab.add_argument("--k", type=int, required=True)
    ab.add_argument("--l", type=int, required=True)
    ab.add_argument("--delta", action="store_true", help="Evaluate through the increment form.")
    ab.set_defaults(func=command_ab)

    search = subparsers.add_parser("lusky-search", parents=[common], help="Greedy Lusky-number search.")
    _add_sequence_source(search)
    search.add_argument("--b", type=float, help="Lower bound b > 2.")
    search.add_argument("--K", type=float, help="Upper bound K >= b.")
    search.add_argument("--logb", type=float, help="Lower bound in nats.")
    search.add_argument("--logK", type=float, help="Upper bound in nats.")
    search.add_argument("--a1", type=int, default=1)
    search.add_argument("--gap-max", type=int, help=f"Largest gap tried (default: {settings.GAP_MAX}).")
    search.add_argument("--search-horizon", type=int, help="Stop the chain before this index (default: the horizon).")
    search.add_argument("--disk", action="store_true", help="Use the disk A/B expressions.")
    search.set_defaults(func=command_lusky_search)

    verify = subparsers.add_parser("verify", parents=[common], help="Re-check a certificate.")
    _add_sequence_source(verify)
    verify.add_argument("--cert", type=Path, required=True)
    verify.add_argument("--disk", action="store_true")
    verify.set_defaults(func=command_verify)

    interp = subparsers.add_parser("interp", parents=[common], help="r-interpolating sequence.")
    _add_sequence_source(interp)
    interp.add_argument("--r", type=int, required=True)
    interp.set_defaults(func=command_interp)

    ramify = subparsers.add_parser("ramify-check", parents=[common], help="omega_M(t^r) against the r-interpolation.")
    _add_sequence_source(ramify)
    ramify.add_argument("--r", type=int, required=True)
    ramify_points = ramify.add_mutually_exclusive_group()
    ramify_points.add_argument("--t", type=float, nargs="+", help="Sample points t > 0.")
    ramify_points.add_argument("--logt", type=float, nargs="+", help="Sample points given as ln t.")
    ramify.add_argument("--samples", type=int, default=20, help="Number of log-spaced samples (default: 20).")
    ramify.set_defaults(func=command_ramify_check)

    convert = subparsers.add_parser("convert", parents=[common], help="Sequence <-> increments, weight grid, omega trace.")
    _add_sequence_source(convert)
    convert.add_argument("--grid", type=Path, help="Weight grid JSON; converted to its conjugate sequence.")
    convert.add_argument("--P", type=int, help="Horizon of the conjugate sequence.")
    convert.add_argument("--name", help="Name of the conjugate sequence.")
    convert.add_argument("--to", choices=("sequence", "deltas", "grid", "omega"), default="sequence")
    convert.add_argument("--logt-min", type=float, default=-1.0)
    convert.add_argument("--logt-max", type=float, default=1.0)
    convert.add_argument("--points", type=int, default=200)
    convert.set_defaults(func=command_convert)

    sandwich = subparsers.add_parser("sandwich", parents=[common], help="Conjugate a grid and check v^2_{M^v}/A <= v.")
    sandwich.add_argument("--grid", type=Path, required=True)
    sandwich.add_argument("--P", type=int, required=True)
    sandwich.add_argument("--samples", type=int, default=400)
    sandwich.set_defaults(func=command_sandwich)

    for name, func, default_norm, text in (
        ("hull", command_hull, "hull", "Solid hull block statistics."),
        ("core", command_hull, "core", "Solid core block statistics."),
        ("disk-hull", command_disk_hull, "both", "Disk hull/core block statistics."),
    ):
        sub = subparsers.add_parser(name, parents=[common], help=text)
        _add_sequence_source(sub)
        sub.add_argument("--cert", type=Path, required=True)
        sub.add_argument("--coeffs", type=Path, required=True)
        sub.add_argument("--c", type=float, default=1.0)
        sub.add_argument("--norm", choices=[k.value for k in NormKind], default=default_norm)
        sub.add_argument("--forward-shift", action="store_true", help="Anchor blocks at a_{j+1} + 1.")
        sub.set_defaults(func=func)

    core_sup = subparsers.add_parser("core-sup", parents=[common], help="Grid sup of v_{M,c}(r) sum |b_j| r^j.")
    _add_sequence_source(core_sup)
    core_sup.add_argument("--coeffs", type=Path, required=True)
    core_sup.add_argument("--c", type=float, default=1.0)
    core_sup.add_argument("--logr-min", type=float, default=-5.0)
    core_sup.add_argument("--logr-max", type=float, default=5.0)
    core_sup.add_argument("--points", type=int, default=1000)
    core_sup.set_defaults(func=command_core_sup)

    bound = subparsers.add_parser("coeff-bound", parents=[common], help="Smallest D with |b_j| <= D c^j / M_j.")
    _add_sequence_source(bound)
    bound.add_argument("--coeffs", type=Path, required=True)
    bound.add_argument("--c", type=float, default=1.0)
    bound.set_defaults(func=command_coeff_bound)

    geom = subparsers.add_parser("disk-geom", parents=[common], help="Disk anchors k_p, radii and weights.")
    _add_sequence_source(geom)
    geom.add_argument("--c", type=float, default=1.0)
    geom.add_argument("--p-from", type=int, default=1)
    geom.add_argument("--p-to", type=int)
    geom.set_defaults(func=command_disk_geom)

    disk_ab = subparsers.add_parser("disk-ab", parents=[common], help="Disk log A_D, log B_D, formula and direct.")
    _add_sequence_source(disk_ab)
    disk_ab.add_argument("--p", type=int, required=True)
    disk_ab.add_argument("--q", type=int, required=True)
    disk_ab.set_defaults(func=command_disk_ab)

    repro = subparsers.add_parser("repro", parents=[common], help="Run a named reproduction scenario.")
    repro.add_argument("name", choices=sorted(SCENARIOS))
    repro.add_argument("--gaps", choices=("linear", "constant"), default="linear")
    repro.add_argument("--C", type=float, default=3.0)
    repro.add_argument("--blocks", type=int, default=30)
    repro.set_defaults(func=command_repro)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    previous_tol = settings.EXACT_TOL
    if args.tol is not None:
        settings.EXACT_TOL = args.tol
    try:
        return args.func(args)
    except (UsageError, MalformedInputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except WeightSequenceError as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
    finally:
        settings.EXACT_TOL = previous_tol


if __name__ == "__main__":
    sys.exit(main())
