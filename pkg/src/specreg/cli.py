"""Command-line front end.

    specreg analyze     --model builtin:regular [--out report.json]
    specreg approximate --model builtin:regular --rank 1 [--out filters.json]
    specreg simulate    --model builtin:regular --length 1000 --seed 7 --out sample.csv
    specreg verify      --model builtin:regular --rank 1 --mc-reps 8 --length 100000

Exit codes: 0 success, 1 verification failed, 2 usage or validation
error, 3 numerical failure.
"""

import argparse
import json
import sys
import warnings

import numpy as np

from .eigenfield import DIVERGENCE_THRESHOLD, ONE_SIDED_TOL, RANK_TOL, align_gauge, decompose
from .errors import RankNotConstant, SpecRegError
from .io import load_model, meta, write_filters, write_path_csv, write_report
from .lowrank import TAIL_TOL, build_filter_bank, certificate
from .regularity import DEFAULT_GAUGES, classify
from .timedomain import monte_carlo_mse, simulate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    try:
        value = json.loads(value)
    except json.JSONDecodeError:
        pass
    return key.strip(), value


def _add_model(p):
    p.add_argument("--model", required=True, help="builtin:<id>, a model JSON file or a covariance CSV")
    p.add_argument("--grid", type=int, default=None, help="grid size N (power of two, default 4096)")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE",
                   help="builtin model parameter (JSON value), repeatable")
    p.add_argument("--taper", default="bartlett", choices=("bartlett", "rectangular"),
                   help="lag window for covariance CSV input")
    p.add_argument("--rank-tol", type=float, default=RANK_TOL)
    p.add_argument("--one-sided-tol", type=float, default=ONE_SIDED_TOL)
    p.add_argument("--divergence-threshold", type=float, default=DIVERGENCE_THRESHOLD)
    p.add_argument("--order", default="sort", choices=("sort", "track"))


def build_parser():
    parser = argparse.ArgumentParser(prog="specreg", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify regularity and report diagnostics")
    _add_model(p)
    p.add_argument("--gauges", default=",".join(DEFAULT_GAUGES),
                   help="comma-separated gauge strategies for the one-sidedness test")
    p.add_argument("--out", help="report JSON path (default: stdout)")

    p = sub.add_parser("approximate", help="rank-k filter bank and error certificate")
    _add_model(p)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--taps", type=int, default=None, help="tap window J (default N/8)")
    p.add_argument("--sided", default="auto", choices=("auto", "one", "two"))
    p.add_argument("--gauge", default="phase-continuity")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--tail-tol", type=float, default=TAIL_TOL)
    p.add_argument("--out", help="filter JSON path (default: stdout)")

    p = sub.add_parser("simulate", help="draw a sample path")
    _add_model(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--route", default="auto", choices=("auto", "causal", "two_sided"))
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--causal-approximation", action="store_true")
    p.add_argument("--real", action="store_true")
    p.add_argument("--out", required=True, help="sample CSV path (sidecar JSON written alongside)")

    p = sub.add_parser("verify", help="compare the closed-form mse with Monte Carlo")
    _add_model(p)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--mc-reps", type=int, default=8)
    p.add_argument("--length", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--taps", type=int, default=None)
    p.add_argument("--gauge", default="phase-continuity")
    p.add_argument("--sigmas", type=float, default=5.0, help="allowed deviation in standard errors")
    return parser


def _load(args):
    params = dict(args.param)
    return load_model(args.model, args.grid, params, args.taper)


def _tolerances(args):
    return {"rank_tol": args.rank_tol, "one_sided_tol": args.one_sided_tol,
            "divergence_threshold": args.divergence_threshold, "order": args.order}


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)


def cmd_analyze(args):
    measure, desc = _load(args)
    gauges = [g.strip() for g in args.gauges.split(",") if g.strip()]
    report = classify(measure, gauges, args.rank_tol, args.one_sided_tol, args.divergence_threshold, args.order)
    info = meta("analyze", {"gauges": gauges, **_tolerances(args), "grid_size": measure.grid.size}, desc)
    text = write_report(report, args.out, info)
    _emit(text, args.out)
    print(f"verdict: {report.verdict}  rank: {report.rank}", file=sys.stderr)
    return EXIT_OK


def _field_for_approximation(measure, args):
    if measure.has_singular_part:
        raise UsageError("approximation requires an absolutely continuous constant-rank density")
    try:
        E = decompose(measure, rank_tol=args.rank_tol, order=args.order)
    except RankNotConstant as exc:
        raise UsageError(f"approximation requires constant rank: {exc}") from exc
    if not 1 <= args.rank <= E.rank:
        raise UsageError(f"--rank {args.rank} outside 1..{E.rank}")
    return E


def _bank(measure, E, args):
    report = classify(measure, [args.gauge], args.rank_tol, args.one_sided_tol, args.divergence_threshold,
                      args.order)
    A = align_gauge(E, args.gauge)
    bank = build_filter_bank(A, args.rank, args.taps, getattr(args, "sided", "auto"), report.verdict,
                             args.one_sided_tol, getattr(args, "tail_tol", TAIL_TOL))
    return bank, report


def cmd_approximate(args):
    measure, desc = _load(args)
    E = _field_for_approximation(measure, args)
    bank, report = _bank(measure, E, args)
    if args.delta is not None or args.eps is not None:
        if args.delta is None or args.eps is None:
            raise UsageError("--delta and --eps go together")
        cert = certificate(E, args.rank, args.delta, args.eps)
        bank = bank.__class__(**{**bank.__dict__, "certificate": cert})
    params = {"rank": args.rank, "taps": args.taps, "sided": args.sided, "gauge": args.gauge,
              "delta": args.delta, "eps": args.eps, **_tolerances(args), "verdict": report.verdict}
    text = write_filters(bank, args.out, meta("approximate", params, desc))
    _emit(text, args.out)
    c = bank.certificate
    print(f"rank {c.k}: mse {c.mse:.10g}  relative error {c.relative_error:.10g}  "
          f"{bank.sided}  tail {bank.tail_energy:.3g}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    measure, desc = _load(args)
    path = simulate(measure, args.length, seed=args.seed, route=args.route, window=args.window,
                    causal_approximation=args.causal_approximation, real=args.real)
    params = {"length": args.length, "seed": args.seed, "route": args.route, "window": args.window,
              "causal_approximation": args.causal_approximation, "real": args.real}
    write_path_csv(path, args.out, meta("simulate", params, desc))
    return EXIT_OK


def cmd_verify(args):
    measure, desc = _load(args)
    E = _field_for_approximation(measure, args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bank, _ = _bank(measure, E, args)
    cert = bank.certificate
    mc = monte_carlo_mse(measure, bank, args.length, args.mc_reps, args.seed)
    dev = abs(mc.estimate - cert.mse)
    z = dev / mc.stderr if mc.stderr > 0 else (0.0 if dev == 0 else np.inf)
    rel = dev / cert.mse if cert.mse > 0 else dev
    ok = z <= args.sigmas
    print(f"{'quantity':<22}{'value':>18}")
    print(f"{'closed-form mse':<22}{cert.mse:>18.10g}")
    print(f"{'monte carlo mse':<22}{mc.estimate:>18.10g}")
    print(f"{'standard error':<22}{mc.stderr:>18.6g}")
    print(f"{'deviation / stderr':<22}{z:>18.4g}")
    print(f"{'relative deviation':<22}{rel:>18.4g}")
    print(f"{'tail energy':<22}{bank.tail_energy:>18.4g}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"analyze": cmd_analyze, "approximate": cmd_approximate, "simulate": cmd_simulate,
            "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecRegError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
