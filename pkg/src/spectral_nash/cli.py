"""Command-line interface.

Every command prints one JSON document on stdout.  Exit status: 0 success,
1 certificate violation, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .errors import (InputError, NumericalError, SearchError,
                     SpectralNashError, TooLarge, VerificationError)
from .gamefile import format_game, read_game
from .games import BimatrixGame, SymmetricGame, normalized_or_zero, symmetrize
from .generate import random_bimatrix, random_winlose
from .graph import InducedGraph, decompose, is_bipartite, perron_check, validate_winlose
from .oracle import ORACLE_MAX_N, exact_symmetric_ne, lmm_pair_count, lmm_support_search
from .search import (DEFAULT_CAP, MODES, PLAIN, parse_epsilon, planner,
                     solve_bimatrix, solve_symmetric)
from .spectral import spectrum_of, sqrt_m_bound_check

EXIT_OK = 0
EXIT_CERTIFICATE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def dump_report(report: dict, timings: bool) -> str:
    report = dict(report)
    if not timings:
        report.pop("timings", None)
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _all_ok(report: dict) -> bool:
    certs = report.get("certificates", {})
    return all(c.get("ok", False) for c in certs.values())


def _is_winlose_pattern(A) -> bool:
    U = A + A.T
    return bool(np.all((U == 0) | (U == 1)) and np.all(np.diag(U) == 0))


# -- commands -----------------------------------------------------------------

def cmd_solve(args) -> dict:
    game = read_game(args.path)
    eps = parse_epsilon(args.epsilon)
    if isinstance(game, BimatrixGame):
        sol = solve_bimatrix(game, eps, mode=args.mode, cap=args.cap,
                             seed=args.seed, workers=args.workers)
        return sol.report
    report = solve_symmetric(game.A, eps, mode=args.mode, cap=args.cap,
                             seed=args.seed, workers=args.workers).report
    report["violations"] = [list(v) for v in validate_winlose(game.A)]
    return report


def _spectrum_section(A) -> dict:
    s = spectrum_of(A)
    out = {"eigenvalues": s.eigenvalues.tolist(), "m": s.m, "xi": s.xi, "n": s.n,
           "sqrt_m": float(np.sqrt(s.m))}
    certs = {}
    if _is_winlose_pattern(A):
        g = InducedGraph.from_matrix(A)
        try:
            rep = sqrt_m_bound_check(s, g.edge_count)
            certs["sqrt_m_bound"] = {"ok": True, "excess": 0.0}
            out["sum_squares"] = rep.sum_squares
            out["edge_count"] = rep.edge_count
        except VerificationError as exc:
            certs["sqrt_m_bound"] = {"ok": False, "excess": 1.0, "detail": str(exc)}
    return out, certs, s


def cmd_spectrum(args) -> dict:
    game = read_game(args.path)
    if isinstance(game, BimatrixGame):
        A = symmetrize(game.normalized()).A
        kind = "bimatrix"
    else:
        A = game.A
        kind = "symmetric"
    spec, certs, s = _spectrum_section(A)
    g = InducedGraph.from_matrix(A)
    bip = is_bipartite(g, s)
    comps = []
    for comp in decompose(A):
        sub = comp.game.A
        rep = perron_check(InducedGraph.from_matrix(sub), spectrum_of(sub))
        comps.append({"nodes": list(comp.nodes), "lambda1": rep.lambda1,
                      "simple": rep.simple, "positive_vector": rep.positive_vector})
    certs["perron"] = {"ok": True, "excess": 0.0}
    if bip.bipartite:
        certs["bipartite_symmetric_spectrum"] = {"ok": bool(bip.spectrum_symmetric),
                                                 "excess": 0.0}
    return {
        "input": {"kind": kind, "n": A.shape[0]},
        "spectrum": spec,
        "bipartite": {"bipartite": bip.bipartite,
                      "partition": [list(p) for p in bip.partition] if bip.partition else None,
                      "spectrum_symmetric": bip.spectrum_symmetric},
        "components": comps,
        "violations": [list(v) for v in validate_winlose(A)],
        "certificates": certs,
    }


def generate(kind: str, n: int, p: float, seed: int):
    if kind == "bimatrix":
        return random_bimatrix(n, seed=seed)
    return SymmetricGame.from_matrix(
        random_winlose(n, p, seed=seed, bipartite=(kind == "bipartite-winlose")),
        check_dominance=False)


def cmd_gen(args) -> str:
    return format_game(generate(args.kind, args.n, args.p, args.seed))


def cmd_compare(args) -> dict:
    if args.path is not None:
        game = read_game(args.path)
    elif args.gen is not None:
        game = generate(args.gen, args.n, args.p, args.seed)
    else:
        raise InputError("compare needs a game file or --gen")
    eps = parse_epsilon(args.epsilon)
    timings = {}

    t0 = time.perf_counter()
    if isinstance(game, BimatrixGame):
        sol = solve_bimatrix(game, eps, cap=args.cap, seed=args.seed, workers=args.workers)
        spectral = {"f_R": sol.f_R, "f_C": sol.f_C, "max_regret": max(sol.f_R, sol.f_C),
                    "regions": sol.report.get("outcome_search", {}).get("regions_explored", 0)}
        certs = sol.report["certificates"]
        bim = BimatrixGame(normalized_or_zero(game.R), normalized_or_zero(game.C))
        A = symmetrize(bim).A
    else:
        sol = solve_symmetric(game.A, eps, cap=args.cap, seed=args.seed, workers=args.workers)
        spectral = {"f_A": sol.f, "max_regret": sol.f,
                    "regions": sol.outcome.regions_explored}
        certs = sol.report["certificates"]
        bim = BimatrixGame(game.A, game.A.T)
        A = game.A
    timings["spectral_seconds"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    base = lmm_support_search(bim, args.k, cap=args.cap * 10)
    timings["baseline_seconds"] = time.perf_counter() - t0
    baseline = {"k": args.k, "max_regret": base.best_regret,
                "f_R": base.extra["f_R"], "f_C": base.extra["f_C"],
                "pairs": base.enumerated,
                "total_pairs": lmm_pair_count(*bim.shape, args.k),
                "exhaustive": base.exhaustive}

    oracle = None
    if A.shape[0] <= ORACLE_MAX_N:
        t0 = time.perf_counter()
        o = exact_symmetric_ne(A)
        timings["oracle_seconds"] = time.perf_counter() - t0
        oracle = {"equilibria": len(o.equilibria),
                  "max_regret": 0.0 if o.equilibria else None,
                  "supports": o.enumerated}

    s = spectrum_of(A)
    plan = planner(A.shape[0], s, float(eps)).as_dict()
    return {
        "input": {"kind": "bimatrix" if isinstance(game, BimatrixGame) else "symmetric",
                  "n": A.shape[0]},
        "epsilon": str(eps),
        "spectral": spectral, "baseline": baseline, "oracle": oracle,
        "planner": plan, "certificates": certs, "timings": timings,
    }


# -- argument parsing ---------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _probability(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spectral-nash",
        description="Approximate Nash equilibria by regret descent from a spectral support grid.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--epsilon", default="1/2", help="1/k as a fraction or decimal")
        p.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP,
                       help="maximum number of start regions")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=_positive_int, default=None,
                       help="process pool size for region solves")
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock timings (makes output nondeterministic)")

    p = sub.add_parser("solve", help="solve a game file")
    p.add_argument("path")
    p.add_argument("--mode", choices=MODES, default=PLAIN)
    common(p)

    p = sub.add_parser("spectrum", help="spectral and graph analysis of a game file")
    p.add_argument("path")

    p = sub.add_parser("gen", help="write a random game file to stdout")
    p.add_argument("--kind", choices=("winlose", "bipartite-winlose", "bimatrix"),
                   default="winlose")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("compare", help="spectral search against the baseline and oracle")
    p.add_argument("path", nargs="?")
    p.add_argument("--gen", choices=("winlose", "bipartite-winlose", "bimatrix"))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--p", type=_probability, default=0.5)
    p.add_argument("--k", type=_positive_int, default=2)
    common(p)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "gen":
            if args.n < 2:
                raise InputError("--n must be at least 2")
            sys.stdout.write(cmd_gen(args))
            return EXIT_OK
        handler = {"solve": cmd_solve, "spectrum": cmd_spectrum,
                   "compare": cmd_compare}[args.command]
        report = handler(args)
    except (InputError, TooLarge, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except (NumericalError, SearchError, SpectralNashError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(dump_report(report, getattr(args, "timings", False)))
    return EXIT_OK if _all_ok(report) else EXIT_CERTIFICATE
