"""Command-line front end: ``qspline <subcommand>``.

Every subcommand prints JSON (``qpe-demo`` can also print a table).
Floats carry 17 significant digits. Exit status is 1 when a checked bound
or tolerance fails and 2 on invalid input or solver errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .conditioning import condition_report, conditioning_sweep
from .errors import QSplineError
from .hhl import HHLConfig, LinearSystem, solve
from .pipeline import PipelineConfig, QuantumFit, quantum_evaluate, quantum_fit
from .qpe import PhaseEstimationConfig, analytic_distribution, run_qpe
from .spline import (
    FirstDerivativeBC,
    PeriodicBC,
    SecondDerivativeBC,
    build_system,
    load_csv,
)
from .statevector import Operator, Statevector, fidelity, make_basis_state
from .stateprep import prepare_binned, prepare_flat

__all__ = ["main", "dumps"]


def _float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    text = format(v, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, out=None) -> None:
    text = dumps(obj) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _boundary(args):
    kind = args.boundary
    if kind == "clamped":
        return FirstDerivativeBC(0.0, 0.0)
    if kind == "natural":
        return SecondDerivativeBC(0.0, 0.0)
    if kind == "type1":
        if args.f0p is None or args.fnp is None:
            raise SystemExit("type1 boundary needs --f0p and --fnp")
        return FirstDerivativeBC(args.f0p, args.fnp)
    if kind == "type2":
        return SecondDerivativeBC(args.f0pp or 0.0, args.fnpp or 0.0)
    return PeriodicBC()


def _load_vector(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=1, comments="#").reshape(-1)


def cmd_fit(args) -> int:
    dataset = load_csv(args.input)
    config = PipelineConfig(phase_bits=args.phase_bits, epsilon=args.epsilon,
                            estimator=args.estimator, mode=args.mode, seed=args.seed)
    fit = quantum_fit(dataset, _boundary(args), config)
    _emit(fit.to_dict(), args.out)
    return 0


def cmd_eval(args) -> int:
    with open(args.fit) as fh:
        fit = QuantumFit.from_dict(json.load(fh))
    ev = quantum_evaluate(fit, args.at, args.epsilon)
    _emit({"x": ev.x, "S": ev.S, "S1": ev.S1, "S2": ev.S2, "error_budget": list(ev.error_budget)})
    return 0


def cmd_qpe(args) -> int:
    if not 0 <= args.theta < 1:
        raise SystemExit("--theta must lie in [0, 1)")
    config = PhaseEstimationConfig(args.bits)
    u = Operator(np.diag([1.0, np.exp(2j * np.pi * args.theta)]), unitary=True)
    outcome = run_qpe(u, make_basis_state(1, 1), config)
    analytic = analytic_distribution(args.theta, args.bits)
    pair = outcome.two_candidates(args.theta)
    rows = [{"y": y, "phase": y / config.N, "probability": float(p), "analytic": float(a)}
            for y, (p, a) in enumerate(zip(outcome.distribution, analytic))]
    result = {
        "theta": args.theta,
        "bits": args.bits,
        "most_likely": outcome.most_likely(),
        "two_candidates": list(pair),
        "two_candidate_mass": outcome.probability(pair),
        "lower_bound": 4.0 / math.pi**2,
        "outcomes": rows,
    }
    if args.format == "text":
        print(f"theta = {args.theta}  bits = {args.bits}  most likely y = {result['most_likely']}")
        print(f"{'y':>5} {'y/N':>12} {'probability':>14} {'analytic':>14}")
        for r in rows:
            print(f"{r['y']:>5} {r['phase']:>12.6f} {r['probability']:>14.10f} {r['analytic']:>14.10f}")
        print(f"mass on {pair}: {result['two_candidate_mass']:.10f}")
    else:
        _emit(result)
    ok = result["two_candidate_mass"] >= result["lower_bound"] - 1e-12
    return 0 if ok else 1


def cmd_prep(args) -> int:
    x = _load_vector(args.vector)
    state, report = (prepare_binned if args.method == "binned" else prepare_flat)(x)
    target = np.zeros(state.dim, dtype=complex)
    target[: x.size] = x
    fid = fidelity(state, Statevector(target).normalized())
    out = report.as_dict()
    out["fidelity"] = fid
    _emit(out)
    return 0 if fid >= 1 - 1e-10 else 1


def _parse_sizes(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        return int(lo), int(lo)
    return int(lo), int(hi)


def cmd_conditioning(args) -> int:
    if args.sweep:
        res = conditioning_sweep(args.trials, _parse_sizes(args.sizes), seed=args.seed)
        _emit(res)
        ok = res["bound_4sqrt2_ok"] and res["gershgorin_ok"] and res["sigma_min_ok"]
        return 0 if ok else 1
    if not args.input:
        raise SystemExit("conditioning needs --sweep or --input")
    system = build_system(load_csv(args.input), _boundary(args))
    rep = condition_report(system, check=False)
    _emit(rep.as_dict())
    ok = rep.gershgorin_ok and rep.kappa_bound_ok and rep.frobenius_ok
    return 0 if ok else 1


def cmd_hhl(args) -> int:
    A = np.loadtxt(args.matrix, delimiter=",", ndmin=2, comments="#")
    b = _load_vector(args.rhs)
    config = HHLConfig.suggest(A, phase_bits=args.phase_bits)
    result = solve(LinearSystem(A, b), config)
    direct = np.linalg.lstsq(A, b, rcond=None)[0]
    target = np.zeros(result.solution_state.dim, dtype=complex)
    target[: direct.size] = direct
    fid = fidelity(result.solution_state, Statevector(target).normalized())
    _emit({
        "fidelity_vs_direct": fid,
        "success_prob": result.success_probability,
        "norm_estimate": result.norm_estimate * float(np.linalg.norm(b)),
        "norm_direct": float(np.linalg.norm(direct)),
        "residual_weight": result.residual_weight,
        "kappa_configured": result.kappa_configured,
        "evolution_time": result.evolution_time,
    })
    ok = args.min_fidelity is None or fid >= args.min_fidelity
    return 0 if ok else 1


def _add_boundary(p) -> None:
    p.add_argument("--boundary", default="natural",
                   choices=["clamped", "natural", "type1", "type2", "periodic"])
    p.add_argument("--f0p", type=float, help="S'(x_0) for type1")
    p.add_argument("--fnp", type=float, help="S'(x_n) for type1")
    p.add_argument("--f0pp", type=float, help="S''(x_0) for type2")
    p.add_argument("--fnpp", type=float, help="S''(x_n) for type2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qspline", description="Quantum cubic splines on a statevector simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="quantum fit of a CSV dataset (header x,y)")
    p.add_argument("--input", required=True)
    _add_boundary(p)
    p.add_argument("--phase-bits", type=int, default=8)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--estimator", choices=["swap", "exact"], default="swap")
    p.add_argument("--mode", choices=["exact", "shots"], default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate S, S', S'' from a saved fit")
    p.add_argument("--fit", required=True)
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("qpe-demo", help="phase estimation outcome table")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--bits", type=int, default=3)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_qpe)

    p = sub.add_parser("prep", help="state preparation cost report")
    p.add_argument("--vector", required=True)
    p.add_argument("--method", choices=["flat", "binned"], default="binned")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("conditioning", help="condition numbers of spline systems")
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--sizes", default="2..256")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input")
    _add_boundary(p)
    p.set_defaults(func=cmd_conditioning)

    p = sub.add_parser("hhl-solve", help="HHL on a dense system from CSV files")
    p.add_argument("--matrix", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--phase-bits", type=int, default=8)
    p.add_argument("--min-fidelity", type=float)
    p.set_defaults(func=cmd_hhl)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AssertionError as exc:
        print(f"qspline: check failed: {exc}", file=sys.stderr)
        return 1
    except (QSplineError, ValueError, OSError) as exc:
        print(f"qspline: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
