"""Command-line runner.

    wolffsys run SCENARIO [--out DIR] [--tol T] [--grid MIN:MAX:POINTS] [--json]
    wolffsys run --all-acceptance
    wolffsys solve  (--scenario PATH | --measure NAME --n N --p P --alpha A [--q1 --q2])
    wolffsys check  ID [ID ...] (--scenario PATH | --measure NAME ...)
    wolffsys potential --measure NAME --n N --p P --alpha A --at R [R ...] [--riesz ORDER]
    wolffsys exponents --p P --q1 Q1 --q2 Q2 [--kappa K] [--J J]

Exit status: 0 success, 1 a requested check failed, 2 usage or parse error,
3 parameter or hypothesis violation, 4 numeric failure. Every nonzero exit
after argument parsing prints one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import scenarios as S
from .conditions import (capacity_ball_scaling, finiteness_condition, kappa_estimate,
                         local_integrability, weaker_condition_lambda)
from .errors import (AccuracyFailure, ConditionFailure, InvalidArgument, NumericFailure,
                     ParameterError, WolffError)
from .exponents import gamma_exponents, lower_bound_sequence, subsolution_scale
from .params import Params, validate, validate_wolff
from .potentials import riesz, wolff
from .solver import SolverConfig, kappa_exponents, solve

EXIT_OK, EXIT_CHECKS, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3, 4

PROFILE_COLUMNS = ("r", "wolff_sigma", "under_u", "under_v", "over_u", "over_v", "u", "v",
                   "lower_bound_u", "lower_bound_v")
TRACE_COLUMNS = ("step", "sup_increment_u", "sup_increment_v", "residual_u", "residual_v")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x):
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([v if isinstance(v, (int, np.integer)) else _fmt(v) for v in row])
    return buf.getvalue()


def _json_clean(v):
    if isinstance(v, dict):
        return {str(k): _json_clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else _fmt(v)
    return v


def _dumps(obj):
    return json.dumps(_json_clean(obj), indent=2, sort_keys=True) + "\n"


def _diagnostic(exc, exit_code):
    d = {"exit": exit_code, "error": getattr(exc, "code", type(exc).__name__), "message": str(exc)}
    if isinstance(exc, ParameterError):
        d["reason"] = exc.reason
    if isinstance(exc, ConditionFailure) and exc.report is not None:
        d["condition"] = exc.report.condition
    if isinstance(exc, NumericFailure):
        d.update(step=exc.step, node=exc.node)
    if isinstance(exc, AccuracyFailure):
        d["error_estimate"] = exc.error_estimate
    print(json.dumps(_json_clean(d), sort_keys=True), file=sys.stderr)
    return exit_code


def exit_code_for(exc):
    """Map a library exception onto the exit-status contract."""
    if isinstance(exc, S.ScenarioError):
        return EXIT_USAGE
    if isinstance(exc, (ParameterError, ConditionFailure, InvalidArgument)):
        return EXIT_VALIDATION
    if isinstance(exc, (NumericFailure, AccuracyFailure)):
        return EXIT_NUMERIC
    return EXIT_NUMERIC


# ---------------------------------------------------------------------------
# scenario resolution


def _scenario_from_args(args, need_q=True):
    if getattr(args, "scenario", None):
        sc = S.load(args.scenario)
    else:
        missing = [f for f in ("measure", "n", "p", "alpha") if getattr(args, f, None) is None]
        if missing:
            raise S.ScenarioError("without --scenario, give " + ", ".join(f"--{f}" for f in missing))
        decl = S.measure_shorthand(args.measure, args.n)
        sc = S.from_dict({"name": f"{args.measure}-n{args.n}",
                          "params": {"n": args.n, "p": args.p, "alpha": args.alpha,
                                     "q1": args.q1 if args.q1 is not None else 0.5,
                                     "q2": args.q2 if args.q2 is not None else 0.5,
                                     "mode": args.mode, "K": args.K},
                          "measure": decl})
    if getattr(args, "tol", None) is not None:
        sc.tol = args.tol
    if getattr(args, "grid", None):
        sc.grid = S.GridSpec.parse(args.grid)
    return sc


def _out_dir(args, sc):
    if getattr(args, "out", None):
        return Path(args.out)
    if sc.out:
        return Path(sc.out)
    return Path(os.environ.get("WOLFFSYS_OUT", "wolffsys-out")) / sc.name


def _config(sc):
    kw = dict(tol=sc.tol, max_steps=sc.max_steps, kappa_hint=sc.kappa_hint)
    if sc.grid is not None:
        kw.update(grid_min=sc.grid.r_min, grid_max=sc.grid.r_max, grid_points=sc.grid.points)
    return SolverConfig(**kw)


# ---------------------------------------------------------------------------
# solve / run


def _check_verdicts(res, sc):
    pair, trace, rep = res
    verdicts = {"converged": bool(pair.converged), "monotone": bool(trace.monotone_ok),
                "barrier": bool(trace.barrier_ok)}
    for key, r in rep.items():
        verdicts[key] = bool(r.passed)
    if "weaker_condition" in rep and "consistent" in rep["weaker_condition"].details:
        verdicts["weaker_condition"] &= bool(rep["weaker_condition"].details["consistent"])
    extra = {}
    for cid in sc.checks:
        if cid == "local_integrability":
            r = local_integrability(sc.measure, sc.params, 1.0, 1.0)
        elif cid == "capacity_ball_scaling":
            r = capacity_ball_scaling(sc.params, sc.measure, np.geomspace(1e-4, 1e2, 25))
        else:
            continue
        extra[cid] = r
        verdicts[cid] = bool(r.passed)
    return verdicts, extra


def _report(res, sc, verdicts, extra):
    pair, trace, rep = res
    reports = {k: r.to_dict() for k, r in rep.items()}
    reports.update({k: r.to_dict() for k, r in extra.items()})
    sand = rep["sandwich"].details
    requested = {c: verdicts.get(c, False) for c in sc.checks}
    return {
        "scenario": sc.name,
        "params": sc.params.to_dict(),
        "measure": sc.measure_decl,
        "converged": bool(pair.converged),
        "residual_u": pair.residual_u,
        "residual_v": pair.residual_v,
        "steps": len(trace.steps) - 1,
        "monotone": bool(trace.monotone_ok),
        "barrier_confined": bool(trace.barrier_ok),
        "lambda1": res.barriers.lambda1,
        "lambda2": res.barriers.lambda2,
        "sandwich_constants": {k: sand.get(k, 1.0) for k in ("c_lower_u", "c_upper_u", "c_lower_v", "c_upper_v")}
        | {"c": rep["sandwich"].constant},
        "reports": reports,
        "checks": requested,
        "pass": all(requested.values()),
    }


def write_artifacts(out, res, report):
    pair, trace, _ = res
    r = pair.u.grid
    b = res.barriers
    cols = [r, res.wsigma(r), b.under_u(r), b.under_v(r), b.over_u(r), b.over_v(r),
            pair.u.values, pair.v.values,
            res.lower_u(r) if res.lower_u is not None else np.full(r.size, np.nan),
            res.lower_v(r) if res.lower_v is not None else np.full(r.size, np.nan)]
    _atomic_write(out / "profiles.csv", _csv(PROFILE_COLUMNS, zip(*cols)))
    _atomic_write(out / "trace.csv", _csv(TRACE_COLUMNS, (
        (s.step, s.sup_increment_u, s.sup_increment_v, s.residual_u, s.residual_v) for s in trace.steps)))
    _atomic_write(out / "report.json", _dumps(report))
    meta = {"wolffsys": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "argv": sys.argv[1:]}
    _atomic_write(out / "meta.json", _dumps(meta))


def _solve_and_emit(args, sc):
    validate(sc.params)              # nonexistence gate before the measure is even built
    S.materialize(sc)
    res = solve(sc.params, sc.measure, _config(sc))
    verdicts, extra = _check_verdicts(res, sc)
    report = _report(res, sc, verdicts, extra)
    out = _out_dir(args, sc)
    write_artifacts(out, res, report)
    if args.json:
        sys.stdout.write(_dumps(report))
    else:
        print(f"{sc.name}: converged={report['converged']} steps={report['steps']} "
              f"residual={max(pair_res for pair_res in (report['residual_u'], report['residual_v'])):.2e} "
              f"sandwich c={report['sandwich_constants']['c']:.6g}")
        for cid, ok in report["checks"].items():
            print(f"  {cid}: {'pass' if ok else 'FAIL'}")
        print(f"  artifacts in {out}")
    return EXIT_OK if report["pass"] else EXIT_CHECKS


def cmd_run(args):
    if args.all_acceptance:
        from .acceptance import run_all
        results = run_all(echo=None if args.json else print)
        if args.json:
            sys.stdout.write(_dumps([{"criterion": c.number, "title": c.title, "pass": c.passed,
                                      "summary": c.summary, "details": c.details} for c in results]))
        return EXIT_OK if all(c.passed for c in results) else EXIT_CHECKS
    if not args.scenario_path:
        raise S.ScenarioError("run needs a scenario file (or a bundled name) or --all-acceptance")
    args.scenario = args.scenario_path
    return _solve_and_emit(args, _scenario_from_args(args))


def cmd_solve(args):
    return _solve_and_emit(args, _scenario_from_args(args))


# ---------------------------------------------------------------------------
# check / potential / exponents


def cmd_check(args):
    sc = _scenario_from_args(args)
    unknown = [c for c in args.ids if c not in CHECKABLE]
    if unknown:
        raise S.ScenarioError(f"unknown condition id(s) {unknown}; choose from {', '.join(CHECKABLE)}")
    P = sc.params
    validate_wolff(P.n, P.p, P.alpha)
    S.materialize(sc)
    reports = []
    for cid in args.ids:
        if cid == "finiteness":
            r = finiteness_condition(sc.measure, P)
        elif cid == "weaker_condition":
            validate(P)
            r = weaker_condition_lambda(sc.measure, P, _grid(sc))
        elif cid == "kappa":
            r = kappa_estimate(sc.measure, P, args.r if args.r is not None else kappa_exponents(P.p, P.q1, P.q2),
                               _grid(sc))
        elif cid == "local_integrability":
            r = local_integrability(sc.measure, P, args.s, args.ball_radius)
        else:
            r = capacity_ball_scaling(P, sc.measure, np.geomspace(args.r_min, args.r_max, 25))
        reports.append(r)
    if args.json:
        sys.stdout.write(_dumps([r.to_dict() for r in reports]))
    else:
        for r in reports:
            extra = " (indeterminate)" if r.indeterminate else ""
            print(f"{r.condition}: {'pass' if r.passed else 'FAIL'}{extra} constant={_fmt(r.constant)} "
                  f"probes={r.probes}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECKS


CHECKABLE = ("finiteness", "weaker_condition", "kappa", "local_integrability", "capacity_ball_scaling")


def _grid(sc):
    return None if sc.grid is None else sc.grid.radii()


def cmd_potential(args):
    sc = _scenario_from_args(args)
    P = sc.params
    validate_wolff(P.n, P.p, P.alpha)
    S.materialize(sc)
    if not args.at:
        raise S.ScenarioError("potential needs --at with one or more radii")
    rows = []
    for r in args.at:
        if args.riesz is not None:
            val = riesz(sc.measure, args.riesz, P.n, r)
        else:
            val = wolff(P, sc.measure, r)
        rows.append({"r": r, "value": val})
    if args.json:
        sys.stdout.write(_dumps({"kind": "riesz" if args.riesz is not None else "wolff",
                                 "params": P.to_dict(), "values": rows}))
    else:
        for row in rows:
            print(_fmt(row["value"]) if len(rows) == 1 else f"{_fmt(row['r'])} {_fmt(row['value'])}")
    return EXIT_OK


def cmd_exponents(args):
    ex = gamma_exponents(args.p, args.q1, args.q2)
    seq = lower_bound_sequence(args.p, args.q1, args.q2, kappa=args.kappa, J=args.J, early_exit=0)
    lam1 = subsolution_scale(args.p, args.q1, args.q2, args.kappa)
    data = {"gamma1": ex.gamma1, "gamma2": ex.gamma2, "denom": ex.denom, "lambda1": lam1,
            "contraction_ratio": seq.ratio, "C": seq.limit,
            "delta": list(seq.deltas), "c": list(seq.consts)}
    if args.json:
        sys.stdout.write(_dumps(data))
    else:
        print(f"gamma1={ex.gamma1:.17g}")
        print(f"gamma2={ex.gamma2:.17g}")
        print(f"lambda1={lam1:.17g}")
        print(f"C={seq.limit:.17g}")
        print("j delta_j c_j")
        for j, (d, c) in enumerate(zip(seq.deltas, seq.consts), 1):
            print(f"{j} {d:.17g} {c:.17g}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_problem_flags(sp, q=True):
    sp.add_argument("--scenario", help="scenario JSON file or bundled scenario name")
    sp.add_argument("--measure", help="dirac, zero or ball (unit ball, density 1)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--q1", type=float)
    sp.add_argument("--q2", type=float)
    sp.add_argument("--mode", default="integral", choices=("integral", "pde_equivalent"))
    sp.add_argument("--K", type=float, default=1.0)
    sp.add_argument("--tol", type=float, help="iteration tolerance")
    sp.add_argument("--grid", help="radial grid as min:max:points")
    sp.add_argument("--json", action="store_true", help="print the report as JSON on stdout")


def build_parser():
    ap = _Parser(prog="wolffsys", description="Wolff potentials and sublinear Wolff systems.")
    ap.add_argument("--version", action="version", version=f"wolffsys {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("run", help="solve a scenario file and write artifacts")
    sp.add_argument("scenario_path", nargs="?", help="scenario JSON file or bundled name")
    sp.add_argument("--all-acceptance", action="store_true", help="run the acceptance suite")
    sp.add_argument("--out", help="output directory (default $WOLFFSYS_OUT/<name>)")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--grid")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("solve", help="solve the system (scenario or flags)")
    _add_problem_flags(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("check", help="evaluate condition reports")
    sp.add_argument("ids", nargs="+", metavar="ID", help=", ".join(CHECKABLE))
    _add_problem_flags(sp)
    sp.add_argument("--s", type=float, default=1.0, help="exponent for local_integrability")
    sp.add_argument("--ball-radius", type=float, default=1.0)
    sp.add_argument("--r", type=float, help="exponent for kappa (default: those of the lower bound)")
    sp.add_argument("--r-min", type=float, default=1e-4)
    sp.add_argument("--r-max", type=float, default=1e2)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("potential", help="evaluate a Wolff (or Riesz) potential")
    _add_problem_flags(sp)
    sp.add_argument("--at", type=float, nargs="+", help="radii |x| along the first axis")
    sp.add_argument("--riesz", type=float, metavar="ORDER", help="Riesz potential of this order instead")
    sp.set_defaults(func=cmd_potential)

    sp = sub.add_parser("exponents", help="gamma exponents, delta_j / c_j table, lambda1")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q1", type=float, required=True)
    sp.add_argument("--q2", type=float, required=True)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--J", type=int, default=10)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_exponents)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except WolffError as e:
        code = exit_code_for(e)
        if code == EXIT_USAGE:
            ap.print_usage(sys.stderr)
        return _diagnostic(e, code)
    except (ArithmeticError, FloatingPointError) as e:
        return _diagnostic(e, EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
