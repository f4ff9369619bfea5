"""Command-line front end: JSON problem files in, JSON reports out.

Exit status 0 means the computation ran (the verdict is in the report),
2 means the input was rejected, 3 means a numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import serialization as ser
from .dual import dual_basis, double_dual_check, nullspace_dim
from .exceptions import DomainError, NumericalError, UnsupportedError
from .hardy import evaluate, evaluate_via_fock
from .nest import FiniteNest, NestProblem, VectorNestProblem, nest_solve
from .pick import PickSystem, np_feasibility, pick_matrix, solve_np_scalar
from .realization import cpd_kernel, cpd_test, synthesize_colligation, transfer_eval

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _doc(path: str, schema: str) -> dict:
    doc = _load(path)
    ser.validate(doc, schema)
    return ser.strip_meta(doc) if isinstance(doc, dict) else doc


def cmd_dual(args) -> dict:
    doc = _doc(args.frame, "dual")
    _, sigma, E = ser.decode_frame(doc["frame"])
    dual = dual_basis(E, sigma)
    return {
        "dim": dual.dim,
        "nullspace_dim": nullspace_dim(E, sigma),
        "dual_quiver": dual.quiver.to_json(),
        "commutant": dual.commutant.to_json(),
        "structure_constants": [[[ser.encode_matrix(b) for b in blocks] for blocks in row]
                                for row in dual.structure_constants()],
        "double_dual": double_dual_check(E, sigma, args.tol),
    }


def cmd_eval(args) -> dict:
    doc = _doc(args.poly, "poly")
    _, sigma, E = ser.decode_frame(doc["frame"])
    X = ser.decode_polynomial(doc, E)
    pdoc = _doc(args.point, "point")
    eta = ser.decode_point(pdoc, E, sigma)
    value = evaluate(X, eta)
    # the truncation is exact once it reaches the degree
    depth = min(args.depth, X.degree)
    fock = evaluate_via_fock(X, eta, depth)
    return {"value": ser.encode_matrix(value), "fock_value": ser.encode_matrix(fock),
            "agreement": float(np.abs(value - fock).max()), "point_norm": eta.norm(), "depth": depth}


def cmd_pick_check(args) -> dict:
    doc = _doc(args.system, "pick_check")
    _, sigma, E = ser.decode_frame(doc["frame"])
    pts = [ser.decode_point(p, E, sigma) for p in doc["points"]]
    d = sigma.dim
    B = [ser.decode_matrix(b, (d, d)) for b in doc["B"]] if "B" in doc else [np.eye(d)] * len(pts)
    C = [ser.decode_matrix(c, (d, d)) for c in doc["C"]]
    system = PickSystem(tuple(pts), tuple(B), tuple(C))
    res = np_feasibility(system, args.tol)
    out = {"feasible": res["feasible"], "min_eig": res["min_eig"], "block_reports": res["block_reports"],
           "certificate": res["certificate"]}
    if sigma.multiplicities == (1,):
        P = pick_matrix(system)
        w = np.linalg.eigvalsh((P + P.conj().T) / 2)
        out["scalar_pick"] = {"psd": bool(w[0] >= -args.tol), "min_eig": float(w[0])}
    return out


def cmd_np_solve(args) -> dict:
    z = [ser.decode_complex(x) for x in _doc(args.points, "np_points")]
    w = [ser.decode_complex(x) for x in _doc(args.values, "np_points")]
    if len(z) != len(w):
        raise DomainError("points and values differ in length")
    res = solve_np_scalar(z, w, args.tol)
    if not res["feasible"]:
        return {"feasible": False, "min_eig": res["min_eig"], "certificate": res["certificate"]}
    f = res["f"]
    sup = f.sup_on_circle()
    return {"feasible": True, "min_eig": res["min_eig"], "f": f.to_json(),
            "verification": {"max_interpolation_error": res["interpolation_error"],
                             "circle_sup": sup, "circle_samples": 10_000}}


def cmd_nest_solve(args) -> dict:
    doc = _doc(args.problem, "nest_solve")
    h = doc["h"]
    basis = ser.decode_matrix(doc["basis"], (h, h)) if "basis" in doc else None
    nest = FiniteNest(h, tuple(doc["ranks"]), basis)
    if args.vector:
        if "U" not in doc or "V" not in doc:
            raise DomainError("vector problems need U and V (vectors as columns)")
        p = VectorNestProblem(nest, ser.decode_matrix(doc["U"]), ser.decode_matrix(doc["V"]))
    else:
        if "B" not in doc or "C" not in doc:
            raise DomainError("operator problems need B and C")
        p = NestProblem(nest, ser.decode_matrix(doc["B"]), ser.decode_matrix(doc["C"]))
    res = nest_solve(p, args.tol)
    if not res["feasible"]:
        return {"feasible": False, "certificate": res["certificate"]}
    return {"feasible": True, "X": ser.encode_matrix(res["X"]),
            "residuals": {"equation": res["residual"], "norm": res["norm"],
                          "triangularity": res["triangularity_defect"]},
            "rank_decisions": res["rank_decisions"]}


def cmd_realize(args) -> dict:
    samples = ser.decode_samples(_doc(args.samples, "samples"))
    test = cpd_test(cpd_kernel(samples), samples.representation, args.tol)
    if not test["is_cpd"]:
        return {"realizable": False, "min_eig": test["min_eig"], "certificate": test["certificate"]}
    V = synthesize_colligation(samples, args.tol)
    err = max(float(np.abs(transfer_eval(V, p) - z).max()) for p, z in zip(samples.points, samples.values))
    return {"realizable": True, "colligation": ser.encode_colligation(V), "info": V.info,
            "verification": {"sample_error": err, "coisometry_error": V.coisometry_error(),
                             "intertwining_error": V.intertwining_error()}}


def cmd_transfer_eval(args) -> dict:
    V = ser.decode_colligation(_doc(args.colligation, "colligation"))
    eta = ser.decode_point(_doc(args.point, "point"), V.base, V.representation)
    return {"value": ser.encode_matrix(transfer_eval(V, eta)),
            "coisometry_error": V.coisometry_error(), "intertwining_error": V.intertwining_error()}


def cmd_schur_check(args) -> dict:
    samples = ser.decode_samples(_doc(args.samples, "samples"))
    res = cpd_test(cpd_kernel(samples), samples.representation, args.tol)
    return {"is_cpd": res["is_cpd"], "min_eig": res["min_eig"], "block_reports": res["block_reports"],
            "certificate": res["certificate"]}


def cmd_selftest(args) -> dict:
    from .selftest import run_selftest

    return run_selftest(seed=args.seed, tol=args.tol, depth=args.depth)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardy-np", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--depth", type=int, default=8)
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *files, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for flag in files:
            p.add_argument(flag, required=True, metavar="FILE")
        p.set_defaults(func=func)
        return p

    add("dual", cmd_dual, "--frame", help_text="dimension and structure of the dual correspondence")
    add("eval", cmd_eval, "--poly", "--point", help_text="evaluate a polynomial at a dual point")
    add("pick-check", cmd_pick_check, "--system", help_text="Pick-kernel feasibility")
    add("np-solve", cmd_np_solve, "--points", "--values", help_text="scalar interpolation on the disc")
    add("nest-solve", cmd_nest_solve, "--problem",
        help_text="nest-algebra interpolation").add_argument("--vector", action="store_true")
    add("realize", cmd_realize, "--samples", help_text="synthesize a colligation from samples")
    add("transfer-eval", cmd_transfer_eval, "--colligation", "--point", help_text="evaluate a transfer function")
    add("schur-check", cmd_schur_check, "--samples", help_text="test the sampled kernel")
    add("selftest", cmd_selftest, help_text="run the built-in invariant checks")
    return parser


def _summary(out: dict, code: int) -> str:
    if "error" in out:
        return f"{out['command']}: {out['error']} error: {out['message']}"
    verdict = next((f"{k}={out[k]}" for k in ("feasible", "is_cpd", "realizable", "passed") if k in out), "computed")
    return f"{out['command']}: {verdict} (exit {code})"


def run(argv=None, stdout=None, stderr=None) -> int:
    """Dispatch one subcommand; the JSON report goes to ``stdout`` and a one-line summary to ``stderr``."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    meta = {"command": args.command, "tolerances": {"tol": args.tol, "depth": args.depth, "seed": args.seed}}
    try:
        report = args.func(args)
        code = EXIT_OK
        if args.command == "selftest" and not report.get("passed", False):
            code = EXIT_NUMERIC
    except (InputError, DomainError, UnsupportedError) as exc:
        report, code = {"error": "input", "message": str(exc)}, EXIT_INPUT
    except NumericalError as exc:
        report, code = {"error": "numerical", "message": str(exc), "certificate": exc.certificate}, EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        report, code = {"error": "numerical", "message": str(exc)}, EXIT_NUMERIC
    out = ser.jsonable({**meta, **report})
    stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    stderr.write(_summary(out, code) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
