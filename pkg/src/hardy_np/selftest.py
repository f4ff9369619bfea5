"""Small seeded invariant suite behind ``hardy-np selftest``."""
from __future__ import annotations

import numpy as np

from .dual import DualCorrespondence, double_dual_check
from .hardy import commutant_check, evaluate, evaluate_via_fock
from .nest import NestProblem, nest_solve
from .pick import PickSystem, neumann_tail_bound, np_feasibility, resolvent_gap, solve_np_scalar, theta
from .realization import (SampledFunction, cpd_kernel, cpd_test, random_colligation, synthesize_colligation,
                          transfer_eval)
from .sampling import (certified_polynomial, functional_quiver, random_blaschke, random_disc_points, random_frame,
                       random_nest, random_point, random_representation)


def _check(name, values, limit):
    worst = float(max(values)) if values else 0.0
    return {"name": name, "worst": worst, "limit": limit, "passed": bool(worst <= limit)}


def _scalar_np(rng, tol):
    errs = []
    for _ in range(5):
        f, _, _ = random_blaschke(rng)
        z = random_disc_points(rng, int(rng.integers(1, 5)))
        res = solve_np_scalar(z, f(z), tol)
        errs.append(res["interpolation_error"] if res["feasible"] else np.inf)
    return _check("scalar interpolation error", errs, 1e-8)


def _evaluation(rng, depth):
    errs = []
    for _ in range(5):
        E, sigma = random_frame(rng)
        X = certified_polynomial(rng, E, max_degree=3)
        eta = random_point(rng, E, sigma)
        errs.append(np.abs(evaluate(X, eta) - evaluate_via_fock(X, eta, min(depth, X.degree))).max())
    return _check("evaluation routes disagree", errs, 1e-9)


def _duality(rng, tol):
    bad = []
    for _ in range(3):
        E, sigma = random_frame(rng)
        res = double_dual_check(E, sigma, tol)
        bad.append(0.0 if res["passed"] else 1.0)
    return _check("double dual failures", bad, 0.0)


def _commutant(rng):
    errs = []
    for _ in range(3):
        E, sigma = random_frame(rng, max_vertices=2, max_block=2, max_arrows=2)
        X = certified_polynomial(rng, E, max_degree=2)
        Y = certified_polynomial(rng, DualCorrespondence(E, sigma).quiver, max_degree=2)
        errs.append(commutant_check(X, Y, X.degree + Y.degree + 2, sigma))
    return _check("commutant defect", errs, 1e-9)


def _forward_np(rng, tol):
    worst = []
    for _ in range(3):
        E, sigma = random_frame(rng)
        X = certified_polynomial(rng, E, max_degree=3)
        pts = tuple(random_point(rng, E, sigma) for _ in range(int(rng.integers(1, 4))))
        system = PickSystem(pts, tuple(np.eye(sigma.dim) for _ in pts), tuple(evaluate(X, p) for p in pts))
        worst.append(max(0.0, -np_feasibility(system, tol)["min_eig"]))
    return _check("forward interpolation negativity", worst, tol)


def _resolvent(rng):
    excess = []
    for _ in range(3):
        E, sigma = random_frame(rng)
        eta, zeta = random_point(rng, E, sigma, 0.95), random_point(rng, E, sigma, 0.95)
        J = 40
        gap = resolvent_gap(theta(eta, zeta), J)
        excess.append(gap - neumann_tail_bound(eta.norm(), zeta.norm(), J))
    return _check("resolvent gap beyond tail bound", excess, 1e-10)


def _nest(rng, tol):
    bad = []
    for _ in range(10):
        nest = random_nest(rng, rotate=True)
        X0 = nest.from_canonical(nest.random_member(rng))
        B = rng.standard_normal((3, nest.h)) + 1j * rng.standard_normal((3, nest.h))
        res = nest_solve(NestProblem(nest, B, B @ X0), tol)
        ok = res["feasible"] and res["residual"] <= 1e-8 and res["norm"] <= 1 + 1e-8
        bad.append(0.0 if ok else 1.0)
    return _check("nest construction failures", bad, 0.0)


def _realization(rng, tol):
    errs = []
    for _ in range(2):
        E = functional_quiver(rng)
        sigma = random_representation(rng, E.owner)
        V = random_colligation(E, sigma, (2,) * E.owner.n_blocks, rng)
        pts = tuple(random_point(rng, E, sigma) for _ in range(4))
        samples = SampledFunction(pts, tuple(transfer_eval(V, p) for p in pts))
        if not cpd_test(cpd_kernel(samples), sigma, tol)["is_cpd"]:
            errs.append(np.inf)
            continue
        W = synthesize_colligation(samples, tol)
        errs.append(max(np.abs(transfer_eval(W, p) - z).max() for p, z in zip(samples.points, samples.values)))
    return _check("realization sample error", errs, 1e-6)


def run_selftest(seed: int = 0, tol: float = 1e-9, depth: int = 8) -> dict:
    rng = np.random.default_rng(seed)
    checks = [
        _scalar_np(rng, tol),
        _evaluation(rng, depth),
        _duality(rng, tol),
        _commutant(rng),
        _forward_np(rng, tol),
        _resolvent(rng),
        _nest(rng, tol),
        _realization(rng, tol),
    ]
    return {"passed": all(c["passed"] for c in checks), "checks": checks}
