import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_np.exceptions import DomainError
from hardy_np.nest import (FiniteNest, NestProblem, VectorNestProblem, douglas_solvable, nest_feasibility,
                           nest_solve, vector_to_operator)
from hardy_np.sampling import random_nest

seeds = st.integers(0, 2**32 - 1)


def cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def check_solution(res, tol=1e-8):
    assert res["residual"] <= tol
    assert res["norm"] <= 1 + tol
    assert res["triangularity_defect"] <= tol


def test_b_equals_c_is_solved_by_identity_like_map():
    rng = np.random.default_rng(0)
    nest = random_nest(rng, rotate=True)
    B = cplx(rng, 3, nest.h)
    res = nest_solve(NestProblem(nest, B, B))
    assert res["feasible"]
    check_solution(res)


def test_projection_example_is_infeasible():
    nest = FiniteNest(2, (1,))
    P1 = np.diag([1.0, 0.0])
    res = nest_solve(NestProblem(nest, P1, np.eye(2)))
    assert not res["feasible"]
    cert = res["certificate"]
    assert cert["worst_N"] == 2 and np.isclose(cert["min_eig"], -1)
    v = cert["vector"]
    assert np.isclose(np.vdot(v, (P1 - np.eye(2)) @ v).real, -1)


def test_identity_b_needs_upper_triangular_contraction():
    rng = np.random.default_rng(1)
    nest = FiniteNest(4, (1, 3))
    C = cplx(rng, 4, 4)
    C /= 2 * np.linalg.norm(C, 2)
    assert not nest_feasibility(NestProblem(nest, np.eye(4), C))["feasible"]
    Cu = np.triu(C)
    Cu /= np.linalg.norm(Cu, 2)
    res = nest_solve(NestProblem(nest, np.eye(4), Cu))
    assert res["feasible"] and np.allclose(res["X"], Cu)


@given(seeds)
def test_trivial_nest_matches_least_norm_oracle(seed):
    rng = np.random.default_rng(seed)
    h, p = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    B = cplx(rng, p, h)
    if rng.uniform() < 0.3:
        B[:, 0] = 0
    C = cplx(rng, p, h) * rng.uniform(0.05, 1.5)
    # least-norm oracle: solvable with a contraction iff C lies in the range of B and pinv(B) C is contractive
    X0 = np.linalg.pinv(B) @ C
    in_range = np.allclose(B @ X0, C, atol=1e-8)
    norm = np.linalg.norm(X0, 2)
    if in_range and abs(norm - 1) < 1e-6:
        return
    expected = in_range and norm <= 1
    res = nest_solve(NestProblem(FiniteNest(h, ()), B, C))
    assert res["feasible"] == expected == douglas_solvable(B, C)
    if expected:
        check_solution(res)


@given(seeds)
def test_feasible_iff_construction_succeeds(seed):
    rng = np.random.default_rng(seed)
    nest = random_nest(rng, rotate=bool(rng.integers(2)))
    X0 = nest.from_canonical(nest.random_member(rng))
    B = cplx(rng, int(rng.integers(1, 5)), nest.h)
    C = B @ X0 * rng.uniform(0.5, 2.0)
    res = nest_solve(NestProblem(nest, B, C), force=True)
    ok = res["residual"] <= 1e-6 and res["norm"] <= 1 + 1e-6
    if abs(res["feasibility"]["min_eig"]) > 1e-6:
        assert res["feasible"] == ok
    assert res["triangularity_defect"] == 0


def test_monotone_scaling():
    rng = np.random.default_rng(3)
    nest = random_nest(rng, rotate=True)
    B = cplx(rng, 3, nest.h)
    C = B @ nest.from_canonical(nest.random_member(rng))
    verdicts = [nest_feasibility(NestProblem(nest, B, s * C))["feasible"] for s in np.linspace(0, 3, 31)]
    assert verdicts[0]
    assert verdicts == sorted(verdicts, reverse=True)


def test_vector_examples():
    nest = FiniteNest(2, (1,))
    e1, e2 = np.eye(2)
    res = nest_solve(VectorNestProblem(nest, e1, 0.5 * e1))
    assert res["feasible"] and np.allclose(res["X"] @ e1, 0.5 * e1)
    check_solution(res)
    assert not nest_solve(VectorNestProblem(nest, e1, e2))["feasible"]
    res = nest_solve(VectorNestProblem(nest, np.zeros((2, 0)), np.zeros((2, 0))))
    assert res["feasible"] and res["residual"] == 0
    u = np.array([0.6, 0.8j])
    res = nest_solve(VectorNestProblem(nest, u, u))
    assert res["feasible"] and np.allclose(res["X"] @ u, u)


@given(seeds)
def test_vector_and_operator_forms_agree(seed):
    rng = np.random.default_rng(seed)
    nest = random_nest(rng, rotate=True)
    k = int(rng.integers(1, 4))
    U = cplx(rng, nest.h, k)
    V = nest.from_canonical(nest.random_member(rng)) @ U * rng.uniform(0.5, 1.5)
    vp = VectorNestProblem(nest, U, V)
    a = nest_feasibility(vp)
    b = nest_feasibility(vector_to_operator(vp))
    assert abs(a["min_eig"] - b["min_eig"]) <= 1e-9 * max(1.0, np.abs(U).max() ** 2)
    res = nest_solve(vp)
    if res["feasible"]:
        check_solution(res, 1e-7)


def test_structural_zeros_are_exact():
    rng = np.random.default_rng(4)
    nest = FiniteNest(5, (2, 3))
    Xc = nest.random_member(rng)
    res = nest_solve(NestProblem(nest, np.eye(5), Xc))
    assert res["triangularity_defect"] == 0.0
    assert np.all(res["X_canonical"][2:, :2] == 0) and np.all(res["X_canonical"][3:, 2:3] == 0)


def test_from_projections_and_reversed():
    rng = np.random.default_rng(5)
    nest = random_nest(rng, max_h=6, rotate=True)
    again = FiniteNest.from_projections(nest.projections[1:-1] or [np.zeros((nest.h, nest.h))])
    assert again.ranks == nest.ranks
    for a, b in zip(again.projections, nest.projections):
        assert np.allclose(a, b)
    rev = nest.reversed()
    assert rev.ranks == tuple(nest.h - r for r in reversed(nest.ranks))
    for j in range(nest.m + 1):
        assert np.allclose(rev.projection(j), np.eye(nest.h) - nest.projection(nest.m - j))
    with pytest.raises(DomainError):
        FiniteNest.from_projections([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def test_validation():
    with pytest.raises(DomainError):
        FiniteNest(3, (2, 1))
    with pytest.raises(DomainError):
        FiniteNest(2, (1,), np.ones((2, 2)))
    with pytest.raises(DomainError):
        NestProblem(FiniteNest(2, ()), np.eye(2), np.eye(3))
    with pytest.raises(DomainError):
        VectorNestProblem(FiniteNest(2, ()), np.ones((2, 2)), np.ones((2, 1)))


def test_rectangular_b():
    nest = FiniteNest(3, (1,))
    B = np.array([[1.0, 0, 0]])
    res = nest_solve(NestProblem(nest, B, 0.5 * B))
    assert res["feasible"]
    check_solution(res)
