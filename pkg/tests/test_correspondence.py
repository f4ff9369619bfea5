import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_np.algebra import BlockAlgebra, Representation, psd_check
from hardy_np.correspondence import (FockTruncation, QuiverCorrespondence, creation_map, creation_matrix,
                                     inner_product, left_action, right_action, tensor, tensor_power)
from hardy_np.exceptions import DomainError
from hardy_np.sampling import random_frame

seeds = st.integers(0, 2**32 - 1)


def two_loops():
    return QuiverCorrespondence(BlockAlgebra((1,)), ((0, 0, 2),))


def test_inner_product_examples():
    E = two_loops()
    assert inner_product(E.zero(), E.random_element(np.random.default_rng(0))).norm() == 0
    xi, eta = E.element_from_arrows({0: [[[1]], [[0]]]}), E.element_from_arrows({0: [[[0]], [[1]]]})
    assert inner_product(xi, eta).norm() == 0
    xi = E.element_from_arrows({0: [[[0.6]], [[0.8]]]})
    assert np.isclose(inner_product(xi, xi).blocks[0][0, 0], 1)


def test_left_action_on_path_quiver():
    M = BlockAlgebra((1, 1))
    E = QuiverCorrespondence(M, ((0, 1, 1),))
    xi = E.element_from_arrows({0: [[[2.0]]]})
    assert left_action(M.identity(), xi).to_vector().tolist() == xi.to_vector().tolist()
    assert np.allclose(left_action(M.central_projection(1), xi).to_vector(), xi.to_vector())
    assert np.allclose(left_action(M.central_projection(0), xi).to_vector(), 0)


def test_tensor_examples():
    E = QuiverCorrespondence(BlockAlgebra((1,)), ((0, 0, 1),))
    one = E.element_from_arrows({0: [[[1.0]]]})
    t = tensor(one, one)
    assert np.isclose(inner_product(t, t).blocks[0][0, 0], 1)
    assert tensor(one, E.zero()).norm() == 0


def test_mismatched_owners_rejected():
    E, F = two_loops(), QuiverCorrespondence(BlockAlgebra((2,)), ((0, 0, 1),))
    with pytest.raises(DomainError):
        inner_product(E.zero(), F.zero())
    with pytest.raises(DomainError):
        left_action(F.owner.identity(), E.zero())


@given(seeds)
def test_module_axioms(seed):
    rng = np.random.default_rng(seed)
    E, _ = random_frame(rng)
    M = E.owner
    xi, eta = E.random_element(rng), E.random_element(rng)
    a, b = M.random_element(rng), M.random_element(rng)
    assert all(psd_check(blk)["psd"] for blk in inner_product(xi, xi).blocks)
    assert inner_product(xi, right_action(eta, a)).allclose(inner_product(xi, eta) @ a, 1e-10)
    assert inner_product(xi, eta).H.allclose(inner_product(eta, xi), 1e-10)
    assert inner_product(xi, left_action(a, eta)).allclose(inner_product(left_action(a.H, xi), eta), 1e-10)
    lhs = right_action(left_action(a, xi), b)
    rhs = left_action(a, right_action(xi, b))
    assert np.allclose(lhs.to_vector(), rhs.to_vector())
    # Cauchy-Schwarz
    assert inner_product(xi, eta).norm() <= xi.norm() * eta.norm() * (1 + 1e-12)


@given(seeds)
def test_tensor_is_balanced_and_matches_inner_product_formula(seed):
    rng = np.random.default_rng(seed)
    E, _ = random_frame(rng)
    M = E.owner
    x1, x2, y1, y2 = (E.random_element(rng) for _ in range(4))
    a = M.random_element(rng)
    lhs, rhs = tensor(right_action(x1, a), y1), tensor(x1, left_action(a, y1))
    assert np.abs(lhs.to_vector() - rhs.to_vector()).max(initial=0) <= 1e-12 * max(1, np.abs(lhs.to_vector()).max(initial=0))
    inner = inner_product(tensor(x1, y1), tensor(x2, y2))
    formula = inner_product(y1, left_action(inner_product(x1, x2), y2))
    assert inner.allclose(formula, 1e-9)


@given(seeds)
def test_tensor_power_dimension_matches_path_enumeration(seed):
    rng = np.random.default_rng(seed)
    E, _ = random_frame(rng)
    n = E.owner.block_sizes
    edges = [(a.src, a.dst) for a in E.arrows for _ in range(a.mult)]
    for k in range(4):
        count = 0
        for seq in itertools.product(edges, repeat=k):
            # consecutive edges compose right to left: the source of each is the range of the next
            if all(seq[i][0] == seq[i + 1][1] for i in range(k - 1)):
                count += n[seq[0][1]] * n[seq[-1][0]] if k else 0
        if k == 0:
            count = sum(x * x for x in n)
        assert E.fiber_dim(k) == count


def test_truncated_shift():
    E = QuiverCorrespondence(BlockAlgebra((1,)), ((0, 0, 1),))
    fock = FockTruncation(E, 3, Representation(E.owner, (1,)))
    S = creation_matrix(E.element_from_arrows({0: [[[1.0]]]}), fock)
    assert np.allclose(S, np.eye(4, k=-1))
    assert np.allclose(creation_matrix(E.zero(), fock), 0)


@given(seeds)
def test_quiver_relations_below_the_boundary(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, 4))
    M = BlockAlgebra((1,) * p)
    arrows = tuple((int(rng.integers(p)), int(rng.integers(p)), 1) for _ in range(int(rng.integers(1, 4))))
    E = QuiverCorrespondence(M, arrows)
    sigma = Representation(M, tuple(int(x) for x in rng.integers(1, 3, size=p)))
    fock = FockTruncation(E, 3, sigma)
    Q = fock.projection_upto(2)
    S = [creation_matrix(E.element_from_arrows({i: [[[1.0]]]}), fock) for i in range(len(arrows))]
    P = [creation_matrix(M.central_projection(v), fock) for v in range(p)]
    for u, v in itertools.product(range(p), repeat=2):
        if u != v:
            assert np.allclose(P[u] @ P[v], 0)
    for i, j in itertools.product(range(len(arrows)), repeat=2):
        if i != j:
            assert np.allclose(Q @ S[i].conj().T @ S[j] @ Q, 0)
    for i, (src, _, _) in enumerate(arrows):
        assert np.allclose(Q @ S[i].conj().T @ S[i] @ Q, Q @ P[src] @ Q)
    for v in range(p):
        row = sum((S[i] @ S[i].conj().T for i, a in enumerate(arrows) if a[1] == v), np.zeros_like(P[v]))
        assert psd_check(P[v] - row)["psd"]


@given(seeds)
def test_creation_operators_compose_and_preserve_inner_products(seed):
    rng = np.random.default_rng(seed)
    E, sigma = random_frame(rng, max_arrows=3)
    fock = FockTruncation(E, 3, sigma)
    xi, eta = E.random_element(rng), E.random_element(rng)
    Tx, Ty = creation_matrix(xi, fock), creation_matrix(eta, fock)
    Txy = creation_matrix(tensor(xi, eta), fock)
    assert np.allclose(Tx @ Ty, Txy)
    Q = fock.projection_upto(2)
    phi = creation_matrix(inner_product(xi, eta), fock)
    assert np.allclose(Q @ Tx.conj().T @ Ty @ Q, Q @ phi @ Q)
    L = creation_map(xi, sigma)
    assert np.allclose(L.conj().T @ L, sigma(inner_product(xi, xi)))
    assert np.isclose(np.linalg.norm(L, 2), xi.norm())


def test_fock_projections():
    E, sigma = random_frame(np.random.default_rng(3))
    fock = FockTruncation(E, 3, sigma)
    Ps = [fock.projection(k) for k in range(4)]
    assert np.allclose(sum(Ps), np.eye(fock.dim))
    for j, k in itertools.combinations(range(4), 2):
        assert np.allclose(Ps[j] @ Ps[k], 0)


def test_tensor_power_zero_is_identity():
    E = two_loops()
    assert tensor_power(E.random_element(np.random.default_rng(1)), 0).as_algebra_element().allclose(
        E.owner.identity())
