import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardy_np.algebra import (BlockAlgebra, Representation, commutant_basis, intertwiner_space, psd_check,
                              represent)
from hardy_np.exceptions import DomainError, UnsupportedError

seeds = st.integers(0, 2**32 - 1)


def random_algebra(rng):
    p = int(rng.integers(1, 4))
    M = BlockAlgebra(tuple(int(x) for x in rng.integers(1, 4, size=p)))
    return M, Representation(M, tuple(int(x) for x in rng.integers(1, 3, size=p)))


def test_identity_represents_as_identity():
    M = BlockAlgebra((2, 1))
    sigma = Representation(M, (2, 3))
    assert np.allclose(represent(M.identity(), sigma), np.eye(7))


def test_scalar_algebra():
    M = BlockAlgebra((1,))
    sigma = Representation(M, (2,))
    assert np.allclose(represent(M.element([[[3.0]]]), sigma), 3 * np.eye(2))


def test_matrix_unit_gives_rank_two_projection():
    M = BlockAlgebra((2,))
    sigma = Representation(M, (2,))
    P = represent(M.unit(0, 0, 0), sigma)
    assert np.allclose(P @ P, P) and np.allclose(P, P.conj().T)
    assert np.isclose(np.trace(P).real, 2) and np.linalg.matrix_rank(P) == 2


def test_owner_mismatch_rejected():
    with pytest.raises(DomainError):
        represent(BlockAlgebra((2,)).identity(), Representation(BlockAlgebra((1,)), (1,)))


@pytest.mark.parametrize("blocks,mult,expected", [((1,), (1,), 1), ((1,), (3,), 9), ((1, 1), (1, 1), 2),
                                                   ((2, 3), (2, 1), 5)])
def test_commutant_dimension(blocks, mult, expected):
    sigma = Representation(BlockAlgebra(blocks), mult)
    basis = commutant_basis(sigma)
    assert len(basis) == expected
    mats = np.stack([b.operator.ravel() for b in basis])
    assert np.linalg.matrix_rank(mats) == expected


def test_commutant_of_direct_sum_of_scalars_matches_brute_force():
    M = BlockAlgebra((1, 1))
    sigma = Representation(M, (1, 1))
    gens = [represent(u, sigma) for u in M.matrix_units()]
    brute = intertwiner_space(gens, gens)
    assert len(brute) == 2
    for x in brute:
        assert np.allclose(x, np.diag(np.diag(x)))


def test_non_faithful_commutant_unsupported():
    sigma = Representation(BlockAlgebra((1, 2)), (1, 0))
    assert not sigma.faithful
    with pytest.raises(UnsupportedError):
        commutant_basis(sigma)


@given(seeds)
def test_representation_is_star_homomorphism(seed):
    rng = np.random.default_rng(seed)
    M, sigma = random_algebra(rng)
    a, b = M.random_element(rng), M.random_element(rng)
    assert np.allclose(represent(a @ b, sigma), represent(a, sigma) @ represent(b, sigma), atol=1e-12)
    assert np.allclose(represent(a.H, sigma), represent(a, sigma).conj().T, atol=1e-12)


@given(seeds)
def test_commutant_commutes_exactly_and_double_commutant(seed):
    rng = np.random.default_rng(seed)
    M, sigma = random_algebra(rng)
    gens = [represent(u, sigma) for u in M.matrix_units()]
    basis = [b.operator for b in commutant_basis(sigma)]
    for b in basis:
        for g in gens:
            assert np.array_equal(b @ g, g @ b)
    brute = intertwiner_space(gens, gens)
    assert len(brute) == sum(m * m for m in sigma.multiplicities)
    # the commutant of the commutant is sigma(M)
    double = intertwiner_space(basis, basis)
    assert len(double) == M.dim
    span = np.stack([g.ravel() for g in gens], axis=1)
    for x in double:
        coef, *_ = np.linalg.lstsq(span, x.ravel(), rcond=None)
        assert np.allclose(span @ coef, x.ravel(), atol=1e-9)


def test_psd_check_examples():
    res = psd_check(np.eye(3))
    assert res["psd"] and res["min_eig"] == 1.0
    res = psd_check(np.diag([1.0, -0.5]))
    assert not res["psd"] and np.isclose(res["min_eig"], -0.5)
    res = psd_check(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert res["psd"] and abs(res["min_eig"]) < 1e-15
    with pytest.raises(DomainError):
        psd_check(np.zeros((2, 3)))


@given(seeds)
def test_psd_check_agrees_with_quadratic_form_sampling(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = G @ G.conj().T - rng.uniform(0, 2) * np.eye(n)
    res = psd_check(A, 1e-9)
    v = rng.standard_normal((1000, n)) + 1j * rng.standard_normal((1000, n))
    q = np.einsum("ij,jk,ik->i", v.conj(), A, v).real / np.einsum("ij,ij->i", v.conj(), v).real
    if res["psd"]:
        assert q.min() >= -1e-9
    # the certificate is an exact witness even when sampling misses it
    else:
        w = res["vector"]
        assert np.vdot(w, A @ w).real < 0


def test_algebra_element_arithmetic():
    M = BlockAlgebra((2, 1))
    a = M.element([[[1, 2], [3, 4]], [[5]]])
    assert (a - a).norm() == 0
    assert (a * 2).allclose(a + a)
    assert M.from_vector(a.to_vector()).allclose(a)
    with pytest.raises(DomainError):
        M.element([[[1]]])
