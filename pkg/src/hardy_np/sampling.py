"""Random instances for tests, the self-test and experiments."""
from __future__ import annotations

import numpy as np

from .algebra import BlockAlgebra, Representation
from .correspondence import QuiverCorrespondence
from .dual import DualCorrespondence
from .hardy import HardyPolynomial
from .nest import FiniteNest


def _cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_quiver(rng, max_vertices=3, max_block=3, max_arrows=4, max_mult=2, min_arrows=0):
    p = int(rng.integers(1, max_vertices + 1))
    M = BlockAlgebra(tuple(int(x) for x in rng.integers(1, max_block + 1, size=p)))
    count = int(rng.integers(min_arrows, max_arrows + 1))
    arrows = tuple((int(rng.integers(p)), int(rng.integers(p)), int(rng.integers(1, max_mult + 1)))
                   for _ in range(count))
    return QuiverCorrespondence(M, arrows)


def random_representation(rng, M: BlockAlgebra, max_mult=2) -> Representation:
    return Representation(M, tuple(int(x) for x in rng.integers(1, max_mult + 1, size=M.n_blocks)))


def random_frame(rng, max_vertices=3, max_block=3, max_arrows=4, max_mult=2, max_rep=2, min_arrows=1):
    E = random_quiver(rng, max_vertices, max_block, max_arrows, max_mult, min_arrows)
    return E, random_representation(rng, E.owner, max_rep)


def random_point(rng, E, sigma, max_radius=0.9, radius=None):
    """Dual point with norm ``radius`` or uniform in ``[0, max_radius]``."""
    r = rng.uniform(0, max_radius) if radius is None else radius
    return DualCorrespondence(E, sigma).random_element(rng, r)


def classical_disc(multiplicity: int = 1):
    """One vertex, one loop: the disc algebra, with ``sigma`` of the given multiplicity."""
    M = BlockAlgebra((1,))
    return QuiverCorrespondence(M, ((0, 0, 1),)), Representation(M, (multiplicity,))


def disc_point(t, multiplicity: int = 1):
    """The dual point at which ``T_z`` evaluates to ``t I``."""
    E, sigma = classical_disc(multiplicity)
    return DualCorrespondence(E, sigma).element([np.conj(t) * np.eye(multiplicity)])


def disc_monomial(k: int, coef=1.0, multiplicity: int = 1) -> HardyPolynomial:
    """``coef * z^k`` on the classical disc."""
    E, _ = classical_disc(multiplicity)
    if k == 0:
        return HardyPolynomial.constant(E, E.owner.identity()) * coef
    z = HardyPolynomial.creation(E.element({E.paths(1)[0]: [[1.0]]}))
    out = z
    for _ in range(k - 1):
        out = out @ z
    return out * coef


def random_creation(rng, E, degree: int) -> HardyPolynomial:
    """``T_xi / ||xi||`` for a random ``xi`` in ``E^(x)degree``; certified norm one."""
    xi = E.random_element(rng, degree)
    nrm = xi.norm()
    if nrm == 0:
        return HardyPolynomial.zero(E)
    return HardyPolynomial.creation(xi * (1.0 / nrm))


def certified_polynomial(rng, E, max_degree: int = 3, terms: int = 3, vanish_at_zero: bool = False):
    """Convex combination of products of normalized generators; certified ``||X|| <= 1``.

    Degree-zero factors are contractions in ``M``; with ``vanish_at_zero``
    every term has degree at least one.
    """
    weights = rng.dirichlet(np.ones(terms))
    total = None
    for w in weights:
        lo = 1 if vanish_at_zero else 0
        deg = int(rng.integers(lo, max_degree + 1))
        term = _contraction_constant(rng, E)
        parts = _split_degree(rng, deg)
        for d in parts:
            term = term @ random_creation(rng, E, d)
        term = term * w
        total = term if total is None else total + term
    return total


def _contraction_constant(rng, E) -> HardyPolynomial:
    a = E.owner.random_element(rng)
    a = a * (1.0 / max(a.norm(), 1e-12))
    return HardyPolynomial.constant(E, a)


def _split_degree(rng, deg: int) -> list:
    parts = []
    while deg > 0:
        d = int(rng.integers(1, deg + 1))
        parts.append(d)
        deg -= d
    return parts


def random_blaschke(rng, max_degree: int = 4, max_zero: float = 0.95):
    """Finite Blaschke product as a callable, with its zeros and unimodular constant."""
    deg = int(rng.integers(0, max_degree + 1))
    zeros = [max_zero * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()) for _ in range(deg)]
    c = np.exp(2j * np.pi * rng.uniform())

    def f(z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, c, dtype=complex)
        for a in zeros:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out

    return f, zeros, c


def random_disc_points(rng, k: int, radius: float = 0.9) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(size=k))
    return r * np.exp(2j * np.pi * rng.uniform(size=k))


def random_nest(rng, max_h: int = 8, max_m: int = 4, rotate: bool = False) -> FiniteNest:
    h = int(rng.integers(1, max_h + 1))
    m = int(rng.integers(1, min(h, max_m) + 1))
    cuts = tuple(sorted(int(x) for x in rng.choice(np.arange(1, h), m - 1, replace=False))) if m > 1 else ()
    W = None
    if rotate:
        W, _ = np.linalg.qr(_cplx(rng, h, h))
    return FiniteNest(h, cuts, W)


def functional_quiver(rng, max_vertices=3, max_block=2):
    """Quiver in which every vertex is the source of at most one arrow.

    Such quivers admit coisometric colligations with finite auxiliary spaces
    for any constant auxiliary multiplicity.
    """
    p = int(rng.integers(1, max_vertices + 1))
    M = BlockAlgebra(tuple(int(x) for x in rng.integers(1, max_block + 1, size=p)))
    arrows = []
    for v in range(p):
        if rng.uniform() < 0.8:
            arrows.append((v, int(rng.integers(p)), 1))
    if not arrows:
        arrows.append((0, 0, 1))
    return QuiverCorrespondence(M, tuple(arrows))
