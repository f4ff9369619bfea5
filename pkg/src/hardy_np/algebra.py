"""Finite-dimensional von Neumann algebras and their normal representations.

Every finite-dimensional von Neumann algebra is a direct sum of full matrix
algebras ``M_{n_1} + ... + M_{n_p}``.  A normal representation is fixed, up to
unitary equivalence, by one multiplicity per summand; we use the concrete
model ``H = sum_i C^{n_i} (x) C^{m_i}`` with ``a`` acting as ``a_i (x) I``.

Positions inside the Kronecker factors are always row-major: the vector
``x (x) y`` with ``x in C^n``, ``y in C^m`` sits at index ``x_index * m +
y_index``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .exceptions import DomainError, UnsupportedError

DEFAULT_TOL = 1e-9


def _as_matrix(m, shape=None) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise DomainError(f"expected a matrix, got array of shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise DomainError(f"expected shape {tuple(shape)}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BlockAlgebra:
    """The algebra ``M_{n_1}(C) + ... + M_{n_p}(C)``."""

    block_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes:
            raise DomainError("a block algebra needs at least one summand")
        if any(n < 1 for n in sizes):
            raise DomainError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_sizes)

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, tuple(blocks))

    def identity(self) -> "AlgebraElement":
        return self.element(np.eye(n) for n in self.block_sizes)

    def zero(self) -> "AlgebraElement":
        return self.element(np.zeros((n, n)) for n in self.block_sizes)

    def unit(self, vertex: int, i: int = 0, j: int = 0) -> "AlgebraElement":
        """Matrix unit ``e_{ij}`` in summand ``vertex``."""
        blocks = [np.zeros((n, n), dtype=complex) for n in self.block_sizes]
        blocks[vertex][i, j] = 1.0
        return self.element(blocks)

    def central_projection(self, vertex: int) -> "AlgebraElement":
        blocks = [np.zeros((n, n)) for n in self.block_sizes]
        blocks[vertex] = np.eye(self.block_sizes[vertex])
        return self.element(blocks)

    def matrix_units(self) -> list:
        """All matrix units, summand by summand, ``(i, j)`` row-major."""
        return [
            self.unit(v, i, j)
            for v, n in enumerate(self.block_sizes)
            for i in range(n)
            for j in range(n)
        ]

    def from_vector(self, vec) -> "AlgebraElement":
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.size != self.dim:
            raise DomainError(f"expected {self.dim} coordinates, got {vec.size}")
        blocks, pos = [], 0
        for n in self.block_sizes:
            blocks.append(vec[pos:pos + n * n].reshape(n, n))
            pos += n * n
        return self.element(blocks)

    def random_element(self, rng) -> "AlgebraElement":
        return self.element(
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            for n in self.block_sizes
        )

    def to_json(self) -> dict:
        return {"blocks": list(self.block_sizes)}


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    owner: BlockAlgebra
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if len(blocks) != self.owner.n_blocks:
            raise DomainError(
                f"expected {self.owner.n_blocks} blocks, got {len(blocks)}")
        blocks = tuple(_as_matrix(b, (n, n))
                       for b, n in zip(blocks, self.owner.block_sizes))
        object.__setattr__(self, "blocks", blocks)

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.owner != self.owner:
            raise DomainError("algebra elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.owner, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.owner, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement(self.owner, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, c):
        return AlgebraElement(self.owner, tuple(c * a for a in self.blocks))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.owner, tuple(a.conj().T for a in self.blocks))

    @property
    def H(self):
        return self.adjoint()

    def norm(self) -> float:
        return max(np.linalg.norm(b, 2) if b.size else 0.0 for b in self.blocks)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def allclose(self, other, atol=1e-12) -> bool:
        self._check(other)
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks))


@dataclass(frozen=True)
class ModuleLayout:
    """Coordinates of a concrete module over a :class:`BlockAlgebra`.

    The space is the ordered direct sum of *components*; component ``c`` is
    ``C^{n_v} (x) C^{mu_c}`` where the algebra acts on the ``C^{n_v}`` factor
    through summand ``v``.  ``order`` says which Kronecker factor comes
    first: ``"am"`` (algebra, multiplicity) or ``"ma"``.

    Every module map between two such spaces that commutes with the algebra
    has the form ``I_{n_v} (x) Y_v`` on the summand-``v`` part, where ``Y_v``
    acts on the concatenated multiplicity spaces of the components at ``v``.
    """

    algebra: BlockAlgebra
    components: tuple  # of (vertex, multiplicity, order)
    _offsets: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        comps = tuple((int(v), int(mu), str(order)) for v, mu, order in self.components)
        for v, mu, order in comps:
            if not 0 <= v < self.algebra.n_blocks or mu < 0 or order not in ("am", "ma"):
                raise DomainError(f"bad layout component {(v, mu, order)}")
        object.__setattr__(self, "components", comps)
        offsets, pos = [], 0
        for v, mu, _ in comps:
            offsets.append(pos)
            pos += self.algebra.block_sizes[v] * mu
        offsets.append(pos)
        object.__setattr__(self, "_offsets", tuple(offsets))

    @property
    def dim(self) -> int:
        return self._offsets[-1]

    def component_slice(self, c: int) -> slice:
        return slice(self._offsets[c], self._offsets[c + 1])

    def multiplicity(self, v: int) -> int:
        return sum(mu for w, mu, _ in self.components if w == v)

    def index_grid(self, v: int) -> np.ndarray:
        """Integer array ``g`` of shape ``(n_v, multiplicity(v))``.

        ``g[a, y]`` is the flat coordinate of ``e_a (x) f_y`` where ``f_y`` runs
        over the concatenated multiplicity spaces of the components at ``v``.
        """
        n = self.algebra.block_sizes[v]
        cols = []
        for c, (w, mu, order) in enumerate(self.components):
            if w != v or mu == 0:
                continue
            off = self._offsets[c]
            a = np.arange(n)[:, None]
            y = np.arange(mu)[None, :]
            cols.append(off + (a * mu + y if order == "am" else y * n + a))
        if not cols:
            return np.zeros((n, 0), dtype=int)
        return np.concatenate(cols, axis=1)

    def act(self, a: AlgebraElement) -> np.ndarray:
        """Matrix of the algebra element ``a`` acting on this space."""
        if a.owner != self.algebra:
            raise DomainError("element and module are over different algebras")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for v in range(self.algebra.n_blocks):
            g = self.index_grid(v)
            if g.shape[1] == 0:
                continue
            for y in range(g.shape[1]):
                out[np.ix_(g[:, y], g[:, y])] = a.blocks[v]
        return out


def read_action(op, layout: ModuleLayout) -> AlgebraElement:
    """Best algebra element ``a`` with ``layout.act(a)`` close to ``op``."""
    op = np.asarray(op)
    blocks = []
    for v, n in enumerate(layout.algebra.block_sizes):
        g = layout.index_grid(v)
        acc = np.zeros((n, n), dtype=complex)
        for y in range(g.shape[1]):
            acc += op[np.ix_(g[:, y], g[:, y])]
        blocks.append(acc / max(g.shape[1], 1))
    return layout.algebra.element(blocks)


def amplify(blocks: Sequence, domain: ModuleLayout, codomain: ModuleLayout) -> np.ndarray:
    """The module map ``sum_v I_{n_v} (x) blocks[v]`` from ``domain`` to ``codomain``."""
    if domain.algebra != codomain.algebra:
        raise DomainError("layouts over different algebras")
    out = np.zeros((codomain.dim, domain.dim), dtype=complex)
    for v, n in enumerate(domain.algebra.block_sizes):
        gd, gc = domain.index_grid(v), codomain.index_grid(v)
        y = np.asarray(blocks[v], dtype=complex)
        if y.shape != (gc.shape[1], gd.shape[1]):
            raise DomainError(
                f"block {v} has shape {y.shape}, expected {(gc.shape[1], gd.shape[1])}")
        if y.size == 0:
            continue
        for a in range(n):
            out[np.ix_(gc[a], gd[a])] = y
    return out


def module_blocks(op, domain: ModuleLayout, codomain: ModuleLayout) -> list:
    """Multiplicity blocks ``Y_v`` of a module map (inverse of :func:`amplify`).

    For maps that do not commute with the algebra this is the orthogonal
    projection onto module maps, which makes it usable as a residual test.
    """
    op = np.asarray(op)
    blocks = []
    for v, n in enumerate(domain.algebra.block_sizes):
        gd, gc = domain.index_grid(v), codomain.index_grid(v)
        acc = np.zeros((gc.shape[1], gd.shape[1]), dtype=complex)
        for a in range(n):
            acc += op[np.ix_(gc[a], gd[a])]
        blocks.append(acc / n)
    return blocks


@dataclass(frozen=True)
class Representation:
    """Normal representation ``a -> sum_i a_i (x) I_{m_i}`` on ``H``."""

    owner: BlockAlgebra
    multiplicities: tuple

    def __post_init__(self):
        mult = tuple(int(m) for m in self.multiplicities)
        if len(mult) != self.owner.n_blocks:
            raise DomainError(
                f"need {self.owner.n_blocks} multiplicities, got {len(mult)}")
        if any(m < 0 for m in mult):
            raise DomainError(f"multiplicities must be non-negative, got {mult}")
        object.__setattr__(self, "multiplicities", mult)

    @property
    def dim(self) -> int:
        return sum(n * m for n, m in zip(self.owner.block_sizes, self.multiplicities))

    @property
    def faithful(self) -> bool:
        return all(m >= 1 for m in self.multiplicities)

    @property
    def layout(self) -> ModuleLayout:
        return ModuleLayout(self.owner, tuple((v, m, "am") for v, m in enumerate(self.multiplicities)))

    def __call__(self, a: AlgebraElement) -> np.ndarray:
        return represent(a, self)

    def require_faithful(self):
        if not self.faithful:
            raise UnsupportedError(
                f"representation with multiplicities {self.multiplicities} is not faithful")

    # -- commutant ---------------------------------------------------------
    @property
    def commutant_algebra(self) -> BlockAlgebra:
        """``sigma(M)'`` as an abstract block algebra with block sizes ``m``."""
        self.require_faithful()
        return BlockAlgebra(self.multiplicities)

    @property
    def commutant_layout(self) -> ModuleLayout:
        """``H`` viewed as a module over the commutant (acting on the second factor)."""
        return ModuleLayout(
            self.commutant_algebra,
            tuple((v, n, "ma") for v, n in enumerate(self.owner.block_sizes)))

    def commutant_element(self, blocks) -> "CommutantElement":
        return CommutantElement(self, tuple(blocks))

    def commutant_from_operator(self, op, tol=DEFAULT_TOL) -> "CommutantElement":
        """Read an operator in ``sigma(M)'`` back into block coordinates."""
        op = np.asarray(op, dtype=complex)
        el = self.commutant_element(read_action(op, self.commutant_layout).blocks)
        resid = np.linalg.norm(el.operator - op)
        if resid > tol * max(1.0, np.linalg.norm(op)):
            raise DomainError(f"operator is not in the commutant (residual {resid:.3g})")
        return el

    @property
    def swap(self) -> np.ndarray:
        """Permutation taking ``C^n (x) C^m`` ordering to ``C^m (x) C^n`` blockwise."""
        perm = []
        off = 0
        for n, m in zip(self.owner.block_sizes, self.multiplicities):
            idx = np.arange(n * m).reshape(n, m).T.ravel()
            perm.extend(off + idx)
            off += n * m
        P = np.zeros((self.dim, self.dim))
        P[np.arange(self.dim), perm] = 1.0
        return P

    def dual_representation(self) -> "Representation":
        """The identity representation of ``sigma(M)'`` on ``H``, in standard form.

        The standard form orders coordinates as ``C^{m_v} (x) C^{n_v}``; use
        :attr:`swap` to move between the two orderings.
        """
        return Representation(self.commutant_algebra, self.owner.block_sizes)

    def to_json(self) -> dict:
        return {"multiplicities": list(self.multiplicities)}


@dataclass(frozen=True, eq=False)
class CommutantElement:
    """Element ``sum_i I_{n_i} (x) b_i`` of ``sigma(M)'``."""

    representation: Representation
    blocks: tuple

    def __post_init__(self):
        rep = self.representation
        blocks = tuple(self.blocks)
        if len(blocks) != rep.owner.n_blocks:
            raise DomainError("wrong number of commutant blocks")
        blocks = tuple(_as_matrix(b, (m, m)) for b, m in zip(blocks, rep.multiplicities))
        object.__setattr__(self, "blocks", blocks)

    @property
    def operator(self) -> np.ndarray:
        parts = [np.kron(np.eye(n), b)
                 for n, b in zip(self.representation.owner.block_sizes, self.blocks)]
        return scipy.linalg.block_diag(*parts) if parts else np.zeros((0, 0))

    def as_algebra_element(self) -> AlgebraElement:
        return self.representation.commutant_algebra.element(self.blocks)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])


def represent(a: AlgebraElement, sigma: Representation) -> np.ndarray:
    """``sigma(a) = sum_i a_i (x) I_{m_i}`` as a dense matrix on ``H``."""
    if a.owner != sigma.owner:
        raise DomainError("element and representation have different owners")
    parts = [np.kron(b, np.eye(m)) for b, m in zip(a.blocks, sigma.multiplicities)]
    return scipy.linalg.block_diag(*parts)


def commutant_basis(sigma: Representation) -> list:
    """Matrix-unit basis ``I_{n_i} (x) e_{st}`` of ``sigma(M)'``."""
    sigma.require_faithful()
    return [
        sigma.commutant_element(unit.blocks)
        for unit in sigma.commutant_algebra.matrix_units()
    ]


def intertwiner_space(domain_ops, codomain_ops, tol=1e-10) -> list:
    """Orthonormal (Hilbert-Schmidt) basis of ``{X : X A_g = B_g X for all g}``.

    ``domain_ops`` and ``codomain_ops`` are paired lists of square matrices.
    Solved as a null space of the stacked linear system, so the result does
    not assume anything about the structure of the actions.
    """
    domain_ops = [np.asarray(a, dtype=complex) for a in domain_ops]
    codomain_ops = [np.asarray(b, dtype=complex) for b in codomain_ops]
    if not domain_ops:
        raise DomainError("need at least one generator")
    p, q = codomain_ops[0].shape[0], domain_ops[0].shape[0]
    if p == 0 or q == 0:
        return []
    # row-major vec: vec(X A) = (I (x) A^T) vec X,  vec(B X) = (B (x) I) vec X
    rows = [np.kron(np.eye(p), a.T) - np.kron(b, np.eye(q))
            for a, b in zip(domain_ops, codomain_ops)]
    system = np.vstack(rows)
    normal = system.conj().T @ system
    w, v = np.linalg.eigh((normal + normal.conj().T) / 2)
    scale = max(1.0, float(w[-1]))
    null = v[:, w <= tol * scale]
    return [null[:, k].reshape(p, q) for k in range(null.shape[1])]


def psd_check(matrix, tol: float = DEFAULT_TOL) -> dict:
    """Positive semidefiniteness verdict after Hermitian symmetrization.

    Returns ``{"psd": bool, "min_eig": float, "vector": eigenvector}``; the
    vector belongs to the smallest eigenvalue and serves as a certificate
    when the verdict is negative.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"psd_check needs a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return {"psd": True, "min_eig": 0.0, "vector": np.zeros(0)}
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return {"psd": bool(w[0] >= -tol), "min_eig": float(w[0]), "vector": v[:, 0]}
