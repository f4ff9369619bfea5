"""Weighted-quiver W*-correspondences over block algebras.

An arrow ``alpha: s -> r`` with multiplicity ``mu`` contributes ``mu`` copies
of the ``n_r x n_s`` matrices to ``E``; each copy is an *edge*.  Left and
right actions multiply fibers by the range and source blocks, and the inner
product is ``<xi, eta>_v = sum_{s(e) = v} xi_e^* eta_e``.

Tensor powers are indexed by composable edge paths ``(e_1, ..., e_k)`` with
``s(e_i) = r(e_{i+1})``; the balanced tensor product of fibers collapses to a
single ``n_{r(e_1)} x n_{s(e_k)}`` matrix, the product of the factors.  After
tensoring with ``H`` (through a representation with multiplicities ``m``)
the component of path ``p`` is ``C^{n_{r(p)}} (x) C^{m_{s(p)}}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    ModuleLayout,
    Representation,
    _as_matrix,
)
from .exceptions import DomainError


class Arrow(NamedTuple):
    src: int
    dst: int
    mult: int = 1


class Edge(NamedTuple):
    arrow: int
    slot: int
    src: int
    dst: int


class Path(NamedTuple):
    """Composable edge path; ``edges`` is empty for the degree-0 path at a vertex."""

    edges: tuple
    range: int
    source: int

    @property
    def degree(self) -> int:
        return len(self.edges)

    def concat(self, other: "Path") -> "Path":
        if self.source != other.range:
            raise DomainError("paths are not composable")
        return Path(self.edges + other.edges, self.range, other.source)

    def key(self) -> str:
        return ",".join(map(str, self.edges)) if self.edges else f"v{self.range}"


@dataclass(frozen=True)
class QuiverCorrespondence:
    owner: BlockAlgebra
    arrows: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        arrows = []
        for a in self.arrows:
            a = Arrow(*a) if not isinstance(a, dict) else Arrow(a["src"], a["dst"], a.get("mult", 1))
            a = Arrow(int(a.src), int(a.dst), int(a.mult))
            p = self.owner.n_blocks
            if not (0 <= a.src < p and 0 <= a.dst < p):
                raise DomainError(f"arrow {tuple(a)} has a vertex outside 0..{p - 1}")
            if a.mult < 1:
                raise DomainError(f"arrow multiplicity must be positive, got {a.mult}")
            arrows.append(a)
        object.__setattr__(self, "arrows", tuple(arrows))

    # -- combinatorics -----------------------------------------------------
    @property
    def edges(self) -> tuple:
        if "edges" not in self._cache:
            self._cache["edges"] = tuple(
                Edge(i, s, a.src, a.dst)
                for i, a in enumerate(self.arrows)
                for s in range(a.mult))
        return self._cache["edges"]

    def paths(self, k: int) -> tuple:
        """Composable paths of length ``k`` in lexicographic edge order."""
        if k < 0:
            raise DomainError("negative tensor degree")
        key = ("paths", k)
        if key not in self._cache:
            if k == 0:
                out = tuple(Path((), v, v) for v in range(self.owner.n_blocks))
            elif k == 1:
                out = tuple(Path((i,), e.dst, e.src) for i, e in enumerate(self.edges))
            else:
                out = tuple(
                    Path(p.edges + (i,), p.range, e.src)
                    for p in self.paths(k - 1)
                    for i, e in enumerate(self.edges)
                    if e.dst == p.source)
            self._cache[key] = out
        return self._cache[key]

    def fiber_shape(self, p: Path) -> tuple:
        n = self.owner.block_sizes
        return (n[p.range], n[p.source])

    def fiber_dim(self, k: int) -> int:
        """Complex dimension of ``E^{(x)k}``."""
        return sum(int(np.prod(self.fiber_shape(p))) for p in self.paths(k))

    @property
    def dim(self) -> int:
        return self.fiber_dim(1)

    def tensor_layout(self, k: int, sigma: Representation) -> ModuleLayout:
        """``E^{(x)k} (x)_sigma H`` as a left ``M``-module."""
        self._check_rep(sigma)
        m = sigma.multiplicities
        return ModuleLayout(self.owner, tuple((p.range, m[p.source], "am") for p in self.paths(k)))

    def _check_rep(self, sigma: Representation):
        if sigma.owner != self.owner:
            raise DomainError("representation and correspondence have different algebras")

    # -- constructions -----------------------------------------------------
    def direct_sum(self, other: "QuiverCorrespondence") -> "QuiverCorrespondence":
        if other.owner != self.owner:
            raise DomainError("direct sum needs a common algebra")
        return QuiverCorrespondence(self.owner, self.arrows + other.arrows)

    def tensor_product(self, other: "QuiverCorrespondence") -> "QuiverCorrespondence":
        """``self (x)_M other``: arrows are composable pairs ``(alpha, beta)``."""
        if other.owner != self.owner:
            raise DomainError("tensor product needs a common algebra")
        return QuiverCorrespondence(self.owner, tuple(
            Arrow(b.src, a.dst, a.mult * b.mult)
            for a in self.arrows for b in other.arrows if a.src == b.dst))

    def reversed(self, owner: BlockAlgebra) -> "QuiverCorrespondence":
        """Same arrows with source and range swapped, over ``owner``."""
        return QuiverCorrespondence(owner, tuple(Arrow(a.dst, a.src, a.mult) for a in self.arrows))

    def element(self, data: dict, degree: int = 1) -> "TensorElement":
        return TensorElement(self, degree, data)

    def element_from_arrows(self, by_arrow: dict) -> "TensorElement":
        """Degree-1 element from ``{arrow_index: [matrix per slot]}``."""
        data = {}
        paths = self.paths(1)
        lookup = {(e.arrow, e.slot): paths[i] for i, e in enumerate(self.edges)}
        for idx, mats in by_arrow.items():
            idx = int(idx)
            if not 0 <= idx < len(self.arrows):
                raise DomainError(f"no arrow with index {idx}")
            if len(mats) != self.arrows[idx].mult:
                raise DomainError(f"arrow {idx} needs {self.arrows[idx].mult} matrices")
            for slot, mat in enumerate(mats):
                data[lookup[(idx, slot)]] = mat
        return TensorElement(self, 1, data)

    def zero(self, degree: int = 1) -> "TensorElement":
        return TensorElement(self, degree, {})

    def random_element(self, rng, degree: int = 1) -> "TensorElement":
        data = {}
        for p in self.paths(degree):
            shape = self.fiber_shape(p)
            data[p] = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return TensorElement(self, degree, data)

    def from_algebra(self, a: AlgebraElement) -> "TensorElement":
        if a.owner != self.owner:
            raise DomainError("algebra element over a different algebra")
        return TensorElement(self, 0, {p: a.blocks[p.range] for p in self.paths(0)})

    def to_json(self) -> dict:
        return {"arrows": [{"src": a.src, "dst": a.dst, "mult": a.mult} for a in self.arrows]}


@dataclass(frozen=True, eq=False)
class TensorElement:
    """Element of ``E^{(x)k}``: one fiber matrix per path (missing means zero)."""

    base: QuiverCorrespondence
    degree: int
    data: dict

    def __post_init__(self):
        valid = set(self.base.paths(self.degree))
        clean = {}
        for p, mat in dict(self.data).items():
            if p not in valid:
                raise DomainError(f"{p} is not a path of length {self.degree}")
            clean[p] = _as_matrix(mat, self.base.fiber_shape(p))
        object.__setattr__(self, "data", clean)

    def __getitem__(self, p: Path) -> np.ndarray:
        if p in self.data:
            return self.data[p]
        return np.zeros(self.base.fiber_shape(p), dtype=complex)

    def _check(self, other):
        if not isinstance(other, TensorElement) or other.base != self.base:
            raise DomainError("tensor elements over different correspondences")
        if other.degree != self.degree:
            raise DomainError("tensor elements of different degrees")

    def __add__(self, other):
        self._check(other)
        keys = set(self.data) | set(other.data)
        return TensorElement(self.base, self.degree, {p: self[p] + other[p] for p in keys})

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        return TensorElement(self.base, self.degree, {p: c * m for p, m in self.data.items()})

    __rmul__ = __mul__

    def to_vector(self) -> np.ndarray:
        parts = [self[p].ravel() for p in self.base.paths(self.degree)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    @classmethod
    def from_vector(cls, base, degree, vec) -> "TensorElement":
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.size != base.fiber_dim(degree):
            raise DomainError("coordinate vector has the wrong length")
        data, pos = {}, 0
        for p in base.paths(degree):
            r, c = base.fiber_shape(p)
            data[p] = vec[pos:pos + r * c].reshape(r, c)
            pos += r * c
        return cls(base, degree, data)

    def norm(self) -> float:
        """Hilbert-module norm ``||<xi, xi>||^{1/2}``."""
        return float(np.sqrt(inner_product(self, self).norm()))

    def as_algebra_element(self) -> AlgebraElement:
        if self.degree != 0:
            raise DomainError("only degree-0 elements are algebra elements")
        return self.base.owner.element(self[p] for p in self.base.paths(0))


CorrElement = TensorElement


def inner_product(xi: TensorElement, eta: TensorElement) -> AlgebraElement:
    """``M``-valued inner product; block ``v`` sums ``xi_p^* eta_p`` over ``s(p) = v``."""
    xi._check(eta)
    alg = xi.base.owner
    blocks = [np.zeros((n, n), dtype=complex) for n in alg.block_sizes]
    for p in set(xi.data) & set(eta.data):
        blocks[p.source] += xi.data[p].conj().T @ eta.data[p]
    return alg.element(blocks)


def left_action(a: AlgebraElement, xi: TensorElement) -> TensorElement:
    if a.owner != xi.base.owner:
        raise DomainError("left action by an element of a different algebra")
    return TensorElement(xi.base, xi.degree, {p: a.blocks[p.range] @ m for p, m in xi.data.items()})


def right_action(xi: TensorElement, a: AlgebraElement) -> TensorElement:
    if a.owner != xi.base.owner:
        raise DomainError("right action by an element of a different algebra")
    return TensorElement(xi.base, xi.degree, {p: m @ a.blocks[p.source] for p, m in xi.data.items()})


def tensor(xi: TensorElement, eta: TensorElement) -> TensorElement:
    """Balanced tensor product ``xi (x)_M eta``."""
    if xi.base != eta.base:
        raise DomainError("tensor factors over different correspondences")
    data = {}
    for p, a in xi.data.items():
        for q, b in eta.data.items():
            if p.source == q.range:
                data[p.concat(q)] = a @ b
    return TensorElement(xi.base, xi.degree + eta.degree, data)


def tensor_power(xi: TensorElement, k: int) -> TensorElement:
    if k == 0:
        return xi.base.from_algebra(xi.base.owner.identity())
    out = xi
    for _ in range(k - 1):
        out = tensor(out, xi)
    return out


@dataclass(frozen=True)
class FockTruncation:
    """``F_N(E) = M + E + ... + E^{(x)N}`` tensored with ``H`` through ``sigma``."""

    base: QuiverCorrespondence
    depth: int
    representation: Representation
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.depth < 0:
            raise DomainError("Fock depth must be non-negative")
        self.base._check_rep(self.representation)

    @property
    def paths(self) -> tuple:
        if "paths" not in self._cache:
            self._cache["paths"] = tuple(p for k in range(self.depth + 1) for p in self.base.paths(k))
        return self._cache["paths"]

    @property
    def layout(self) -> ModuleLayout:
        if "layout" not in self._cache:
            m = self.representation.multiplicities
            self._cache["layout"] = ModuleLayout(
                self.base.owner, tuple((p.range, m[p.source], "am") for p in self.paths))
        return self._cache["layout"]

    @property
    def dim(self) -> int:
        return self.layout.dim

    def slice_of(self, p: Path) -> slice:
        if "index" not in self._cache:
            self._cache["index"] = {q: i for i, q in enumerate(self.paths)}
        return self.layout.component_slice(self._cache["index"][p])

    def level_slice(self, k: int) -> slice:
        if not 0 <= k <= self.depth:
            raise DomainError(f"level {k} outside 0..{self.depth}")
        if "levels" not in self._cache:
            bounds, pos = [], 0
            for j in range(self.depth + 1):
                size = self.base.tensor_layout(j, self.representation).dim
                bounds.append(slice(pos, pos + size))
                pos += size
            self._cache["levels"] = bounds
        return self._cache["levels"][k]

    def projection(self, k: int) -> np.ndarray:
        """Orthogonal projection ``P_k`` onto ``E^{(x)k} (x) H``."""
        P = np.zeros((self.dim, self.dim))
        sl = self.level_slice(k)
        P[sl, sl] = np.eye(sl.stop - sl.start)
        return P

    def projection_upto(self, k: int) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        stop = self.level_slice(min(k, self.depth)).stop if k >= 0 else 0
        P[:stop, :stop] = np.eye(stop)
        return P

    def vacuum_embedding(self) -> np.ndarray:
        """``H -> F_N(E) (x) H`` onto the degree-0 summand."""
        out = np.zeros((self.dim, self.representation.dim))
        sl = self.level_slice(0)
        out[sl, :] = np.eye(self.representation.dim)
        return out


def creation_matrix(xi, fock: FockTruncation, sigma: Representation = None) -> np.ndarray:
    """``T_xi (x) I`` compressed to ``F_N(E) (x) H``.

    ``xi`` may be a :class:`TensorElement` of any degree (degree 0 gives the
    diagonal action ``phi_infinity(a) (x) I``) or an :class:`AlgebraElement`.
    Components pushed beyond depth ``N`` are discarded.
    """
    sigma = sigma or fock.representation
    if sigma != fock.representation:
        raise DomainError("Fock truncation built for a different representation")
    if isinstance(xi, AlgebraElement):
        xi = fock.base.from_algebra(xi)
    if xi.base != fock.base:
        raise DomainError("creation operator over a different correspondence")
    m = sigma.multiplicities
    out = np.zeros((fock.dim, fock.dim), dtype=complex)
    for k in range(fock.depth - xi.degree + 1):
        for q in fock.base.paths(k):
            cols = fock.slice_of(q)
            eye = np.eye(m[q.source])
            for p, mat in xi.data.items():
                if p.source != q.range:
                    continue
                out[fock.slice_of(p.concat(q)), cols] = np.kron(mat, eye)
    return out


def creation_map(xi: TensorElement, sigma: Representation) -> np.ndarray:
    """``L_xi : H -> E^{(x)k} (x) H``, ``h -> xi (x) h``."""
    E = xi.base
    E._check_rep(sigma)
    dom = sigma.layout
    cod = E.tensor_layout(xi.degree, sigma)
    out = np.zeros((cod.dim, dom.dim), dtype=complex)
    m = sigma.multiplicities
    for c, p in enumerate(E.paths(xi.degree)):
        if p in xi.data:
            out[cod.component_slice(c), dom.component_slice(p.source)] = np.kron(xi.data[p], np.eye(m[p.source]))
    return out
