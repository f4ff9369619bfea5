"""The sigma-dual ``E^sigma`` of a quiver correspondence.

``E^sigma`` is the space of operators ``eta: H -> E (x)_sigma H`` with
``eta sigma(a) = (phi(a) (x) I) eta``.  For a quiver every such operator has
the block form ``I_{n_r(e)} (x) Y_e`` from ``H_{r(e)}`` into the edge-``e``
component, with ``Y_e`` an ``m_{s(e)} x m_{r(e)}`` matrix.  So ``E^sigma`` is
itself a quiver correspondence over the commutant ``N = BlockAlgebra(m)``
with every arrow reversed; edges of the two quivers correspond in order.

Both descriptions are kept: the structured one drives the computations and
a null-space solve of the intertwining equations serves as the independent
check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    CommutantElement,
    Representation,
    _as_matrix,
    intertwiner_space,
)
from .correspondence import QuiverCorrespondence, TensorElement, creation_map, inner_product
from .exceptions import DomainError

BALL_MARGIN = 1e-9


def _intertwining_ops(E: QuiverCorrespondence, sigma: Representation, k: int = 1):
    units = E.owner.matrix_units()
    lay = E.tensor_layout(k, sigma)
    return [sigma(u) for u in units], [lay.act(u) for u in units]


@dataclass(frozen=True, eq=False)
class DualElement:
    """An intertwiner ``eta: H -> E (x)_sigma H`` stored as a dense matrix."""

    representation: Representation
    base: QuiverCorrespondence
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        rows = self.base.tensor_layout(1, self.representation).dim
        mat = _as_matrix(self.matrix, (rows, self.representation.dim))
        object.__setattr__(self, "matrix", mat)
        if self.validate:
            err = self.intertwining_error()
            if err > 1e-10 * max(1.0, float(np.linalg.norm(mat))):
                raise DomainError(f"operator does not intertwine the actions (error {err:.3g})")

    def intertwining_error(self) -> float:
        dom, cod = _intertwining_ops(self.base, self.representation)
        if self.matrix.size == 0:
            return 0.0
        return max(float(np.abs(self.matrix @ a - b @ self.matrix).max()) for a, b in zip(dom, cod))

    @classmethod
    def from_edge_blocks(cls, E, sigma, blocks) -> "DualElement":
        blocks = list(blocks)
        if len(blocks) != len(E.edges):
            raise DomainError(f"need {len(E.edges)} edge blocks, got {len(blocks)}")
        return cls(sigma, E, ampliate_blocks(E, sigma, blocks, 0), validate=False)

    @property
    def edge_blocks(self) -> list:
        """``Y_e`` for every edge, read off the first diagonal copy."""
        sigma, E = self.representation, self.base
        m = sigma.multiplicities
        cod = E.tensor_layout(1, sigma)
        out = []
        for c, e in enumerate(E.edges):
            blk = self.matrix[cod.component_slice(c), sigma.layout.component_slice(e.dst)]
            out.append(blk[:m[e.src], :m[e.dst]].copy())
        return out

    @property
    def H(self) -> np.ndarray:
        """The adjoint ``eta^*``; this is the contraction ``T~`` of the covariant pair."""
        return self.matrix.conj().T

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0

    def require_open_ball(self, margin: float = BALL_MARGIN):
        nrm = self.norm()
        if nrm > 1 - margin:
            raise DomainError(f"point has norm {nrm:.12g}, need at most {1 - margin}")

    def __add__(self, other):
        _same_frame(self, other)
        return DualElement(self.representation, self.base, self.matrix + other.matrix, validate=False)

    def __mul__(self, c):
        return DualElement(self.representation, self.base, c * self.matrix, validate=False)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        from .serialization import encode_matrix
        return {"matrix": encode_matrix(self.matrix)}


def _same_frame(a: DualElement, b: DualElement):
    if a.representation != b.representation or a.base != b.base:
        raise DomainError("dual elements over different (E, sigma)")


def ampliate_blocks(E: QuiverCorrespondence, sigma: Representation, blocks, j: int) -> np.ndarray:
    """``I_{E^(x)j} (x) eta : E^(x)j (x) H -> E^(x)(j+1) (x) H`` from edge blocks ``Y_e``."""
    n, m = E.owner.block_sizes, sigma.multiplicities
    dom, cod = E.tensor_layout(j, sigma), E.tensor_layout(j + 1, sigma)
    index = {p: i for i, p in enumerate(E.paths(j + 1))}
    out = np.zeros((cod.dim, dom.dim), dtype=complex)
    for c, p in enumerate(E.paths(j)):
        for ei, e in enumerate(E.edges):
            if e.dst != p.source:
                continue
            y = np.asarray(blocks[ei])
            if y.shape != (m[e.src], m[e.dst]):
                raise DomainError(f"edge block {ei} has shape {y.shape}, expected {(m[e.src], m[e.dst])}")
            q = p._replace(edges=p.edges + (ei,), source=e.src)
            out[cod.component_slice(index[q]), dom.component_slice(c)] = np.kron(np.eye(n[p.range]), y)
    return out


def ampliate(eta: DualElement, j: int) -> np.ndarray:
    return ampliate_blocks(eta.base, eta.representation, eta.edge_blocks, j)


def commutant_on_tensor(b: CommutantElement, E: QuiverCorrespondence, k: int = 1) -> np.ndarray:
    """``I_{E^(x)k} (x) b`` on ``E^(x)k (x)_sigma H``."""
    sigma = b.representation
    n = E.owner.block_sizes
    lay = E.tensor_layout(k, sigma)
    out = np.zeros((lay.dim, lay.dim), dtype=complex)
    for c, p in enumerate(E.paths(k)):
        sl = lay.component_slice(c)
        out[sl, sl] = np.kron(np.eye(n[p.range]), b.blocks[p.source])
    return out


@dataclass(frozen=True)
class DualCorrespondence:
    """``E^sigma`` as a correspondence over ``N = sigma(M)'``."""

    base: QuiverCorrespondence
    representation: Representation
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        self.representation.require_faithful()
        self.base._check_rep(self.representation)

    @property
    def commutant(self):
        return self.representation.commutant_algebra

    @property
    def quiver(self) -> QuiverCorrespondence:
        """Reversed quiver over ``N``; edge ``i`` carries the block ``Y_i``."""
        if "quiver" not in self._cache:
            self._cache["quiver"] = self.base.reversed(self.commutant)
        return self._cache["quiver"]

    @property
    def identity_representation(self) -> Representation:
        """``N`` on ``H`` in standard ordering; :attr:`swap` converts coordinates."""
        return self.representation.dual_representation()

    @property
    def swap(self) -> np.ndarray:
        return self.representation.swap

    @property
    def dim(self) -> int:
        return self.quiver.dim

    @property
    def basis(self) -> list:
        """Hilbert-Schmidt orthonormal basis from the null space of the intertwining system."""
        if "basis" not in self._cache:
            dom, cod = _intertwining_ops(self.base, self.representation)
            mats = intertwiner_space(dom, cod)
            self._cache["basis"] = [DualElement(self.representation, self.base, x) for x in mats]
        return self._cache["basis"]

    def structure_constants(self) -> list:
        """``<eta_i, eta_j>`` for the basis, as commutant block lists."""
        return [[[b.tolist() for b in dual_inner(x, y).blocks] for y in self.basis] for x in self.basis]

    def element(self, blocks) -> DualElement:
        return DualElement.from_edge_blocks(self.base, self.representation, blocks)

    def to_tensor(self, eta: DualElement) -> TensorElement:
        self._own(eta)
        paths = self.quiver.paths(1)
        return TensorElement(self.quiver, 1, {p: y for p, y in zip(paths, eta.edge_blocks)})

    def from_tensor(self, t: TensorElement) -> DualElement:
        if t.base != self.quiver or t.degree != 1:
            raise DomainError("expected a degree-1 element of the dual quiver")
        return self.element([t[p] for p in self.quiver.paths(1)])

    def random_element(self, rng, radius: float = None) -> DualElement:
        """Random point; with ``radius`` it is rescaled to that operator norm."""
        eta = self.from_tensor(self.quiver.random_element(rng))
        if radius is not None:
            nrm = eta.norm()
            eta = eta * (radius / nrm) if nrm > 0 else eta
        return eta

    def left_action(self, b: CommutantElement, eta: DualElement) -> DualElement:
        self._own(eta)
        return DualElement(self.representation, self.base,
                           commutant_on_tensor(b, self.base) @ eta.matrix, validate=False)

    def right_action(self, eta: DualElement, b: CommutantElement) -> DualElement:
        self._own(eta)
        return DualElement(self.representation, self.base, eta.matrix @ b.operator, validate=False)

    def _own(self, eta: DualElement):
        if eta.representation != self.representation or eta.base != self.base:
            raise DomainError("dual element from a different (E, sigma)")


def dual_basis(E: QuiverCorrespondence, sigma: Representation) -> DualCorrespondence:
    return DualCorrespondence(E, sigma)


def dual_inner(eta: DualElement, zeta: DualElement) -> CommutantElement:
    """``<eta, zeta> = eta^* zeta`` read back as an element of ``sigma(M)'``."""
    _same_frame(eta, zeta)
    return eta.representation.commutant_from_operator(eta.H @ zeta.matrix, tol=1e-8)


# -- duality checks --------------------------------------------------------

def _gram_module(E: QuiverCorrespondence, sigma: Representation, tol: float):
    """Factor ``E^sigma (x)_iota H`` from the Gram matrix of ``eta_i (x) h_j``.

    Returns the coordinate map ``C`` (columns are the elementary tensors),
    the image matrix ``Phi`` (columns ``eta_i h_j`` in ``E (x)_sigma H``) and
    the basis used.
    """
    basis = DualCorrespondence(E, sigma).basis
    d = sigma.dim
    if not basis:
        return np.zeros((0, 0)), np.zeros((E.tensor_layout(1, sigma).dim, 0)), basis
    gram = np.zeros((len(basis) * d, len(basis) * d), dtype=complex)
    for i, x in enumerate(basis):
        for k, y in enumerate(basis):
            gram[i * d:(i + 1) * d, k * d:(k + 1) * d] = x.H @ y.matrix
    w, q = np.linalg.eigh((gram + gram.conj().T) / 2)
    keep = w > tol * max(1.0, w[-1])
    coords = np.sqrt(w[keep])[:, None] * q[:, keep].conj().T
    phi = np.concatenate([x.matrix for x in basis], axis=1)
    return coords, phi, basis


def evaluation_unitary(E: QuiverCorrespondence, sigma: Representation, tol: float = 1e-10) -> dict:
    """The map ``eta (x) h -> eta(h)`` from ``E^sigma (x)_iota H`` onto ``E (x)_sigma H``."""
    coords, phi, _ = _gram_module(E, sigma, tol)
    target = phi.shape[0]
    if coords.size == 0:
        return {"unitary": np.zeros((target, 0)), "coords": coords, "error": 0.0 if target == 0 else np.inf}
    U = phi @ np.linalg.pinv(coords)
    r = U.shape[1]
    err = max(float(np.abs(U.conj().T @ U - np.eye(r)).max()),
              float(np.abs(U @ U.conj().T - np.eye(target)).max()))
    return {"unitary": U, "coords": coords, "error": err}


def double_dual_check(E: QuiverCorrespondence, sigma: Representation, tol: float = 1e-9) -> dict:
    """Verify ``(E^sigma)^iota ~= E`` through an explicit inner-product-preserving bijection.

    The module ``K = E^sigma (x)_iota H`` is built abstractly from a Gram
    factorization, its ``N``-action is read from the basis, and the second
    dual is a fresh null-space solve.  The candidate bijection sends ``xi``
    to ``U^* L_xi`` with ``U`` the evaluation unitary.
    """
    sigma.require_faithful()
    dual = DualCorrespondence(E, sigma)
    coords, phi, basis = _gram_module(E, sigma, 1e-10)
    report = {"dim_E": E.dim, "dim_dual": len(basis)}
    if not basis:
        report.update(dim_double_dual=0, rank=0, inner_product_error=0.0,
                      intertwining_error=0.0, unitarity_error=0.0)
        report["passed"] = E.dim == 0
        return report
    ev = evaluation_unitary(E, sigma)
    U = ev["unitary"]
    pinv = np.linalg.pinv(coords)
    # N acts on K through its action on the first factor
    d = sigma.dim
    gens = [sigma.commutant_element(u.blocks) for u in dual.commutant.matrix_units()]
    dom_ops, cod_ops = [], []
    for b in gens:
        moved = np.zeros_like(coords)
        for i, x in enumerate(basis):
            bx = dual.left_action(b, x).matrix
            coef = [np.vdot(y.matrix, bx) for y in basis]
            for k, c in enumerate(coef):
                moved[:, i * d:(i + 1) * d] += c * coords[:, k * d:(k + 1) * d]
        dom_ops.append(b.operator)
        cod_ops.append(moved @ pinv)
    second = intertwiner_space(dom_ops, cod_ops)
    report["dim_double_dual"] = len(second)
    rng = np.random.default_rng(0)
    # bijection on the matrix-unit basis of E
    xis = []
    for p in E.paths(1):
        r, c = E.fiber_shape(p)
        for a in range(r):
            for b_ in range(c):
                mat = np.zeros((r, c), dtype=complex)
                mat[a, b_] = 1.0
                xis.append(E.element({p: mat}))
    images = [U.conj().T @ creation_map(x, sigma) for x in xis]
    inter = 0.0
    for z in images:
        for b, w in zip(dom_ops, cod_ops):
            inter = max(inter, float(np.abs(z @ b - w @ z).max()))
    ip = 0.0
    probes = xis + [E.random_element(rng) for _ in range(3)]
    probe_images = images + [U.conj().T @ creation_map(x, sigma) for x in probes[len(xis):]]
    for x, zx in zip(probes, probe_images):
        for y, zy in zip(probes[-3:], probe_images[-3:]):
            ip = max(ip, float(np.abs(zx.conj().T @ zy - sigma(inner_product(x, y))).max()))
    flat = np.stack([z.ravel() for z in images], axis=1) if images else np.zeros((0, 0))
    rank = int(np.linalg.matrix_rank(flat, tol=1e-8)) if flat.size else 0
    report.update(rank=rank, inner_product_error=ip, intertwining_error=inter,
                  unitarity_error=ev["error"])
    report["passed"] = bool(
        report["dim_double_dual"] == E.dim and rank == E.dim
        and ip <= tol and inter <= tol and ev["error"] <= tol)
    return report


def nullspace_dim(E: QuiverCorrespondence, sigma: Representation, k: int = 1) -> int:
    """Dimension of ``(E^(x)k)^sigma`` from a direct null-space solve."""
    if E.tensor_layout(k, sigma).dim == 0:
        return 0
    dom, cod = _intertwining_ops(E, sigma, k)
    return len(intertwiner_space(dom, cod))


def tensor_swap_check(E1: QuiverCorrespondence, E2: QuiverCorrespondence,
                      sigma: Representation, tol: float = 1e-9) -> dict:
    """Dimension identities for sums and tensor products of duals, plus unitarity of evaluation."""
    sigma.require_faithful()
    d1, d2 = DualCorrespondence(E1, sigma), DualCorrespondence(E2, sigma)
    sum_lhs = nullspace_dim(E1.direct_sum(E2), sigma)
    sum_rhs = nullspace_dim(E1, sigma) + nullspace_dim(E2, sigma)
    prod_lhs = nullspace_dim(E1.tensor_product(E2), sigma)
    prod_rhs = d2.quiver.tensor_product(d1.quiver).dim
    ev = evaluation_unitary(E1, sigma)
    shape = list(ev["unitary"].shape)
    ok = sum_lhs == sum_rhs and prod_lhs == prod_rhs and ev["error"] <= tol
    return {
        "direct_sum": [sum_lhs, sum_rhs],
        "tensor_product": [prod_lhs, prod_rhs],
        "evaluation_unitary_shape": shape,
        "unitarity_error": ev["error"],
        "passed": bool(ok),
    }


def fock_grading_check(E: QuiverCorrespondence, sigma: Representation, depth: int = 3) -> dict:
    """Compare ``dim (E^(x)k)^sigma`` with ``dim (E^sigma)^(x)k`` level by level."""
    dual = DualCorrespondence(E, sigma)
    levels = [[nullspace_dim(E, sigma, k), dual.quiver.fiber_dim(k)] for k in range(1, depth + 1)]
    return {"levels": levels, "passed": all(a == b for a, b in levels)}


# -- tensor powers of the dual ---------------------------------------------

def fock_unitary_level(dual: DualCorrespondence, k: int) -> np.ndarray:
    """``U_k : (E^sigma)^(x)k (x)_iota H -> E^(x)k (x)_sigma H``.

    Column by column from the defining rule
    ``eta_1 (x) ... (x) eta_k (x) h -> (I (x) eta_1) ... (I (x) eta_{k-1}) eta_k h``
    applied to chains of matrix units, which hit every basis vector of the
    domain exactly once.
    """
    E, sigma, D = dual.base, dual.representation, dual.quiver
    iota = dual.identity_representation
    P = dual.swap
    if k == 0:
        return P.T.astype(complex)
    dom = D.tensor_layout(k, iota)
    cod = E.tensor_layout(k, sigma)
    index = {p: i for i, p in enumerate(E.paths(k))}
    m, n = sigma.multiplicities, E.owner.block_sizes
    out = np.zeros((cod.dim, dom.dim), dtype=complex)
    for c, q in enumerate(D.paths(k)):
        sl = dom.component_slice(c)
        rows_m, cols_n = m[q.range], n[q.source]
        for a in range(rows_m):
            for x in range(cols_n):
                # Y_{f_1} = e_{a,0}, later Y = e_{0,0}, h = e_0 (x) e_x in standard order
                h = np.zeros(iota.dim, dtype=complex)
                h[iota.layout.component_slice(q.source).start + x] = 1.0
                seg = (P.T @ h)[sigma.layout.component_slice(q.source)]
                path = E.paths(0)[q.source]
                for j in range(k):
                    ei = q.edges[k - 1 - j]
                    e = E.edges[ei]
                    y = np.zeros((m[e.src], m[e.dst]), dtype=complex)
                    y[a if j == k - 1 else 0, 0] = 1.0
                    seg = np.kron(np.eye(n[path.range]), y) @ seg
                    path = path._replace(edges=path.edges + (ei,), source=e.src)
                out[cod.component_slice(index[path]), sl.start + a * cols_n + x] = seg
    return out


def dual_creation_map(dual: DualCorrespondence, t: TensorElement) -> np.ndarray:
    """``L_t : H -> (E^sigma)^(x)k (x)_iota H`` in the standard ordering of ``H``."""
    return creation_map(t, dual.identity_representation)
