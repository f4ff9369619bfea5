"""Colligations, transfer functions and their synthesis from samples.

A colligation over ``N = sigma(M)'`` is a coisometry
``V = [[A, B], [C, D]] : E_0 (+) K -> E_0 (+) (E^sigma (x)_tau K)`` that
commutes with ``N``; here ``E_0 = H`` and ``K`` carries a representation
``tau`` of ``N``.  Its transfer function is
``Z(eta^*) = A + B (I - L_eta^* D)^{-1} L_eta^* C``.

Everything is block diagonal over the vertices of ``N``: ``V`` is the
amplification of one small matrix ``V_v`` per vertex, acting on
multiplicity spaces.  Coisometry of ``V`` is coisometry of each ``V_v``,
which needs ``tau_v >= sum_{s(e) = v} tau_{r(e)}``; synthesis enlarges
``tau`` to the least vector with that property.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import DEFAULT_TOL, ModuleLayout, Representation, amplify, module_blocks
from .correspondence import QuiverCorrespondence, creation_map
from .dual import DualCorrespondence, DualElement, _same_frame
from .exceptions import DomainError, NumericalError, UnsupportedError
from .pick import choi_blocks, cp_test, resolvent, theta


def _layouts(dual: DualCorrespondence, tau: Representation):
    N = dual.commutant
    n = dual.base.owner.block_sizes
    state = [(v, n[v], "ma") for v in range(N.n_blocks)]
    dom = ModuleLayout(N, tuple(state) + tau.layout.components)
    cod = ModuleLayout(N, tuple(state) + dual.quiver.tensor_layout(1, tau).components)
    return dom, cod


def minimal_aux(E: QuiverCorrespondence, lower, max_steps: int = 10_000, cap: int = 10**6) -> tuple:
    """Least ``tau >= lower`` with ``tau_v >= sum_{s(e)=v} tau_{r(e)}`` for every vertex."""
    tau = [int(x) for x in lower]
    for _ in range(max_steps):
        out = [0] * len(tau)
        for e in E.edges:
            out[e.src] += tau[e.dst]
        new = [max(t, o) for t, o in zip(tau, out)]
        if new == tau:
            return tuple(tau)
        if max(new) > cap:
            break
        tau = new
    raise UnsupportedError(
        "no finite auxiliary space admits a coisometric colligation for this quiver and data")


@dataclass(frozen=True, eq=False)
class Colligation:
    base: QuiverCorrespondence
    representation: Representation
    tau_multiplicities: tuple
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tau_multiplicities", tuple(int(t) for t in self.tau_multiplicities))
        d, k, o = self.representation.dim, self.tau.dim, self.output_dim
        shapes = {"A": (d, d), "B": (d, k), "C": (o, d), "D": (o, k)}
        for name, shape in shapes.items():
            mat = np.asarray(getattr(self, name), dtype=complex)
            if mat.size == 0:
                mat = mat.reshape(shape)
            if mat.shape != shape:
                raise DomainError(f"block {name} has shape {mat.shape}, expected {shape}")
            object.__setattr__(self, name, mat)

    @property
    def dual(self) -> DualCorrespondence:
        return DualCorrespondence(self.base, self.representation)

    @property
    def tau(self) -> Representation:
        return Representation(self.representation.commutant_algebra, self.tau_multiplicities)

    @property
    def output_dim(self) -> int:
        return self.dual.quiver.tensor_layout(1, self.tau).dim

    @property
    def V(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    @classmethod
    def from_vertex_blocks(cls, E, sigma, tau_mult, blocks, info=None) -> "Colligation":
        dual = DualCorrespondence(E, sigma)
        tau = Representation(dual.commutant, tau_mult)
        dom, cod = _layouts(dual, tau)
        V = amplify(blocks, dom, cod)
        d = sigma.dim
        return cls(E, sigma, tau_mult, V[:d, :d], V[:d, d:], V[d:, :d], V[d:, d:], info or {})

    def vertex_blocks(self) -> list:
        dom, cod = _layouts(self.dual, self.tau)
        return module_blocks(self.V, dom, cod)

    def coisometry_error(self) -> float:
        V = self.V
        if V.size == 0:
            return 0.0
        return float(np.abs(V @ V.conj().T - np.eye(V.shape[0])).max())

    def intertwining_error(self) -> float:
        dom, cod = _layouts(self.dual, self.tau)
        V = self.V
        err = 0.0
        for u in self.dual.commutant.matrix_units():
            err = max(err, float(np.abs(V @ dom.act(u) - cod.act(u) @ V).max()) if V.size else 0.0)
        return err

    def to_json(self) -> dict:
        from .serialization import encode_matrix
        return {"A": encode_matrix(self.A), "B": encode_matrix(self.B), "C": encode_matrix(self.C),
                "D": encode_matrix(self.D), "tau_multiplicities": list(self.tau_multiplicities)}


def transfer_eval(V: Colligation, eta: DualElement) -> np.ndarray:
    """``A + B (I - L_eta^* D)^{-1} L_eta^* C``."""
    if eta.base != V.base or eta.representation != V.representation:
        raise DomainError("point and colligation are over different (E, sigma)")
    eta.require_open_ball()
    tau = V.tau
    if tau.dim == 0:
        return V.A.copy()
    L = creation_map(V.dual.to_tensor(eta), tau)
    Ls = L.conj().T
    M = np.eye(tau.dim) - Ls @ V.D
    rhs = Ls @ V.C
    x = np.linalg.solve(M, rhs)
    resid = float(np.abs(M @ x - rhs).max())
    if resid > 1e-8:
        raise NumericalError("transfer solve is ill-conditioned", {"residual": resid})
    return V.A + V.B @ x


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Finitely many values ``Z_i`` of an operator function at points ``eta_i``."""

    points: tuple
    values: tuple

    def __post_init__(self):
        pts, vals = list(self.points), [np.asarray(v, dtype=complex) for v in self.values]
        if len(pts) != len(vals) or not pts:
            raise DomainError("need equally many (at least one) points and values")
        d = pts[0].representation.dim
        keep_p, keep_v = [], []
        for p, v in zip(pts, vals):
            _same_frame(pts[0], p)
            p.require_open_ball()
            if v.shape != (d, d):
                raise DomainError(f"sample values must be {d}x{d}")
            dup = [i for i, q in enumerate(keep_p) if np.array_equal(q.matrix, p.matrix)]
            if dup:
                if not np.allclose(keep_v[dup[0]], v, atol=1e-12):
                    raise DomainError("one point carries two different values")
                continue
            keep_p.append(p)
            keep_v.append(v)
        object.__setattr__(self, "points", tuple(keep_p))
        object.__setattr__(self, "values", tuple(keep_v))

    @property
    def representation(self) -> Representation:
        return self.points[0].representation

    @property
    def base(self) -> QuiverCorrespondence:
        return self.points[0].base

    def __len__(self):
        return len(self.points)


def cpd_kernel(samples: SampledFunction) -> list:
    """``K_ij = (id - Ad(Z_i, Z_j)) o (id - theta_{eta_i, eta_j})^{-1}``."""
    out = []
    for i, (x, zi) in enumerate(zip(samples.points, samples.values)):
        row = []
        for j, (y, zj) in enumerate(zip(samples.points, samples.values)):
            R = resolvent(theta(x, y))
            row.append(R - R.then_ad(zi, zj))
        out.append(row)
    return out


def cpd_test(kernel, sigma: Representation = None, tol: float = DEFAULT_TOL) -> dict:
    if not kernel:
        return {"is_cpd": True, "min_eig": 0.0, "block_reports": []}
    sigma = sigma or kernel[0][0].representation
    res = cp_test(kernel, sigma, tol)
    return {"is_cpd": res["feasible"], "min_eig": res["min_eig"],
            "certificate": res["certificate"], "block_reports": res["block_reports"]}


def _vertex_slices(u: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Columns ``u[grid[s, :]]`` for every algebra index ``s`` and every column of ``u``."""
    return np.concatenate([u[grid[s], :] for s in range(grid.shape[0])], axis=1)


def _nearest_isometry(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return a
    u, _, vh = np.linalg.svd(a, full_matrices=False)
    return u @ vh


def _complement(basis: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``range(basis)`` in ``C^dim``."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    return scipy.linalg.null_space(basis.conj().T)


def synthesize_colligation(samples: SampledFunction, tol: float = DEFAULT_TOL) -> Colligation:
    """Coisometric intertwining colligation whose transfer function matches the samples.

    Factor the Choi matrix of the kernel as ``G G^*`` per vertex to get
    ``F_i`` with ``K_ij(b) = F_i tau(b) F_j^*``; then the map
    ``(x, L_i F_i^* x) -> (Z_i^* x, F_i^* x)`` is isometric and commutes with
    ``N``, so it is solved on multiplicity slices and completed to an
    isometry whose adjoint is ``V``.
    """
    sigma, E = samples.representation, samples.base
    dual = DualCorrespondence(E, sigma)
    N = dual.commutant
    kernel = cpd_kernel(samples)
    test = cpd_test(kernel, sigma, tol)
    if not test["is_cpd"]:
        raise DomainError(f"sampled kernel is not completely positive definite (min eigenvalue "
                          f"{test['min_eig']:.3g}); no Schur-class function takes these values")
    k, d = len(samples), sigma.dim
    m = N.block_sizes
    factors, ranks = [], []
    for v, Cv in enumerate(choi_blocks(kernel, sigma)):
        w, q = np.linalg.eigh((Cv + Cv.conj().T) / 2)
        top = max(float(w[-1]) if w.size else 0.0, 1.0)
        keep = w > tol * top
        G = q[:, keep] * np.sqrt(w[keep])
        factors.append(G)
        ranks.append(int(keep.sum()))
    tau_mult = minimal_aux(E, ranks)
    tau = Representation(N, tau_mult)
    # F_i : K -> E_0, zero on the padding beyond the Kolmogorov rank
    F = [np.zeros((d, tau.dim), dtype=complex) for _ in range(k)]
    for v in range(N.n_blocks):
        G, r = factors[v], ranks[v]
        grid = tau.layout.index_grid(v)  # (m_v, tau_v)
        for i in range(k):
            for s in range(m[v]):
                rows = G[(i * m[v] + s) * d:(i * m[v] + s + 1) * d, :]
                F[i][:, grid[s, :r]] = rows
    dom, cod = _layouts(dual, tau)
    Q_cols, R_cols = [], []
    for x, zi, Fi in zip(samples.points, samples.values, F):
        L = creation_map(dual.to_tensor(x), tau)
        Q_cols.append(np.vstack([np.eye(d), L @ Fi.conj().T]))
        R_cols.append(np.vstack([zi.conj().T, Fi.conj().T]))
    Q, R = np.concatenate(Q_cols, axis=1), np.concatenate(R_cols, axis=1)
    blocks, determined, iso_err = [], True, 0.0
    for v in range(N.n_blocks):
        q = _vertex_slices(Q, cod.index_grid(v))
        r = _vertex_slices(R, dom.index_grid(v))
        cod_v, dom_v = q.shape[0], r.shape[0]
        if cod_v == 0:
            blocks.append(np.zeros((0, dom_v), dtype=complex))
            continue
        u, sv, vh = np.linalg.svd(q, full_matrices=False)
        rank = int((sv > 1e-8 * max(sv[0], 1e-300)).sum()) if sv.size else 0
        uq = u[:, :rank]
        image = r @ vh[:rank].conj().T / sv[:rank]
        iso_err = max(iso_err, float(np.abs(image.conj().T @ image - np.eye(rank)).max()) if rank else 0.0)
        image = _nearest_isometry(image)
        u_perp = _complement(uq, cod_v)
        t_perp = _complement(image, dom_v)[:, :u_perp.shape[1]]
        if t_perp.shape[1] < u_perp.shape[1]:
            raise NumericalError("no room to complete the colligation", {"vertex": v})
        W = image @ uq.conj().T + t_perp @ u_perp.conj().T
        blocks.append(W.conj().T)
        determined = determined and rank == cod_v
    info = {"kolmogorov_ranks": ranks, "aux_multiplicities": list(tau_mult),
            "determined": bool(determined), "gram_isometry_error": iso_err,
            "kernel_min_eig": test["min_eig"]}
    return Colligation.from_vertex_blocks(E, sigma, tau_mult, blocks, info)


def schur_from_hardy(X, points) -> SampledFunction:
    """Samples of a polynomial certified to lie in the closed unit ball."""
    from .hardy import evaluate

    if X.norm_bound is None or X.norm_bound > 1 + 1e-12:
        raise DomainError("polynomial is not certified to have norm at most one")
    return SampledFunction(tuple(points), tuple(evaluate(X, p) for p in points))


def random_colligation(E: QuiverCorrespondence, sigma: Representation, tau_mult, rng) -> Colligation:
    """Random coisometric intertwining colligation; ``tau_mult`` must leave room for coisometry."""
    dual = DualCorrespondence(E, sigma)
    tau = Representation(dual.commutant, tau_mult)
    if tuple(minimal_aux(E, tau.multiplicities)) != tau.multiplicities:
        raise DomainError("auxiliary multiplicities are too small for a coisometry")
    dom, cod = _layouts(dual, tau)
    blocks = []
    for v in range(dual.commutant.n_blocks):
        rows, cols = cod.multiplicity(v), dom.multiplicity(v)
        z = rng.standard_normal((cols, cols)) + 1j * rng.standard_normal((cols, cols))
        q, _ = np.linalg.qr(z)
        blocks.append(q[:rows, :])
    return Colligation.from_vertex_blocks(E, sigma, tau.multiplicities, blocks)
