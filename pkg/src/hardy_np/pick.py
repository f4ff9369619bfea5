"""Pick kernels on the commutant, complete positivity, and interpolation checks.

Linear maps out of ``N = sigma(M)'`` are stored as matrices acting on the
block coordinates of ``N`` (concatenated row-major blocks).  A map that
lands back in ``N`` also carries its ``N -> N`` matrix, which is what the
resolvent ``(id - theta)^{-1}`` is solved on.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    CommutantElement,
    Representation,
    psd_check,
    read_action,
)
from ._validation import as_complex_vector
from .correspondence import inner_product, tensor_power
from .dual import DualCorrespondence, DualElement, commutant_on_tensor, _same_frame
from .exceptions import DomainError, NumericalError


def _embedding(sigma: Representation) -> np.ndarray:
    """Columns are ``vec`` of the operators of the commutant matrix units."""
    units = sigma.commutant_algebra.matrix_units()
    return np.stack([sigma.commutant_element(u.blocks).operator.ravel() for u in units], axis=1)


def _read_coords(sigma: Representation, op) -> np.ndarray:
    return read_action(op, sigma.commutant_layout).to_vector()


@dataclass(frozen=True, eq=False)
class CommutantMap:
    """Linear map ``N -> B(H)``; ``endo`` is its ``N -> N`` matrix when the range lies in ``N``."""

    representation: Representation
    matrix: np.ndarray
    endo: np.ndarray = None

    @classmethod
    def from_endo(cls, sigma: Representation, endo) -> "CommutantMap":
        endo = np.asarray(endo, dtype=complex)
        return cls(sigma, _embedding(sigma) @ endo, endo)

    @classmethod
    def identity(cls, sigma: Representation) -> "CommutantMap":
        return cls.from_endo(sigma, np.eye(sigma.commutant_algebra.dim))

    def __call__(self, b) -> np.ndarray:
        if isinstance(b, CommutantElement):
            b = b.to_vector()
        d = self.representation.dim
        return (self.matrix @ np.asarray(b, dtype=complex)).reshape(d, d)

    def compose(self, inner: "CommutantMap") -> "CommutantMap":
        """``self o inner``; ``inner`` must land in ``N``."""
        if inner.endo is None:
            raise DomainError("inner map does not land in the commutant")
        endo = None if self.endo is None else self.endo @ inner.endo
        return CommutantMap(self.representation, self.matrix @ inner.endo, endo)

    def then_ad(self, B1, B2) -> "CommutantMap":
        """``Ad(B1, B2) o self`` with ``Ad(B1, B2)(S) = B1 S B2^*``."""
        B1, B2 = np.asarray(B1, dtype=complex), np.asarray(B2, dtype=complex)
        return CommutantMap(self.representation, np.kron(B1, B2.conj()) @ self.matrix)

    def __sub__(self, other):
        endo = None if self.endo is None or other.endo is None else self.endo - other.endo
        return CommutantMap(self.representation, self.matrix - other.matrix, endo)

    def __add__(self, other):
        endo = None if self.endo is None or other.endo is None else self.endo + other.endo
        return CommutantMap(self.representation, self.matrix + other.matrix, endo)


def theta(eta: DualElement, zeta: DualElement) -> CommutantMap:
    """``theta_{eta,zeta}(b) = eta^* (I_E (x) b) zeta``."""
    _same_frame(eta, zeta)
    sigma = eta.representation
    units = sigma.commutant_algebra.matrix_units()
    cols, endo = [], []
    for u in units:
        b = sigma.commutant_element(u.blocks)
        op = eta.H @ commutant_on_tensor(b, eta.base) @ zeta.matrix
        cols.append(op.ravel())
        endo.append(_read_coords(sigma, op))
    return CommutantMap(sigma, np.stack(cols, axis=1), np.stack(endo, axis=1))


def spectral_radius(th: CommutantMap) -> float:
    if th.endo is None or th.endo.size == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvals(th.endo)).max())


def resolvent(th: CommutantMap) -> CommutantMap:
    """``(id - theta)^{-1}`` by an exact linear solve on ``N``-coordinates."""
    if th.endo is None:
        raise DomainError("resolvent needs a map of the commutant into itself")
    rho = spectral_radius(th)
    if rho >= 1 - 1e-12:
        raise NumericalError("spectral radius is not below one", {"spectral_radius": rho})
    n = th.endo.shape[0]
    A = np.eye(n) - th.endo
    R = np.linalg.solve(A, np.eye(n))
    resid = float(np.abs(A @ R - np.eye(n)).max())
    if resid > 1e-8:
        raise NumericalError("resolvent solve is ill-conditioned", {"residual": resid, "spectral_radius": rho})
    return CommutantMap.from_endo(th.representation, R)


def neumann_resolvent(th: CommutantMap, terms: int) -> np.ndarray:
    """Partial sum ``sum_{j < terms} theta^j`` as an ``N -> N`` matrix."""
    n = th.endo.shape[0]
    acc, power = np.zeros((n, n), dtype=complex), np.eye(n, dtype=complex)
    for _ in range(terms):
        acc += power
        power = th.endo @ power
    return acc


def neumann_tail_bound(eta_norm: float, zeta_norm: float, terms: int) -> float:
    r = eta_norm * zeta_norm
    return r ** terms / (1 - r)


def resolvent_gap(th: CommutantMap, terms: int) -> float:
    """Largest operator-norm gap between the exact resolvent and the partial sum on a matrix unit."""
    diff = CommutantMap.from_endo(th.representation, resolvent(th).endo - neumann_resolvent(th, terms))
    n = diff.endo.shape[0]
    return max((float(np.linalg.norm(diff(e), 2)) for e in np.eye(n)), default=0.0)


# -- kernels and complete positivity ---------------------------------------

def choi_blocks(kernel, sigma: Representation) -> list:
    """Choi matrix of ``[a_ij] -> [K_ij(a_ij)]`` on each central summand of ``M_k(N)``.

    Summand ``v`` contributes the ``(k m_v d) x (k m_v d)`` matrix with
    ``((i,s),(j,t))`` block ``K_ij(e^v_st)``, ``d = dim H``.
    """
    k = len(kernel)
    d = sigma.dim
    N = sigma.commutant_algebra
    out = []
    offset = 0
    for v, mv in enumerate(N.block_sizes):
        big = np.zeros((k * mv * d, k * mv * d), dtype=complex)
        for i in range(k):
            for j in range(k):
                mat = kernel[i][j].matrix
                for s in range(mv):
                    for t in range(mv):
                        col = offset + s * mv + t
                        r0, c0 = (i * mv + s) * d, (j * mv + t) * d
                        big[r0:r0 + d, c0:c0 + d] = mat[:, col].reshape(d, d)
        out.append(big)
        offset += mv * mv
    return out


def cp_test(kernel, sigma: Representation, tol: float = DEFAULT_TOL) -> dict:
    """Complete positivity of the assembled kernel map via its Choi matrices."""
    reports, worst = [], None
    for v, C in enumerate(choi_blocks(kernel, sigma)):
        scale = max(1.0, float(np.abs(C).max()) if C.size else 1.0)
        asym = float(np.abs(C - C.conj().T).max()) if C.size else 0.0
        if asym > 1e3 * tol * scale:
            raise NumericalError("kernel is not Hermitian", {"vertex": v, "asymmetry": asym})
        res = psd_check(C, tol)
        reports.append({"vertex": v, "psd": res["psd"], "min_eig": res["min_eig"]})
        if worst is None or res["min_eig"] < worst[1]["min_eig"]:
            worst = (v, res)
    if worst is None:
        return {"feasible": True, "min_eig": 0.0, "certificate": None, "block_reports": []}
    v, res = worst
    return {
        "feasible": all(r["psd"] for r in reports),
        "min_eig": res["min_eig"],
        "certificate": {"vertex": v, "vector": res["vector"]},
        "block_reports": reports,
    }


@dataclass(frozen=True, eq=False)
class PickSystem:
    """Points ``eta_i`` with targets ``B_i, C_i``; asks for ``X`` with ``B_i X(eta_i^*) = C_i``."""

    points: tuple
    B: tuple
    C: tuple
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise DomainError("a Pick system needs at least one point")
        for p in pts[1:]:
            _same_frame(pts[0], p)
        for p in pts:
            p.require_open_ball()
        d = pts[0].representation.dim
        mats = []
        for group in (self.B, self.C):
            group = tuple(np.asarray(x, dtype=complex) for x in group)
            if len(group) != len(pts) or any(x.shape != (d, d) for x in group):
                raise DomainError(f"need {len(pts)} target operators of shape {(d, d)}")
            mats.append(group)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "B", mats[0])
        object.__setattr__(self, "C", mats[1])

    @property
    def representation(self) -> Representation:
        return self.points[0].representation

    @property
    def k(self) -> int:
        return len(self.points)

    def kernel(self) -> list:
        """``phi_ij = (Ad(B_i,B_j) - Ad(C_i,C_j)) o (id - theta_{eta_i,eta_j})^{-1}``."""
        if "kernel" not in self._cache:
            out = []
            for i in range(self.k):
                row = []
                for j in range(self.k):
                    R = resolvent(theta(self.points[i], self.points[j]))
                    row.append(R.then_ad(self.B[i], self.B[j]) - R.then_ad(self.C[i], self.C[j]))
                out.append(row)
            self._cache["kernel"] = out
        return self._cache["kernel"]


def np_feasibility(system: PickSystem, tol: float = DEFAULT_TOL) -> dict:
    return cp_test(system.kernel(), system.representation, tol)


def pick_matrix(system: PickSystem) -> np.ndarray:
    """``[(B_i B_j^* - C_i C_j^*) / (1 - <eta_i, eta_j>)]`` for a scalar commutant."""
    sigma = system.representation
    if sigma.multiplicities != (1,):
        raise DomainError("the scalar Pick matrix needs a one-dimensional commutant")
    d, k = sigma.dim, system.k
    out = np.zeros((k * d, k * d), dtype=complex)
    for i, x in enumerate(system.points):
        for j, y in enumerate(system.points):
            g = (x.H @ y.matrix)[0, 0]
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] = (
                system.B[i] @ system.B[j].conj().T - system.C[i] @ system.C[j].conj().T) / (1 - g)
    return out


# -- classical scalar interpolation ----------------------------------------

def scalar_pick_matrix(z, w) -> np.ndarray:
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    return (1 - np.outer(w, w.conj())) / (1 - np.outer(z, z.conj()))


@dataclass(frozen=True)
class SchurInterpolant:
    """``f_j = (gamma_j + b_j f_{j+1}) / (1 + conj(gamma_j) b_j f_{j+1})`` with ``b_j`` the Blaschke factor at ``c_j``.

    ``tail`` is the final constant (zero, or unimodular after a boundary stage).
    """

    centers: tuple
    gammas: tuple
    tail: complex = 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        f = np.full(z.shape, self.tail, dtype=complex)
        for c, g in zip(reversed(self.centers), reversed(self.gammas)):
            b = (z - c) / (1 - np.conj(c) * z)
            bf = b * f
            f = (g + bf) / (1 + np.conj(g) * bf)
        return f

    def sup_on_circle(self, samples: int = 10_000) -> float:
        t = np.exp(2j * np.pi * np.arange(samples) / samples)
        return float(np.abs(self(t)).max())

    def to_json(self) -> dict:
        enc = lambda x: [float(np.real(x)), float(np.imag(x))]
        return {"blaschke_params": [enc(g) if np.iscomplex(g) else float(np.real(g)) for g in self.gammas],
                "centers": [enc(c) for c in self.centers], "tail": enc(self.tail)}


def _certificate(P: np.ndarray) -> dict:
    res = psd_check(P, 0.0)
    return {"min_eig": res["min_eig"], "vector": res["vector"]}


def solve_np_scalar(z, w, tol: float = DEFAULT_TOL, boundary: float = 1e-7) -> dict:
    """Nevanlinna-Pick on the disc by the Schur recursion.

    Returns ``{"feasible", "min_eig", "f"}`` or, when infeasible,
    ``{"feasible": False, "min_eig", "certificate"}`` where the certificate
    vector ``v`` has ``v^* P v < 0`` for the Pick matrix ``P``.
    """
    z, w = as_complex_vector(z, "points"), as_complex_vector(w, "values")
    if z.shape != w.shape:
        raise DomainError("points and values must be equal-length lists")
    if np.any(np.abs(z) >= 1):
        raise DomainError("interpolation points must lie in the open unit disc")
    # a repeated node with two values makes the Pick matrix indefinite
    P = scalar_pick_matrix(z, w) if z.size else np.zeros((0, 0))
    min_eig = float(np.linalg.eigvalsh((P + P.conj().T) / 2)[0]) if z.size else 0.0
    if z.size and min_eig < -tol:
        return {"feasible": False, "min_eig": min_eig, "certificate": _certificate(P)}
    keep_z, keep_w = [], []
    for zi, wi in zip(z, w):
        if any(abs(zz - zi) <= 1e-14 for zz in keep_z):
            continue
        keep_z.append(zi)
        keep_w.append(wi)
    nodes, values = np.array(keep_z), np.array(keep_w)
    centers, gammas, tail = [], [], 0.0
    zs, ws = list(nodes), list(values)
    while zs:
        g = ws[0]
        if abs(g) >= 1 - boundary:
            tail = g / abs(g)
            break
        c = zs[0]
        centers.append(c)
        gammas.append(g)
        nz, nw = [], []
        for zi, wi in zip(zs[1:], ws[1:]):
            b = (zi - c) / (1 - np.conj(c) * zi)
            nz.append(zi)
            nw.append((wi - g) / ((1 - np.conj(g) * wi) * b))
        zs, ws = nz, nw
    f = SchurInterpolant(tuple(centers), tuple(gammas), complex(tail))
    err = float(np.abs(f(z) - w).max()) if z.size else 0.0
    return {"feasible": True, "min_eig": min_eig, "f": f, "interpolation_error": err}


# -- Schwartz inequalities -------------------------------------------------

def schwartz_check(X, eta: DualElement, a: CommutantElement = None, powers: int = 3,
                   tol: float = DEFAULT_TOL) -> dict:
    """PSD-order inequalities for a contractive ``X`` with ``X(0) = 0`` at ``eta^*``.

    ``W = X(eta^*)`` is compared with ``<eta, a.eta>`` for the given ``a``,
    with ``<eta^(x)k+1, eta^(x)k+1>`` after conjugating ``<eta^(x)k, eta^(x)k>``,
    and with ``<eta, eta>``.
    """
    from .hardy import evaluate

    if X.norm_bound is None or X.norm_bound > 1 + tol:
        raise DomainError("needs a polynomial certified to have norm at most one")
    if 0 in X.coeffs and X.coeffs[0].norm() > 0:
        raise DomainError("the polynomial must vanish at the origin")
    sigma = eta.representation
    W = evaluate(X, eta)
    report = {}
    diff = eta.H @ eta.matrix - W @ W.conj().T
    report["contraction"] = _ineq(diff, tol)
    if a is not None:
        th = eta.H @ commutant_on_tensor(a, eta.base) @ eta.matrix
        hyp = psd_check(a.operator - th, tol)
        if not psd_check(a.operator, tol)["psd"]:
            raise DomainError("weight must be a positive element of the commutant")
        if hyp["psd"]:
            report["weighted"] = _ineq(th - W @ a.operator @ W.conj().T, tol)
        else:
            report["weighted"] = {"skipped": True, "reason": "hypothesis <eta, a.eta> <= a fails",
                                  "min_eig": hyp["min_eig"]}
    dual = DualCorrespondence(eta.base, sigma)
    t = dual.to_tensor(eta)
    P = dual.swap
    grams = []
    for k in range(powers + 2):
        tk = tensor_power(t, k)
        g = inner_product(tk, tk)
        grams.append(P.T @ dual.identity_representation(g) @ P)
    report["powers"] = [
        dict(k=k, **_ineq(grams[k + 1] - W @ grams[k] @ W.conj().T, tol)) for k in range(1, powers + 1)]
    report["passed"] = bool(
        report["contraction"]["holds"]
        and all(r["holds"] for r in report["powers"])
        and report.get("weighted", {}).get("holds", True) is not False)
    return report


def _ineq(diff, tol) -> dict:
    res = psd_check(diff, tol)
    return {"holds": res["psd"], "min_eig": res["min_eig"]}
