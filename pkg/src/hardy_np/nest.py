"""Interpolation in finite nest algebras.

A finite nest ``0 = N_0 < N_1 < ... < N_m = I`` is stored in canonical form:
a unitary ``W`` and ranks ``r_j`` with ``N_j = W diag(I_{r_j}, 0) W^*``.  In the
coordinates ``X' = W^* X W`` the nest algebra is block upper triangular.

``BX = C`` with ``X`` in the nest algebra and ``||X|| <= 1`` is solved one
column block at a time: with ``Delta = I - X_prev X_prev^*`` the new block
is ``Delta^{1/2} G`` where ``G`` is the least-norm solution of
``B_{<=j} Delta^{1/2} G = C_j``.  The condition at ``N_j`` is exactly what makes
``G`` a contraction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, psd_check
from .exceptions import DomainError


@dataclass(frozen=True, eq=False)
class FiniteNest:
    h: int
    ranks: tuple
    basis: np.ndarray = None

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        if 0 not in ranks:
            ranks = (0,) + ranks
        if self.h not in ranks:
            ranks = ranks + (self.h,)
        if any(b <= a for a, b in zip(ranks, ranks[1:])) or ranks[0] != 0 or ranks[-1] != self.h:
            raise DomainError(f"nest ranks must increase strictly from 0 to {self.h}, got {ranks}")
        object.__setattr__(self, "ranks", ranks)
        W = np.eye(self.h, dtype=complex) if self.basis is None else np.asarray(self.basis, dtype=complex)
        if W.shape != (self.h, self.h) or not np.allclose(W.conj().T @ W, np.eye(self.h), atol=1e-10):
            raise DomainError("nest basis must be a unitary matrix")
        object.__setattr__(self, "basis", W)

    @classmethod
    def from_projections(cls, projections, tol: float = 1e-9) -> "FiniteNest":
        """Canonical form of a chain of projections (0 and I are added if missing)."""
        projs = [np.asarray(p, dtype=complex) for p in projections]
        if not projs:
            raise DomainError("need the dimension; pass at least one projection")
        h = projs[0].shape[0]
        for p in projs:
            if p.shape != (h, h) or not np.allclose(p, p.conj().T, atol=tol) or not np.allclose(p @ p, p, atol=tol):
                raise DomainError("nest members must be orthogonal projections of one size")
        projs = sorted(projs, key=lambda p: round(float(np.trace(p).real)))
        for a in projs:
            for b in projs:
                ra, rb = np.trace(a).real, np.trace(b).real
                small = a if ra <= rb else b
                if not np.allclose(a @ b, small, atol=1e-7):
                    raise DomainError("projections do not form a chain")
        cols, ranks, prev = [], [], np.zeros((h, h), dtype=complex)
        for p in projs + [np.eye(h)]:
            diff = p - prev
            w, v = np.linalg.eigh((diff + diff.conj().T) / 2)
            sel = v[:, w > 0.5]
            if sel.shape[1] == 0:
                continue
            cols.append(sel)
            ranks.append((ranks[-1] if ranks else 0) + sel.shape[1])
            prev = p
        W = np.concatenate(cols, axis=1)
        return cls(h, tuple(ranks), W)

    @property
    def m(self) -> int:
        return len(self.ranks) - 1

    def projection(self, j: int) -> np.ndarray:
        W = self.basis
        r = self.ranks[j]
        return W[:, :r] @ W[:, :r].conj().T

    @property
    def projections(self) -> list:
        return [self.projection(j) for j in range(self.m + 1)]

    def atom(self, j: int) -> slice:
        """Canonical indices of the ``j``-th atom ``N_j - N_{j-1}``, ``j >= 1``."""
        return slice(self.ranks[j - 1], self.ranks[j])

    def reversed(self) -> "FiniteNest":
        """The nest ``{I - N}``; its canonical basis lists the atoms in reverse order."""
        order = np.concatenate([np.arange(self.ranks[j - 1], self.ranks[j]) for j in range(self.m, 0, -1)])
        ranks = tuple(self.h - r for r in reversed(self.ranks))
        return FiniteNest(self.h, ranks, self.basis[:, order])

    def to_canonical(self, X) -> np.ndarray:
        return self.basis.conj().T @ np.asarray(X) @ self.basis

    def from_canonical(self, Xc) -> np.ndarray:
        return self.basis @ np.asarray(Xc) @ self.basis.conj().T

    def lower_part(self, Xc) -> float:
        """Largest entry below the block diagonal in canonical coordinates."""
        worst = 0.0
        for j in range(1, self.m + 1):
            below = np.asarray(Xc)[self.ranks[j]:, self.atom(j)]
            if below.size:
                worst = max(worst, float(np.abs(below).max()))
        return worst

    def random_member(self, rng, contraction: bool = True) -> np.ndarray:
        """Random element of the nest algebra in canonical coordinates."""
        Xc = rng.standard_normal((self.h, self.h)) + 1j * rng.standard_normal((self.h, self.h))
        for j in range(1, self.m + 1):
            Xc[self.ranks[j]:, self.atom(j)] = 0
        if contraction:
            Xc /= np.linalg.norm(Xc, 2) * rng.uniform(1.0, 2.0)
        return Xc

    def to_json(self) -> dict:
        from .serialization import encode_matrix
        return {"h": self.h, "ranks": list(self.ranks), "basis": encode_matrix(self.basis)}


@dataclass(frozen=True, eq=False)
class NestProblem:
    """``B X = C`` with ``X`` in the nest algebra; ``B, C`` map ``C^h`` to ``C^p``."""

    nest: FiniteNest
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        B, C = np.asarray(self.B, dtype=complex), np.asarray(self.C, dtype=complex)
        if B.ndim != 2 or B.shape != C.shape or B.shape[1] != self.nest.h:
            raise DomainError(f"B and C must both be p x {self.nest.h}")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)


@dataclass(frozen=True, eq=False)
class VectorNestProblem:
    """``X u_i = v_i``; the vectors are the columns of ``U`` and ``V``."""

    nest: FiniteNest
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex).reshape(self.nest.h, -1)
        V = np.asarray(self.V, dtype=complex).reshape(self.nest.h, -1)
        if U.shape != V.shape:
            raise DomainError("need as many targets as sources")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)


def vector_to_operator(p: VectorNestProblem) -> NestProblem:
    """``X U = V`` iff ``U^* Y = V^*`` for ``Y = X^*`` in the algebra of the reversed nest."""
    return NestProblem(p.nest.reversed(), p.U.conj().T, p.V.conj().T)


def nest_feasibility(p, tol: float = DEFAULT_TOL) -> dict:
    """Worst nest member for the positivity condition, with its eigenvector."""
    nest = p.nest
    worst = None
    for j in range(nest.m + 1):
        if isinstance(p, VectorNestProblem):
            perp = np.eye(nest.h) - nest.projection(j)
            a, b = perp @ p.U, perp @ p.V
            diff = a.conj().T @ a - b.conj().T @ b
        else:
            Nj = nest.projection(j)
            diff = p.B @ Nj @ p.B.conj().T - p.C @ Nj @ p.C.conj().T
        res = psd_check(diff, tol)
        if worst is None or res["min_eig"] < worst[1]["min_eig"]:
            worst = (j, res)
    j, res = worst
    return {"feasible": bool(res["min_eig"] >= -tol), "worst_N": j,
            "min_eig": res["min_eig"], "vector": res["vector"]}


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _construct(p: NestProblem, tol: float):
    """Column-block construction in canonical coordinates (no feasibility check)."""
    nest = p.nest
    Bc, Cc = p.B @ nest.basis, p.C @ nest.basis
    h = nest.h
    Xc = np.zeros((h, h), dtype=complex)
    decisions = []
    for j in range(1, nest.m + 1):
        r = nest.ranks[j]
        prev = Xc[:r, :nest.ranks[j - 1]]
        root = _psd_sqrt(np.eye(r) - prev @ prev.conj().T)
        P = Bc[:, :r] @ root
        s = np.linalg.svd(P, compute_uv=False) if P.size else np.zeros(0)
        cutoff = tol * (s[0] if s.size else 0.0)
        G = np.linalg.pinv(P, rcond=tol) if P.size else np.zeros((r, 0))
        decisions.append({"atom": j, "rank": int((s > cutoff).sum()) if s.size else 0,
                          "dropped": int((s <= cutoff).sum()) if s.size else 0})
        Xc[:r, nest.atom(j)] = root @ (G @ Cc[:, nest.atom(j)])
    return Xc, decisions


def nest_solve(p, tol: float = DEFAULT_TOL, force: bool = False) -> dict:
    """Contractive solution in the nest algebra, or the failing nest member as a certificate.

    With ``force=True`` the construction runs even on infeasible data and the
    post-conditions show where it breaks.
    """
    feas = nest_feasibility(p, tol)
    if not feas["feasible"] and not force:
        return {"feasible": False, "certificate": feas}
    if isinstance(p, VectorNestProblem):
        op = vector_to_operator(p)
        Yc, decisions = _construct(op, tol)
        # undo the adjoint and the reversed atom order
        order = np.concatenate([np.arange(p.nest.ranks[j - 1], p.nest.ranks[j])
                                for j in range(p.nest.m, 0, -1)])
        Xc = np.zeros_like(Yc)
        Xc[np.ix_(order, order)] = Yc.conj().T
        X = p.nest.from_canonical(Xc)
        residual = float(np.abs(X @ p.U - p.V).max()) if p.U.size else 0.0
    else:
        Xc, decisions = _construct(p, tol)
        X = p.nest.from_canonical(Xc)
        residual = float(np.abs(p.B @ X - p.C).max()) if p.B.size else 0.0
    return {
        "feasible": feas["feasible"],
        "X": X,
        "X_canonical": Xc,
        "residual": residual,
        "norm": float(np.linalg.norm(Xc, 2)) if Xc.size else 0.0,
        "triangularity_defect": p.nest.lower_part(Xc),
        "rank_decisions": decisions,
        "feasibility": feas,
    }


def douglas_solvable(B, C, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``C C^* <= B B^*`` (the trivial-nest case)."""
    B, C = np.asarray(B, dtype=complex), np.asarray(C, dtype=complex)
    return psd_check(B @ B.conj().T - C @ C.conj().T, tol)["psd"]
