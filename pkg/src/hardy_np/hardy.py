"""Polynomial elements of the Hardy algebra and their point evaluations.

A polynomial is ``phi_infinity(xi_0) + T_{xi_1} + ... + T_{xi_d}`` with
``xi_k`` in ``E^(x)k``.  Its value at the point ``eta^*`` of the dual ball is
computed two ways: from the generators (``evaluate``) and from the Fock-space
formula that compresses ``X (x) I`` through the unitary identifying
``F(E^sigma) (x)_iota H`` with ``F(E) (x)_sigma H`` (``evaluate_via_fock``).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import AlgebraElement, Representation
from .correspondence import (
    FockTruncation,
    QuiverCorrespondence,
    TensorElement,
    creation_map,
    creation_matrix,
    tensor,
    tensor_power,
)
from .dual import DualCorrespondence, DualElement, ampliate, fock_unitary_level
from .exceptions import DomainError


@dataclass(frozen=True, eq=False)
class HardyPolynomial:
    """Finite sum of homogeneous parts; ``norm_bound`` is a certified upper bound on ``||X||`` or ``None``."""

    base: QuiverCorrespondence
    coeffs: dict = field(default_factory=dict)
    norm_bound: float = None

    def __post_init__(self):
        clean = {}
        for k, xi in dict(self.coeffs).items():
            if isinstance(xi, AlgebraElement):
                xi = self.base.from_algebra(xi)
            if not isinstance(xi, TensorElement) or xi.base != self.base or xi.degree != k:
                raise DomainError(f"coefficient of degree {k} is not an element of E^(x){k}")
            clean[int(k)] = xi
        object.__setattr__(self, "coeffs", clean)

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, base, a: AlgebraElement) -> "HardyPolynomial":
        return cls(base, {0: a}, a.norm())

    @classmethod
    def identity(cls, base) -> "HardyPolynomial":
        return cls.constant(base, base.owner.identity())

    @classmethod
    def zero(cls, base) -> "HardyPolynomial":
        return cls(base, {}, 0.0)

    @classmethod
    def creation(cls, xi: TensorElement) -> "HardyPolynomial":
        """``T_xi``; certified since ``||T_xi|| = ||<xi, xi>||^{1/2}``."""
        return cls(xi.base, {xi.degree: xi}, xi.norm())

    # -- algebra -----------------------------------------------------------
    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def coefficient(self, k: int) -> TensorElement:
        return self.coeffs.get(k, self.base.zero(k))

    def _check(self, other):
        if not isinstance(other, HardyPolynomial) or other.base != self.base:
            raise DomainError("Hardy polynomials over different correspondences")

    @staticmethod
    def _bound(*vals, op):
        return None if any(v is None for v in vals) else op(*vals)

    def __add__(self, other):
        self._check(other)
        coeffs = dict(self.coeffs)
        for k, xi in other.coeffs.items():
            coeffs[k] = coeffs[k] + xi if k in coeffs else xi
        return HardyPolynomial(self.base, coeffs, self._bound(self.norm_bound, other.norm_bound, op=lambda a, b: a + b))

    def __mul__(self, c):
        if isinstance(c, HardyPolynomial):
            return self @ c
        bound = None if self.norm_bound is None else abs(c) * self.norm_bound
        return HardyPolynomial(self.base, {k: xi * c for k, xi in self.coeffs.items()}, bound)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        self._check(other)
        coeffs = {}
        for k, xi in self.coeffs.items():
            for j, eta in other.coeffs.items():
                t = tensor(xi, eta)
                coeffs[k + j] = coeffs[k + j] + t if k + j in coeffs else t
        return HardyPolynomial(self.base, coeffs, self._bound(self.norm_bound, other.norm_bound, op=lambda a, b: a * b))

    def scaled_to_ball(self) -> "HardyPolynomial":
        """Rescale so the certified bound is at most one."""
        if self.norm_bound is None:
            raise DomainError("no certified norm bound to rescale with")
        if self.norm_bound <= 1:
            return self
        return self * (1.0 / self.norm_bound)

    # -- operators ---------------------------------------------------------
    def operator(self, fock: FockTruncation) -> np.ndarray:
        """``X (x) I`` compressed to the truncated Fock space."""
        if fock.base != self.base:
            raise DomainError("Fock space over a different correspondence")
        out = np.zeros((fock.dim, fock.dim), dtype=complex)
        for xi in self.coeffs.values():
            if xi.degree <= fock.depth:
                out += creation_matrix(xi, fock)
        return out

    def to_json(self) -> dict:
        from .serialization import encode_polynomial
        return encode_polynomial(self)


def _check_point(X: HardyPolynomial, eta: DualElement):
    if eta.base != X.base:
        raise DomainError("point and polynomial are over different correspondences")
    eta.require_open_ball()


def evaluate(X: HardyPolynomial, eta: DualElement) -> np.ndarray:
    """``X(eta^*) = sigma(xi_0) + sum_k (eta^*)^(k) L_{xi_k}`` on ``H``."""
    _check_point(X, eta)
    sigma = eta.representation
    out = np.zeros((sigma.dim, sigma.dim), dtype=complex)
    amps = {}
    for k, xi in X.coeffs.items():
        if k == 0:
            out += sigma(xi.as_algebra_element())
            continue
        acc = creation_map(xi, sigma)
        for j in range(k - 1, -1, -1):
            if j not in amps:
                amps[j] = ampliate(eta, j).conj().T
            acc = amps[j] @ acc
        out += acc
    return out


def fock_unitary(dual: DualCorrespondence, depth: int) -> np.ndarray:
    """Block-diagonal ``U`` on levels ``0..depth``."""
    return scipy.linalg.block_diag(*[fock_unitary_level(dual, k) for k in range(depth + 1)])


def evaluate_via_fock(X: HardyPolynomial, eta: DualElement, depth: int = None) -> np.ndarray:
    """``X(eta^*) = sum_k L_{eta^(x)k}^* P_k U^* (X (x) I) U iota_H`` truncated at ``depth``."""
    _check_point(X, eta)
    sigma = eta.representation
    depth = X.degree if depth is None else depth
    if depth < X.degree:
        warnings.warn(f"depth {depth} below degree {X.degree}: terms above the cut are dropped",
                      RuntimeWarning, stacklevel=2)
    dual = DualCorrespondence(X.base, sigma)
    fock_e = FockTruncation(X.base, depth, sigma)
    fock_d = FockTruncation(dual.quiver, depth, dual.identity_representation)
    U = fock_unitary(dual, depth)
    inner = U.conj().T @ X.operator(fock_e) @ U @ fock_d.vacuum_embedding()
    t = dual.to_tensor(eta)
    out = np.zeros((sigma.dim, sigma.dim), dtype=complex)
    for k in range(depth + 1):
        L = creation_map(tensor_power(t, k), dual.identity_representation)
        out += L.conj().T @ inner[fock_d.level_slice(k)]
    P = dual.swap
    return P.T @ out @ P


def norm_estimate(X: HardyPolynomial, depth: int, sigma: Representation) -> float:
    """Norm of the compression of ``X (x) I`` to levels ``<= depth``; a lower bound on ``||X||``."""
    sigma.require_faithful()
    op = X.operator(FockTruncation(X.base, depth, sigma))
    return float(np.linalg.norm(op, 2)) if op.size else 0.0


def commutant_check(X: HardyPolynomial, Y: HardyPolynomial, depth: int, sigma: Representation) -> float:
    """``||P K P||`` with ``K = [X (x) I, U (Y (x) I) U^*]`` and ``P`` the levels below the boundary."""
    dual = DualCorrespondence(X.base, sigma)
    if Y.base != dual.quiver:
        raise DomainError("second polynomial must live over the dual correspondence")
    low = depth - X.degree - Y.degree
    if low < 0:
        raise DomainError(f"depth {depth} too small for degrees {X.degree} and {Y.degree}")
    fock_e = FockTruncation(X.base, depth, sigma)
    fock_d = FockTruncation(dual.quiver, depth, dual.identity_representation)
    U = fock_unitary(dual, depth)
    A = X.operator(fock_e)
    B = U @ Y.operator(fock_d) @ U.conj().T
    K = A @ B - B @ A
    stop = fock_e.level_slice(low).stop
    return float(np.linalg.norm(K[:stop, :stop], 2)) if stop else 0.0
