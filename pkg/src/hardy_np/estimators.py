"""Fit/predict wrappers over the solvers.

Interpolation has no loss to minimize, so ``fit`` solves the interpolation
problem exactly (or raises with the infeasibility certificate) and
``predict`` evaluates the solution.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_complex_vector
from .exceptions import DomainError
from .nest import FiniteNest, NestProblem, VectorNestProblem, nest_solve
from .pick import solve_np_scalar
from .realization import SampledFunction, synthesize_colligation, transfer_eval


class InfeasibleError(DomainError):
    def __init__(self, message, certificate):
        super().__init__(message)
        self.certificate = certificate


class NevanlinnaPickInterpolator(BaseEstimator):
    """Schur-class function on the disc with ``f(z_i) = w_i``."""

    def __init__(self, tol: float = 1e-9, boundary: float = 1e-7):
        self.tol = tol
        self.boundary = boundary

    def fit(self, z, w):
        z, w = as_complex_vector(z, "z"), as_complex_vector(w, "w")
        res = solve_np_scalar(z, w, self.tol, self.boundary)
        if not res["feasible"]:
            raise InfeasibleError("Pick matrix is not positive semidefinite", res["certificate"])
        self.interpolant_ = res["f"]
        self.min_eig_ = res["min_eig"]
        self.interpolation_error_ = res["interpolation_error"]
        return self

    def predict(self, z):
        check_is_fitted(self)
        return self.interpolant_(as_complex_vector(z, "z"))


class ColligationRealizer(BaseEstimator):
    """Transfer-function realization of sampled values at dual points."""

    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def fit(self, points, values):
        samples = SampledFunction(tuple(points), tuple(np.asarray(v, dtype=complex) for v in values))
        self.colligation_ = synthesize_colligation(samples, self.tol)
        return self

    def predict(self, points):
        check_is_fitted(self)
        return [transfer_eval(self.colligation_, p) for p in points]


class NestInterpolator(BaseEstimator):
    """Contraction ``X`` in a nest algebra with ``B X = C`` (or ``X u_i = v_i`` when ``vector``)."""

    def __init__(self, nest: FiniteNest = None, tol: float = 1e-9, vector: bool = False):
        self.nest = nest
        self.tol = tol
        self.vector = vector

    def fit(self, B, C):
        if self.nest is None:
            raise DomainError("a nest is required")
        cls = VectorNestProblem if self.vector else NestProblem
        res = nest_solve(cls(self.nest, B, C), self.tol)
        if not res["feasible"]:
            raise InfeasibleError("nest condition fails", res["certificate"])
        self.X_ = res["X"]
        self.report_ = {k: v for k, v in res.items() if k not in ("X", "X_canonical")}
        return self

    def predict(self, U):
        """``X U``."""
        check_is_fitted(self)
        return self.X_ @ np.asarray(U, dtype=complex)
