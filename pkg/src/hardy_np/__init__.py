"""Finite-dimensional quiver models of tensor and Hardy algebras.

Point evaluation on the dual ball, Pick-type interpolation, transfer-function
realization and nest-algebra interpolation.
"""
from .algebra import (AlgebraElement, BlockAlgebra, CommutantElement, ModuleLayout, Representation,
                      commutant_basis, intertwiner_space, psd_check, represent)
from .correspondence import (FockTruncation, Path, QuiverCorrespondence, TensorElement, creation_map,
                             creation_matrix, inner_product, left_action, right_action, tensor, tensor_power)
from .dual import (DualCorrespondence, DualElement, double_dual_check, dual_basis, dual_inner,
                   evaluation_unitary, tensor_swap_check)
from .estimators import ColligationRealizer, NestInterpolator, NevanlinnaPickInterpolator
from .exceptions import DomainError, NumericalError, UnsupportedError
from .hardy import HardyPolynomial, commutant_check, evaluate, evaluate_via_fock, norm_estimate
from .nest import FiniteNest, NestProblem, VectorNestProblem, douglas_solvable, nest_feasibility, nest_solve
from .pick import (CommutantMap, PickSystem, SchurInterpolant, cp_test, neumann_resolvent, np_feasibility,
                   pick_matrix, resolvent, schwartz_check, solve_np_scalar, theta)
from .realization import (Colligation, SampledFunction, cpd_kernel, cpd_test, minimal_aux, random_colligation,
                          synthesize_colligation, transfer_eval)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "BlockAlgebra",
    "Colligation",
    "ColligationRealizer",
    "CommutantElement",
    "CommutantMap",
    "DomainError",
    "DualCorrespondence",
    "DualElement",
    "FiniteNest",
    "FockTruncation",
    "HardyPolynomial",
    "ModuleLayout",
    "NestInterpolator",
    "NestProblem",
    "NevanlinnaPickInterpolator",
    "NumericalError",
    "Path",
    "PickSystem",
    "QuiverCorrespondence",
    "Representation",
    "SampledFunction",
    "SchurInterpolant",
    "TensorElement",
    "UnsupportedError",
    "VectorNestProblem",
    "commutant_basis",
    "commutant_check",
    "cp_test",
    "cpd_kernel",
    "cpd_test",
    "creation_map",
    "creation_matrix",
    "double_dual_check",
    "douglas_solvable",
    "dual_basis",
    "dual_inner",
    "evaluate",
    "evaluate_via_fock",
    "evaluation_unitary",
    "inner_product",
    "intertwiner_space",
    "left_action",
    "minimal_aux",
    "nest_feasibility",
    "nest_solve",
    "neumann_resolvent",
    "norm_estimate",
    "np_feasibility",
    "pick_matrix",
    "psd_check",
    "random_colligation",
    "represent",
    "resolvent",
    "right_action",
    "schwartz_check",
    "solve_np_scalar",
    "synthesize_colligation",
    "tensor",
    "tensor_power",
    "tensor_swap_check",
    "theta",
    "transfer_eval",
]
