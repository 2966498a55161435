"""Free holomorphic functions on the noncommutative unit ball, numerically."""
from .calculus import (
    OperatorTuple,
    beta_U_series,
    beta_U_tuple,
    cp_iterate,
    evaluate,
    hinf_norm,
    hp_norm,
    joint_spectral_radius,
    metric_rho,
    reconstruction_operator,
    row_norm,
)
from .certify import boundary_norm_bounds
from .derivations import oracle_partial, partial, partial_k
from .fock import TruncatedFock, assemble, left_creation, op_norm, right_creation
from .series import FreeSeries, Tail, add, adjoint, block_norms, dilate, multiply, radius_estimate

__all__ = [
    "FreeSeries", "Tail", "add", "adjoint", "block_norms", "dilate", "multiply", "radius_estimate",
    "TruncatedFock", "assemble", "left_creation", "right_creation", "op_norm",
    "OperatorTuple", "beta_U_series", "beta_U_tuple", "cp_iterate", "evaluate", "hinf_norm", "hp_norm",
    "joint_spectral_radius", "metric_rho", "reconstruction_operator", "row_norm",
    "boundary_norm_bounds", "oracle_partial", "partial", "partial_k",
]
