"""Numerical propagation and asymptotic transition probabilities."""

from src.propagator.config import AsymptoticBasis, PropagationConfig
from src.propagator.convergence import (
    ConvergenceTable,
    HorizonStudy,
    basis_position,
    cutoff_convergence,
    horizon_extrapolation,
)
from src.propagator.integrator import (
    TransitionMatrix,
    asymptotic_states,
    propagate,
    transition_matrix,
    transition_rows,
)

__all__ = [
    "AsymptoticBasis",
    "ConvergenceTable",
    "HorizonStudy",
    "PropagationConfig",
    "TransitionMatrix",
    "asymptotic_states",
    "basis_position",
    "cutoff_convergence",
    "horizon_extrapolation",
    "propagate",
    "transition_matrix",
    "transition_rows",
]
