"""Consensus solver for the max-min SINR beamforming problem under
per-element power constraints."""

from .backend import HAVE_EXTENSION, resolve_backend
from .solver import SolverError, init_state, reference_iteration, solve
from .state import AdmmState, SolveTrace, SolverOptions
from .updates import (
    project_feasible,
    sca_lower_bound,
    update_F,
    update_Gamma,
    update_Psi,
    update_errors,
    update_eta,
    update_gamma,
    update_lambda,
    update_mu,
    update_theta,
)

__all__ = [
    "AdmmState",
    "HAVE_EXTENSION",
    "SolveTrace",
    "SolverError",
    "SolverOptions",
    "init_state",
    "project_feasible",
    "reference_iteration",
    "resolve_backend",
    "sca_lower_bound",
    "solve",
    "update_F",
    "update_Gamma",
    "update_Psi",
    "update_errors",
    "update_eta",
    "update_gamma",
    "update_lambda",
    "update_mu",
    "update_theta",
]
