"""Impulse perturbation of the infinite-well ground state, computed along
quantum Hamilton-Jacobi trajectories and in the Copenhagen representation."""

from .errors import ConvergenceError, DegeneracyError, DomainError, NumericalError, ValidationError, WindowError
from .model import ImpulseSpec, Microstate, WellModel, make_microstate, make_well
from .eigenpair import EigenPairContext, make_context
from .kinematics import Direction, ParticleSnapshot, TrajectoryClock, locate_particle, revert_position
from .perturbation import E1Case, Variant, copenhagen_e1, trajectory_e1, trajectory_e1_case
from .ensemble import EnsembleReport, EnsembleSpec, FixedSource, RandomSetSource, SamplerParams, run_ensemble

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "DegeneracyError", "DomainError", "NumericalError", "ValidationError", "WindowError",
    "ImpulseSpec", "Microstate", "WellModel", "make_microstate", "make_well",
    "EigenPairContext", "make_context",
    "Direction", "ParticleSnapshot", "TrajectoryClock", "locate_particle", "revert_position",
    "E1Case", "Variant", "copenhagen_e1", "trajectory_e1", "trajectory_e1_case",
    "EnsembleReport", "EnsembleSpec", "FixedSource", "RandomSetSource", "SamplerParams", "run_ensemble",
]
