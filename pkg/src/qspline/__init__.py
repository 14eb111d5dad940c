"""Quantum cubic spline interpolation on a dense statevector simulator.

Submodules
----------
statevector   states, operators, controlled application, measurement
stateprep     amplitude encoding, LCU, flat and magnitude-binned preparation
qpe           phase estimation and its outcome statistics
estimation    amplitude estimation and swap-test inner products
hhl           HHL linear-system solver
spline        classical cubic splines (three boundary types)
conditioning  singular-value bounds for spline systems
pipeline      quantum fit and evaluation of a spline
"""
from .errors import (
    BoundInapplicableError,
    BoundViolation,
    DegeneratePostselectionError,
    DomainError,
    IllConditionedError,
    InputError,
    QSplineError,
    ResourceError,
    SolverError,
)
from .statevector import Operator, Statevector
from .spline import SplineDataset, clamped, natural, periodic
from .pipeline import PipelineConfig, QuantumFit, compare_report, quantum_evaluate, quantum_fit

__version__ = "0.1.0"

__all__ = [
    "BoundInapplicableError",
    "BoundViolation",
    "DegeneratePostselectionError",
    "DomainError",
    "IllConditionedError",
    "InputError",
    "QSplineError",
    "ResourceError",
    "SolverError",
    "Operator",
    "Statevector",
    "SplineDataset",
    "clamped",
    "natural",
    "periodic",
    "PipelineConfig",
    "QuantumFit",
    "compare_report",
    "quantum_evaluate",
    "quantum_fit",
]
