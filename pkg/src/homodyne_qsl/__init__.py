"""Quantum speed limit times for a two-level atom under homodyne feedback."""

from .errors import (
    DegenerateModel,
    DomainError,
    NonHermitianInput,
    PositivityViolation,
    QsltError,
    QuadratureUnderflow,
    StepRejected,
    UnknownPreset,
)
from .integrator import Trajectory, integrate, rk4_step
from .mat2 import ComplexMat2, DensityMatrix, eig_hermitian, singular_values
from .model import ModelParams, effective_hamiltonian, feedback_hamiltonian, jump_operator, lindblad_rhs
from .propagator import PropagatorCoeffs, coefficients, evolve_analytic, initial_state
from .qslt import (
    QsltResult,
    closed_system_qslt,
    generator_spectrum_terms,
    qslt_open,
    relative_purity,
    window_average,
)
from .sweep import SweepConfig, resolve_preset, run_sweep

__version__ = "0.1.0"
