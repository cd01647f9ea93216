"""Quantum speed limit times from relative purity.

For a window [tau, tau + tau_d] the open-system bounds are

    bound_ml = |f - 1| tr(rho_tau^2) / <sum_i s_i r_i>
    bound_mt = |f - 1| tr(rho_tau^2) / <sqrt(sum_i s_i^2)>

with f the relative purity between the window's end points, s_i the
singular values of L(rho_t), r_i those of rho_tau, and <.> the time average
over the window. The combined bound is the larger of the two.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, QuadratureUnderflow
from .integrator import DEFAULT_DT, sample
from .mat2 import ComplexMat2, DensityMatrix, singular_values
from .model import ModelParams, lindblad_rhs
from .propagator import ORACLE_VALIDATED, apply_map, coefficients, initial_state

ENGINES = ("analytic", "oracle")
DEFAULT_QUAD_STEPS = 2000


@dataclass(frozen=True)
class QsltResult:
    tau: float
    tau_d: float
    rel_purity: float
    ml_denominator: float
    mt_denominator: float
    bound_ml: float
    bound_mt: float
    tau_qsl: float

    def as_dict(self):
        return asdict(self)


def closed_system_qslt(delta_e: float, mean_e: float) -> float:
    """max(pi / (2 dE), pi / (2 E)) with hbar = 1."""
    if not (delta_e > 0 and mean_e > 0):
        raise DomainError("energy spread and mean energy must both be positive")
    return max(math.pi / (2 * delta_e), math.pi / (2 * mean_e))


def _real_trace_of_product(a: ComplexMat2, b: ComplexMat2) -> float:
    tr = a.m00 * b.m00 + a.m01 * b.m10 + a.m10 * b.m01 + a.m11 * b.m11
    if abs(tr.imag) >= 1e-12:
        raise AssertionError(f"trace of product has imaginary part {tr.imag:.3e}")
    return tr.real


def relative_purity(rho_tau: DensityMatrix, rho_target: DensityMatrix) -> float:
    """tr(rho_tau rho_target) / tr(rho_tau^2)."""
    a = rho_tau.mat
    return _real_trace_of_product(a, rho_target.mat) / _real_trace_of_product(a, a)


def _spectrum_terms(l_mat: ComplexMat2, rho_sv):
    s1, s2 = singular_values(l_mat)
    r1, r2 = rho_sv
    return s1 * r1 + s2 * r2, np.sqrt(s1 * s1 + s2 * s2)


def generator_spectrum_terms(rho_t, rho_tau: DensityMatrix, p: ModelParams):
    """(sum_i s_i r_i, sqrt(sum_i s_i^2)), both spectra paired in descending order.

    `rho_t` may be batched, in which case both terms come back as arrays.
    """
    m = rho_t.mat if isinstance(rho_t, DensityMatrix) else rho_t
    return _spectrum_terms(lindblad_rhs(m, p), singular_values(rho_tau.mat))


def window_average(integrand, tau: float, tau_d: float, n_steps: int = DEFAULT_QUAD_STEPS) -> float:
    """(1/tau_d) * integral of `integrand` over [tau, tau + tau_d].

    Composite trapezoid rule on `n_steps` uniform panels. `integrand` is
    called once with the array of n_steps + 1 node times and must return
    matching values (a scalar is broadcast).
    """
    if not tau_d > 0:
        raise DomainError(f"driving time must be positive, got {tau_d!r}")
    if int(n_steps) != n_steps or n_steps < 2:
        raise DomainError(f"n_steps must be an integer >= 2, got {n_steps!r}")
    n_steps = int(n_steps)
    nodes = window_nodes(tau, tau_d, n_steps)
    values = np.broadcast_to(np.asarray(integrand(nodes), dtype=float), nodes.shape)
    return _trapezoid_mean(values)


def window_nodes(tau: float, tau_d: float, n_steps: int) -> np.ndarray:
    return tau + tau_d * (np.arange(n_steps + 1) / n_steps)


def _trapezoid_mean(values: np.ndarray) -> float:
    n = values.size - 1
    return float((math.fsum(values[1:-1]) + 0.5 * (values[0] + values[-1])) / n)


def window_states(
    p: ModelParams,
    tau: float,
    tau_d: float,
    n_steps: int = DEFAULT_QUAD_STEPS,
    *,
    engine: str = "analytic",
    coeff_mode: str = ORACLE_VALIDATED,
    oracle_dt: float = DEFAULT_DT,
) -> ComplexMat2:
    """Batched states at the n_steps + 1 quadrature nodes of the window."""
    if engine not in ENGINES:
        raise DomainError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    rho0 = initial_state(p.theta, p.chi)
    nodes = window_nodes(tau, tau_d, n_steps)
    if engine == "analytic":
        return apply_map(rho0, coefficients(nodes, p, coeff_mode))
    return sample(rho0, nodes, oracle_dt, p)


def qslt_open(
    p: ModelParams,
    tau: float,
    tau_d: float,
    n_steps: int = DEFAULT_QUAD_STEPS,
    *,
    engine: str = "analytic",
    coeff_mode: str = ORACLE_VALIDATED,
    oracle_dt: float = DEFAULT_DT,
) -> QsltResult:
    """ML, MT and combined speed-limit bounds for the window [tau, tau + tau_d]."""
    if not (math.isfinite(tau) and tau >= 0):
        raise DomainError(f"tau must be finite and non-negative, got {tau!r}")
    if not (math.isfinite(tau_d) and tau_d > 0):
        raise DomainError(f"driving time must be positive, got {tau_d!r}")
    if int(n_steps) != n_steps or n_steps < 2:
        raise DomainError(f"n_steps must be an integer >= 2, got {n_steps!r}")
    n_steps = int(n_steps)

    states = window_states(
        p, tau, tau_d, n_steps, engine=engine, coeff_mode=coeff_mode, oracle_dt=oracle_dt
    )
    rho_tau = DensityMatrix(states[0], positivity_tol=1e-9)
    rho_end = DensityMatrix(states[-1], positivity_tol=1e-9)
    purity = _real_trace_of_product(rho_tau.mat, rho_tau.mat)
    f = relative_purity(rho_tau, rho_end)
    numerator = abs(f - 1.0) * purity

    ml_terms, mt_terms = generator_spectrum_terms(states, rho_tau, p)
    ml_avg = _trapezoid_mean(np.asarray(ml_terms, dtype=float))
    mt_avg = _trapezoid_mean(np.asarray(mt_terms, dtype=float))

    if ml_avg < 1e-300 or mt_avg < 1e-300:
        if abs(f - 1.0) > 1e-12:
            raise QuadratureUnderflow(
                f"window averages vanish (ml={ml_avg:.3e}, mt={mt_avg:.3e}) but |f - 1| = {abs(f - 1):.3e}"
            )
        # stationary window: nothing evolved, no time needed
        bound_ml = bound_mt = 0.0
    else:
        bound_ml = numerator / ml_avg
        bound_mt = numerator / mt_avg
    return QsltResult(
        tau=float(tau),
        tau_d=float(tau_d),
        rel_purity=float(f),
        ml_denominator=ml_avg,
        mt_denominator=mt_avg,
        bound_ml=float(bound_ml),
        bound_mt=float(bound_mt),
        tau_qsl=float(max(bound_ml, bound_mt)),
    )
