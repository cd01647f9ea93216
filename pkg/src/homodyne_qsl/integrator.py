"""Fixed-step classical RK4 for the feedback master equation.

This is the brute-force reference the closed-form propagator is checked
against, and the alternative evolution engine for QSLT windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StepRejected
from .mat2 import ComplexMat2, DensityMatrix, eig_hermitian, hermitize
from .model import ModelParams, lindblad_rhs

DEFAULT_DT = 1e-4
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class Trajectory:
    times: tuple
    states: tuple

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")

    def __len__(self):
        return len(self.times)


def _raw_step(m: ComplexMat2, dt: float, p: ModelParams) -> ComplexMat2:
    k1 = lindblad_rhs(m, p)
    k2 = lindblad_rhs(m + (0.5 * dt) * k1, p)
    k3 = lindblad_rhs(m + (0.5 * dt) * k2, p)
    k4 = lindblad_rhs(m + dt * k3, p)
    return hermitize(m + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4))


def _checked(m: ComplexMat2, t: float) -> ComplexMat2:
    low = eig_hermitian(m)[1]
    if low < -POSITIVITY_TOL:
        raise StepRejected(f"RK4 step produced eigenvalue {low:.3e} at t={t!r}; reduce dt", t)
    return m


def rk4_step(rho: DensityMatrix, dt: float, p: ModelParams) -> DensityMatrix:
    """One classical RK4 step, re-Hermitized."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    out = _checked(_raw_step(rho.mat, dt, p), dt)
    return DensityMatrix.trusted(out)


def _step_grid(t0: float, t_final: float, dt: float):
    """Step end points: full steps of dt, last step shortened onto t_final."""
    span = t_final - t0
    n_full = int(math.floor(span / dt))
    # drop a trailing sliver that is only rounding noise
    if span - n_full * dt <= 1e-12 * max(1.0, abs(t_final)):
        ends = [t0 + k * dt for k in range(1, n_full)] + ([t_final] if n_full else [])
    else:
        ends = [t0 + k * dt for k in range(1, n_full + 1)] + [t_final]
    return ends


def iter_states(rho0: DensityMatrix, t_final: float, dt: float, p: ModelParams, t0: float = 0.0):
    """Yield (t, ComplexMat2) at t0 and after every accepted step.

    Nothing is retained, so long horizons run in constant memory.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    if t_final < t0:
        raise DomainError(f"t_final={t_final!r} precedes t0={t0!r}")
    m = rho0.mat
    t = t0
    yield t, m
    for t_next in _step_grid(t0, t_final, dt):
        m = _checked(_raw_step(m, t_next - t, p), t_next)
        t = t_next
        yield t, m


def integrate(rho0: DensityMatrix, t_final: float, dt: float, p: ModelParams, t0: float = 0.0) -> Trajectory:
    """Dense trajectory from t0 to t_final."""
    times, states = [], []
    for t, m in iter_states(rho0, t_final, dt, p, t0):
        times.append(t)
        states.append(DensityMatrix.trusted(m))
    return Trajectory(tuple(times), tuple(states))


def evolve_to(rho0: DensityMatrix, t: float, dt: float, p: ModelParams) -> DensityMatrix:
    m = rho0.mat
    for _, m in iter_states(rho0, t, dt, p):
        pass
    return DensityMatrix.trusted(m)


def sample(rho0: DensityMatrix, times, dt: float, p: ModelParams, t0: float = 0.0) -> ComplexMat2:
    """States at the given non-decreasing times, as one batched matrix.

    Each gap between consecutive sample times is split into the fewest equal
    substeps no longer than `dt`, so every sample is hit exactly.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    times = np.asarray(times, dtype=float)
    if times.size and (times[0] < t0 or np.any(np.diff(times) < 0)):
        raise DomainError("sample times must be non-decreasing and not before t0")
    m = rho0.mat
    t = t0
    out = []
    for target in times:
        gap = target - t
        if gap > 0:
            n = max(1, math.ceil(gap / dt - 1e-9))
            h = gap / n
            for k in range(1, n + 1):
                m = _raw_step(m, h, p)
            _checked(m, float(target))
        t = target
        out.append(m)
    return ComplexMat2.stack(out)
