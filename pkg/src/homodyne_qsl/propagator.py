"""Closed-form evolution of the feedback-controlled qubit.

The populations and coherences evolve under the linear map

    rho00(t) = mu rho00(0) + nu rho11(0)
    rho11(t) = (1 - mu) rho00(0) + (1 - nu) rho11(0)
    rho01(t) = xi rho01(0) + eta rho10(0)
    rho10(t) = eta* rho01(0) + xi* rho10(0)

Two variants of xi are available. ``paper-literal`` uses the prefactor
2 lambda sin(alpha) in front of the sinh term as originally published;
``oracle-validated`` uses 2 (omega + lambda sin(alpha)), which is what the
master equation actually integrates to (it reproduces the free precession
exp(-i omega t - gamma t / 2) at lambda = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModel, DomainError, PositivityViolation
from .mat2 import ComplexMat2, DensityMatrix, eig_hermitian
from .model import ModelParams

PAPER_LITERAL = "paper-literal"
ORACLE_VALIDATED = "oracle-validated"
COEFF_MODES = (PAPER_LITERAL, ORACLE_VALIDATED)

POSITIVITY_TOL = 1e-9
_TAYLOR_CUTOFF = 1e-6


@dataclass(frozen=True)
class PropagatorCoeffs:
    mu: float
    nu: float
    xi: complex
    eta: complex
    big_gamma: float
    big_delta: complex


def initial_state(theta: float, chi: float) -> DensityMatrix:
    """|psi><psi| for |psi> = cos(theta)|0> + exp(i chi) sin(theta)|1>."""
    if not (0.0 <= theta <= math.pi / 2 + 1e-12):
        raise DomainError(f"theta={theta!r} outside [0, pi/2]")
    if not (0.0 <= chi <= math.pi + 1e-12):
        raise DomainError(f"chi={chi!r} outside [0, pi]")
    a = math.cos(theta)
    b = complex(math.cos(chi), math.sin(chi)) * math.sin(theta)
    return DensityMatrix(ComplexMat2(complex(a * a), a * b.conjugate(), a * b, complex(abs(b) ** 2)))


def decay_rate(p: ModelParams) -> float:
    """Gamma = 2 lambda^2 + 2 lambda sqrt(gamma) cos(alpha) + gamma."""
    lam = p.lambda_fb
    return 2 * lam**2 + 2 * lam * math.sqrt(p.gamma) * math.cos(p.alpha) + p.gamma


def discriminant(p: ModelParams) -> complex:
    """Delta on the principal branch of the complex square root."""
    lam, sg = p.lambda_fb, math.sqrt(p.gamma)
    radicand = lam**2 * (lam**2 + 2 * lam * sg * math.cos(p.alpha) + p.gamma) - (
        p.omega + lam * math.sin(p.alpha)
    ) ** 2
    return 2 * np.sqrt(complex(radicand))


def _sinh_over_delta(delta, t):
    """sinh(delta t / 2) / delta, with the delta -> 0 limit handled by Taylor."""
    small = np.abs(delta) * t < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, delta)
    direct = np.sinh(0.5 * delta * t) / safe
    series = 0.5 * t + delta**2 * t**3 / 48.0
    return np.where(small, series, direct)


def _coefficients(t, p: ModelParams, mode: str, delta: complex):
    big_gamma = decay_rate(p)
    lam, sg = p.lambda_fb, math.sqrt(p.gamma)
    decay = np.exp(-big_gamma * t)
    mu = (lam**2 + (lam**2 + 2 * lam * sg * math.cos(p.alpha) + p.gamma) * decay) / big_gamma
    nu = lam**2 * (1.0 - decay) / big_gamma

    if mode == ORACLE_VALIDATED:
        precession = p.omega + lam * math.sin(p.alpha)
    else:
        precession = lam * math.sin(p.alpha)
    half = np.exp(-0.5 * big_gamma * t)
    s = _sinh_over_delta(delta, t)
    xi = half * (np.cosh(0.5 * delta * t) - 2j * precession * s)
    e_ia = complex(math.cos(p.alpha), math.sin(p.alpha))
    eta = -2 * lam * e_ia * (sg + lam * e_ia) * half * s
    # exact identity map at t = 0
    at_zero = t == 0
    mu = np.where(at_zero, 1.0, mu)
    nu = np.where(at_zero, 0.0, nu)
    xi = np.where(at_zero, 1.0 + 0j, xi)
    eta = np.where(at_zero, 0j, eta)
    return mu, nu, xi, eta, big_gamma


def coefficients(t, p: ModelParams, mode: str = ORACLE_VALIDATED, *, check_branch: bool = False):
    """Coefficients (mu, nu, xi, eta) of the analytic map at time(s) `t`.

    `t` may be a scalar or an array; array input gives array-valued fields.
    With `check_branch` the coefficients are recomputed with -Delta and
    compared, which must agree because only even functions of Delta enter.
    """
    if mode not in COEFF_MODES:
        raise DomainError(f"unknown coefficient mode {mode!r}; expected one of {COEFF_MODES}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError("time must be finite and non-negative")
    big_gamma = decay_rate(p)
    if big_gamma == 0.0:
        raise DegenerateModel("Gamma = 0 (gamma = 0 and lambda = 0): analytic coefficients undefined")
    delta = discriminant(p)
    mu, nu, xi, eta, big_gamma = _coefficients(t_arr, p, mode, delta)
    if check_branch:
        alt = _coefficients(t_arr, p, mode, -delta)
        for a, b in zip((mu, nu, xi, eta), alt[:4]):
            if not np.allclose(a, b, rtol=1e-12, atol=1e-14):
                raise AssertionError("analytic coefficients depend on the branch of Delta")
    if t_arr.ndim == 0:
        return PropagatorCoeffs(float(mu), float(nu), complex(xi), complex(eta), big_gamma, complex(delta))
    return PropagatorCoeffs(mu, nu, xi, eta, big_gamma, complex(delta))


def apply_map(rho0, c: PropagatorCoeffs) -> ComplexMat2:
    """Apply the coefficient map to rho0 without any validation."""
    m = rho0.mat if isinstance(rho0, DensityMatrix) else rho0
    r00 = c.mu * m.m00 + c.nu * m.m11
    r11 = (1 - c.mu) * m.m00 + (1 - c.nu) * m.m11
    r01 = c.xi * m.m01 + c.eta * m.m10
    r10 = np.conj(c.eta) * m.m01 + np.conj(c.xi) * m.m10
    return ComplexMat2(r00, r01, r10, r11)


def evolve_analytic(rho0: DensityMatrix, t, p: ModelParams, mode: str = ORACLE_VALIDATED) -> DensityMatrix:
    """Evolve rho0 to time(s) t with the closed-form map.

    An array of times yields a batched DensityMatrix. Raises
    PositivityViolation if any output eigenvalue falls below -1e-9.
    """
    if np.ndim(t) == 0 and t == 0:
        return rho0
    out = apply_map(rho0, coefficients(t, p, mode))
    low = np.min(eig_hermitian(out)[1])
    if low < -POSITIVITY_TOL:
        raise PositivityViolation(f"analytic state has eigenvalue {low:.3e} ({mode} mode)")
    return DensityMatrix(out, positivity_tol=POSITIVITY_TOL)
