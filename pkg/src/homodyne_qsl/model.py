"""Two-level atom with homodyne feedback: parameters, operators, generator.

Conventions: basis (|0>, |1>) with |0> the excited state, sigma_z = diag(1, -1),
sigma_minus = |1><0|, hbar = 1. The dissipator is the standard Lindblad form
D[c]rho = c rho c^dagger - (c^dagger c rho + rho c^dagger c) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

from .errors import DomainError
from .mat2 import ComplexMat2, DensityMatrix

SIGMA_X = ComplexMat2(0j, 1 + 0j, 1 + 0j, 0j)
SIGMA_Y = ComplexMat2(0j, -1j, 1j, 0j)
SIGMA_Z = ComplexMat2(1 + 0j, 0j, 0j, -1 + 0j)
SIGMA_MINUS = ComplexMat2(0j, 0j, 1 + 0j, 0j)
SIGMA_PLUS = SIGMA_MINUS.adjoint()

# slack for angles that arrive as rounded multiples of pi
_ANGLE_SLACK = 1e-12


def _check_angle(name, value, lo, hi):
    if not math.isfinite(value) or value < lo - _ANGLE_SLACK or value > hi + _ANGLE_SLACK:
        raise DomainError(f"{name}={value!r} outside [{lo:.6g}, {hi:.6g}]")


def _check_rate(name, value):
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name}={value!r} must be finite and non-negative")


@dataclass(frozen=True)
class Generator:
    """Precomputed operators for the master equation of one ModelParams.

    `k_eff` is H - (i/2) c^dagger c so that
    L(rho) = -i (K rho - rho K^dagger) + c rho c^dagger.
    """

    hamiltonian: ComplexMat2
    jump: ComplexMat2
    k_eff: ComplexMat2
    jump_dag: ComplexMat2
    k_eff_dag: ComplexMat2


@dataclass(frozen=True)
class ModelParams:
    omega: float = 10.0
    gamma: float = 0.1
    lambda_fb: float = 0.0
    alpha: float = 0.0
    theta: float = math.pi / 4
    chi: float = 0.0

    def __post_init__(self):
        for name in ("omega", "gamma", "lambda_fb", "alpha", "theta", "chi"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_rate("omega", self.omega)
        _check_rate("gamma", self.gamma)
        _check_rate("lambda_fb", self.lambda_fb)
        _check_angle("alpha", self.alpha, -math.pi, math.pi)
        _check_angle("theta", self.theta, 0.0, math.pi / 2)
        _check_angle("chi", self.chi, 0.0, math.pi)

    def with_(self, **changes) -> ModelParams:
        return replace(self, **changes)

    @cached_property
    def generator(self) -> Generator:
        h = effective_hamiltonian(self)
        c = jump_operator(self)
        cdag = c.adjoint()
        k = h - 0.5j * (cdag @ c)
        return Generator(h, c, k, cdag, k.adjoint())


def feedback_hamiltonian(lambda_fb: float, alpha: float) -> ComplexMat2:
    """F = lambda (sigma_x sin(alpha) + sigma_y cos(alpha))."""
    _check_angle("alpha", alpha, -math.pi, math.pi)
    s, c = math.sin(alpha), math.cos(alpha)
    # explicit entries keep F exactly Hermitian
    return ComplexMat2(0j, complex(lambda_fb * s, -lambda_fb * c), complex(lambda_fb * s, lambda_fb * c), 0j)


def effective_hamiltonian(p: ModelParams) -> ComplexMat2:
    """H = omega sigma_z / 2 + (sigma_+ F + F sigma_-) / 2."""
    f = feedback_hamiltonian(p.lambda_fb, p.alpha)
    h = 0.5 * p.omega * SIGMA_Z + 0.5 * (SIGMA_PLUS @ f + f @ SIGMA_MINUS)
    assert h.hermitian_defect() <= 1e-12
    return h


def jump_operator(p: ModelParams) -> ComplexMat2:
    """c = sqrt(gamma) sigma_- - i F."""
    return math.sqrt(p.gamma) * SIGMA_MINUS - 1j * feedback_hamiltonian(p.lambda_fb, p.alpha)


def lindblad_rhs(rho, p: ModelParams) -> ComplexMat2:
    """Right-hand side of the feedback master equation.

    drho/dt = -i[H, rho] + c rho c^dagger - (c^dagger c rho + rho c^dagger c) / 2

    `rho` may be a DensityMatrix or a bare (possibly batched) ComplexMat2; no
    validation happens here because this sits inside the integrator and
    quadrature loops.
    """
    m = rho.mat if isinstance(rho, DensityMatrix) else rho
    g = p.generator
    k, kd, c, cd = g.k_eff, g.k_eff_dag, g.jump, g.jump_dag
    r00, r01, r10, r11 = m.m00, m.m01, m.m10, m.m11
    # K rho - rho K^dagger
    a00 = k.m00 * r00 + k.m01 * r10 - (r00 * kd.m00 + r01 * kd.m10)
    a01 = k.m00 * r01 + k.m01 * r11 - (r00 * kd.m01 + r01 * kd.m11)
    a10 = k.m10 * r00 + k.m11 * r10 - (r10 * kd.m00 + r11 * kd.m10)
    a11 = k.m10 * r01 + k.m11 * r11 - (r10 * kd.m01 + r11 * kd.m11)
    # c rho
    b00 = c.m00 * r00 + c.m01 * r10
    b01 = c.m00 * r01 + c.m01 * r11
    b10 = c.m10 * r00 + c.m11 * r10
    b11 = c.m10 * r01 + c.m11 * r11
    return ComplexMat2(
        -1j * a00 + b00 * cd.m00 + b01 * cd.m10,
        -1j * a01 + b00 * cd.m01 + b01 * cd.m11,
        -1j * a10 + b10 * cd.m00 + b11 * cd.m10,
        -1j * a11 + b10 * cd.m01 + b11 * cd.m11,
    )
