import math

import numpy as np
import pytest
from hypothesis import strategies as st

from homodyne_qsl.mat2 import ComplexMat2, DensityMatrix
from homodyne_qsl.model import ModelParams

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def finite(lo, hi):
    return st.floats(min_value=lo, max_value=hi, allow_nan=False, allow_infinity=False)


params_st = st.builds(
    ModelParams,
    omega=finite(0.0, 20.0),
    gamma=finite(0.0, 1.0),
    lambda_fb=finite(0.0, 2.0),
    alpha=finite(-math.pi, math.pi),
    theta=finite(0.0, math.pi / 2),
    chi=finite(0.0, math.pi),
)

# Gamma > 0, needed by the analytic coefficients
damped_params_st = params_st.filter(lambda p: p.gamma > 1e-3 or p.lambda_fb > 1e-3)


def bloch_state(r, polar, azimuth):
    x = r * math.sin(polar) * math.cos(azimuth)
    y = r * math.sin(polar) * math.sin(azimuth)
    z = r * math.cos(polar)
    return DensityMatrix(
        ComplexMat2(complex(0.5 * (1 + z)), complex(0.5 * x, -0.5 * y), complex(0.5 * x, 0.5 * y), complex(0.5 * (1 - z)))
    )


density_st = st.builds(bloch_state, finite(0.0, 1.0), finite(0.0, math.pi), finite(0.0, 2 * math.pi))

complex_st = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)
mat_st = st.builds(ComplexMat2, complex_st, complex_st, complex_st, complex_st)


def random_params(rng, n):
    out = []
    for _ in range(n):
        out.append(
            ModelParams(
                omega=rng.uniform(0, 20),
                gamma=rng.uniform(0.01, 1),
                lambda_fb=rng.uniform(0, 2),
                alpha=rng.uniform(-math.pi, math.pi),
                theta=rng.uniform(0, math.pi / 2),
                chi=rng.uniform(0, math.pi),
            )
        )
    return out


def random_states(rng, n):
    return [
        bloch_state(rng.uniform(0, 1) ** (1 / 3), math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))
        for _ in range(n)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def fig1_params():
    return ModelParams(omega=10.0, gamma=0.1, lambda_fb=0.1, alpha=0.0, theta=math.pi / 4, chi=0.0)
