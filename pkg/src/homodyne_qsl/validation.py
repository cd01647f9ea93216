"""Closed-form propagator versus the RK4 oracle, for both coefficient modes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .integrator import DEFAULT_DT, sample
from .model import ModelParams
from .propagator import COEFF_MODES, ORACLE_VALIDATED, PAPER_LITERAL, apply_map, coefficients, initial_state

TOLERANCE = 1e-6


@dataclass(frozen=True)
class PointReport:
    """Maximum entrywise deviations from the oracle over the time grid."""

    alpha: float
    lambda_fb: float
    deviation: dict  # mode -> max |analytic - oracle| over all entries
    population_deviation: dict
    coherence_deviation: dict

    @property
    def passed(self) -> bool:
        return self.deviation[ORACLE_VALIDATED] < TOLERANCE


def validate_point(p: ModelParams, t_grid, dt: float = DEFAULT_DT) -> PointReport:
    t_grid = np.asarray(t_grid, dtype=float)
    rho0 = initial_state(p.theta, p.chi)
    oracle = sample(rho0, t_grid, dt, p).to_array()
    dev, pop, coh = {}, {}, {}
    for mode in COEFF_MODES:
        diff = np.abs(apply_map(rho0, coefficients(t_grid, p, mode)).to_array() - oracle)
        pop[mode] = float(max(diff[:, 0, 0].max(), diff[:, 1, 1].max()))
        coh[mode] = float(max(diff[:, 0, 1].max(), diff[:, 1, 0].max()))
        dev[mode] = max(pop[mode], coh[mode])
    return PointReport(p.alpha, p.lambda_fb, dev, pop, coh)


def _validate_one(args):
    p, t_grid, dt = args
    return validate_point(p, t_grid, dt)


def run_validate(base: ModelParams, alphas, lambdas, t_grid, dt: float = DEFAULT_DT, jobs: int = 1):
    """Validate every (alpha, lambda) pair; returns reports in grid order."""
    tasks = [(base.with_(alpha=a, lambda_fb=lam), t_grid, dt) for a in alphas for lam in lambdas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_validate_one, tasks))
    return [_validate_one(t) for t in tasks]


def format_report(reports) -> str:
    lines = [
        "alpha,lambda,dev_oracle_validated,dev_paper_literal,"
        "pop_dev_paper_literal,coh_dev_paper_literal,status"
    ]
    for r in reports:
        lines.append(
            ",".join(
                [
                    repr(r.alpha),
                    repr(r.lambda_fb),
                    f"{r.deviation[ORACLE_VALIDATED]:.3e}",
                    f"{r.deviation[PAPER_LITERAL]:.3e}",
                    f"{r.population_deviation[PAPER_LITERAL]:.3e}",
                    f"{r.coherence_deviation[PAPER_LITERAL]:.3e}",
                    "ok" if r.passed else "FAIL",
                ]
            )
        )
    worst = max(r.deviation[ORACLE_VALIDATED] for r in reports)
    worst_lit = max(r.deviation[PAPER_LITERAL] for r in reports)
    lines.append(
        f"# max deviation: oracle-validated {worst:.3e} (tolerance {TOLERANCE:g}), "
        f"paper-literal {worst_lit:.3e}"
    )
    return "\n".join(lines) + "\n"


def default_t_grid(t_end: float = 5.0, samples: int = 51):
    return np.linspace(0.0, t_end, samples)

