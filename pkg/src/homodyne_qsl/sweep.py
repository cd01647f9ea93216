"""Figure presets and QSLT parameter sweeps written as CSV."""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import DomainError, QsltError, UnknownPreset
from .integrator import DEFAULT_DT
from .model import ModelParams
from .propagator import COEFF_MODES, ORACLE_VALIDATED
from .qslt import DEFAULT_QUAD_STEPS, ENGINES, qslt_open

CSV_COLUMNS = (
    "alpha",
    "lambda",
    "tau",
    "tau_d",
    "rel_purity",
    "ml_denominator",
    "mt_denominator",
    "bound_ml",
    "bound_mt",
    "tau_qsl",
)

# caption values shared by all three figures
_CAPTION = dict(omega=10.0, gamma=0.1, theta=math.pi / 4, chi=0.0)
PRESET_ALPHAS = {"fig1": 0.0, "fig2": math.pi / 4, "fig3": math.pi / 2}

# Not given numerically in the source figures; chosen here.
DEFAULT_LAMBDAS = (0.0, 0.1, 0.3, 0.5)
DEFAULT_TAU_START = 0.0
DEFAULT_TAU_END = 5.0
DEFAULT_TAU_STEPS = 201
DEFAULT_TAU_D = 1.0


class SweepFailure(QsltError):
    """Numerical failure at one sweep point."""

    def __init__(self, lambda_fb, tau, cause):
        super().__init__(f"lambda={lambda_fb!r} tau={tau!r}: {type(cause).__name__}: {cause}")
        self.lambda_fb = lambda_fb
        self.tau = tau
        self.cause = cause


@dataclass(frozen=True)
class SweepConfig:
    params: ModelParams = field(default_factory=lambda: ModelParams(**_CAPTION))
    lambda_values: tuple = DEFAULT_LAMBDAS
    tau_start: float = DEFAULT_TAU_START
    tau_end: float = DEFAULT_TAU_END
    tau_steps: int = DEFAULT_TAU_STEPS
    tau_d: float = DEFAULT_TAU_D
    n_quad: int = DEFAULT_QUAD_STEPS
    engine: str = "analytic"
    coeff_mode: str = ORACLE_VALIDATED
    oracle_dt: float = DEFAULT_DT
    output_path: str | None = None
    preset: str | None = None

    def __post_init__(self):
        lams = tuple(float(x) for x in self.lambda_values)
        if not lams:
            raise DomainError("at least one lambda value is required")
        if any(not math.isfinite(x) or x < 0 for x in lams):
            raise DomainError(f"lambda values must be finite and non-negative: {lams}")
        if len(set(lams)) != len(lams):
            raise DomainError(f"lambda values must be distinct: {lams}")
        object.__setattr__(self, "lambda_values", tuple(sorted(lams)))
        if not (math.isfinite(self.tau_start) and self.tau_start >= 0):
            raise DomainError(f"tau start must be >= 0, got {self.tau_start!r}")
        if not (math.isfinite(self.tau_end) and self.tau_end > self.tau_start):
            raise DomainError(f"tau end must exceed tau start, got {self.tau_end!r}")
        if int(self.tau_steps) != self.tau_steps or self.tau_steps < 2:
            raise DomainError(f"tau steps must be an integer >= 2, got {self.tau_steps!r}")
        if not (math.isfinite(self.tau_d) and self.tau_d > 0):
            raise DomainError(f"driving time must be positive, got {self.tau_d!r}")
        if int(self.n_quad) != self.n_quad or self.n_quad < 2:
            raise DomainError(f"quadrature panels must be an integer >= 2, got {self.n_quad!r}")
        if self.engine not in ENGINES:
            raise DomainError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.coeff_mode not in COEFF_MODES:
            raise DomainError(f"coefficient mode must be one of {COEFF_MODES}, got {self.coeff_mode!r}")
        if not self.oracle_dt > 0:
            raise DomainError(f"oracle dt must be positive, got {self.oracle_dt!r}")

    def tau_grid(self) -> np.ndarray:
        k = np.arange(self.tau_steps)
        return self.tau_start + (self.tau_end - self.tau_start) * k / (self.tau_steps - 1)

    def header_items(self):
        """(key, value) pairs recorded as '#' comment lines in the CSV."""
        items = [("preset", self.preset or "custom")]
        for f in fields(ModelParams):
            if f.name != "lambda_fb":
                items.append((f.name, getattr(self.params, f.name)))
        items.append(("lambda_values", " ".join(repr(x) for x in self.lambda_values)))
        for name in ("tau_start", "tau_end", "tau_steps", "tau_d", "n_quad", "engine", "coeff_mode", "oracle_dt"):
            items.append((name, getattr(self, name)))
        return items


def resolve_preset(name: str, **overrides) -> SweepConfig:
    """Sweep configuration for one of the figure presets fig1/fig2/fig3.

    Keyword overrides replace config fields; ModelParams fields (omega,
    gamma, alpha, theta, chi) are routed into `params`.
    """
    if name not in PRESET_ALPHAS:
        raise UnknownPreset(f"unknown preset {name!r}; expected one of {sorted(PRESET_ALPHAS)}")
    param_fields = {f.name for f in fields(ModelParams)}
    param_over = {k: v for k, v in overrides.items() if k in param_fields}
    cfg_over = {k: v for k, v in overrides.items() if k not in param_fields}
    params = ModelParams(**{**_CAPTION, "alpha": PRESET_ALPHAS[name], **param_over})
    return SweepConfig(params=params, preset=name, **cfg_over)


def _fmt(x) -> str:
    return repr(float(x))


def _lambda_rows(config: SweepConfig, lam: float):
    p = config.params.with_(lambda_fb=lam)
    rows = []
    for tau in config.tau_grid():
        try:
            r = qslt_open(
                p,
                float(tau),
                config.tau_d,
                config.n_quad,
                engine=config.engine,
                coeff_mode=config.coeff_mode,
                oracle_dt=config.oracle_dt,
            )
        except (QsltError, ArithmeticError) as exc:
            raise SweepFailure(lam, float(tau), exc) from exc
        rows.append(
            (p.alpha, lam, r.tau, r.tau_d, r.rel_purity, r.ml_denominator,
             r.mt_denominator, r.bound_ml, r.bound_mt, r.tau_qsl)
        )
    return rows


def sweep_rows(config: SweepConfig, jobs: int = 1):
    """All data rows in (lambda ascending, tau ascending) order."""
    lams = config.lambda_values
    if jobs > 1 and len(lams) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_lambda = list(pool.map(_lambda_rows, [config] * len(lams), lams))
    else:
        per_lambda = [_lambda_rows(config, lam) for lam in lams]
    return [row for rows in per_lambda for row in rows]


def render_csv(config: SweepConfig, rows) -> str:
    buf = io.StringIO(newline="")
    for key, value in config.header_items():
        if isinstance(value, float):
            value = _fmt(value)
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def default_output_path(config: SweepConfig) -> Path:
    base = Path(os.environ.get("QSLT_OUTPUT_DIR", "."))
    return base / f"{config.preset or 'sweep'}.csv"


def run_sweep(config: SweepConfig, jobs: int = 1) -> Path:
    """Compute the sweep and write the CSV; returns the path written.

    Raises SweepFailure on numerical trouble and OSError on I/O trouble.
    """
    text = render_csv(config, sweep_rows(config, jobs))
    path = Path(config.output_path) if config.output_path else default_output_path(config)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path

