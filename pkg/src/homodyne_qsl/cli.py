"""Command line interface: ``qslt {sweep,point,trajectory,validate}``.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure,
4 numerical failure. Data goes to files (or stdout for ``point``),
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from .errors import DomainError, QsltError
from .integrator import DEFAULT_DT, sample
from .model import ModelParams
from .propagator import COEFF_MODES, ORACLE_VALIDATED, evolve_analytic, initial_state
from .qslt import DEFAULT_QUAD_STEPS, ENGINES, qslt_open
from .sweep import PRESET_ALPHAS, SweepConfig, SweepFailure, resolve_preset, run_sweep
from .validation import default_t_grid, format_report, run_validate

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

_ANGLE_RE = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """Radians from a decimal or a token like 'pi/4', '-pi/2', '3pi/4', 'pi'."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE_RE.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    sign, coeff, denom = m.groups()
    value = (float(coeff) if coeff else 1.0) * math.pi / (float(denom) if denom else 1.0)
    return -value if sign == "-" else value


def _add_model_args(ap):
    g = ap.add_argument_group("model (explicit flags override the preset)")
    g.add_argument("--preset", choices=sorted(PRESET_ALPHAS),
                   help="figure preset: omega=10, gamma=0.1, theta=pi/4, chi=0 and "
                        "alpha=0 (fig1), pi/4 (fig2), pi/2 (fig3)")
    g.add_argument("--omega", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--alpha", type=parse_angle)
    g.add_argument("--theta", type=parse_angle)
    g.add_argument("--chi", type=parse_angle)


def _add_numeric_args(ap):
    ap.add_argument("--quad-steps", type=int, help=f"trapezoid panels per window (default {DEFAULT_QUAD_STEPS})")
    ap.add_argument("--engine", choices=ENGINES, help="evolution engine (default analytic)")
    ap.add_argument("--coeff-mode", choices=COEFF_MODES, help=f"analytic coefficients (default {ORACLE_VALIDATED})")
    ap.add_argument("--oracle-dt", type=float, help=f"RK4 step for the oracle engine (default {DEFAULT_DT:g})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qslt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser(
        "sweep",
        help="QSLT versus initial time for several feedback strengths, as CSV",
        description="Defaults not fixed by the figure captions are choices of this tool: "
                    "lambda in {0, 0.1, 0.3, 0.5}, tau in [0, 5] with 201 points, tau_d = 1, "
                    "2000 quadrature panels, analytic engine, oracle-validated coefficients.",
    )
    _add_model_args(sw)
    sw.add_argument("--lambda", dest="lambdas", type=float, action="append",
                    help="feedback coefficient; repeat for several series")
    sw.add_argument("--tau-start", type=float)
    sw.add_argument("--tau-end", type=float)
    sw.add_argument("--tau-steps", type=int)
    sw.add_argument("--tau-d", type=float, help="driving time (default 1)")
    _add_numeric_args(sw)
    sw.add_argument("--output", help="CSV path (default $QSLT_OUTPUT_DIR/<preset>.csv)")
    sw.add_argument("--jobs", type=int, default=1, help="worker processes, one per lambda series")

    pt = sub.add_parser("point", help="bounds for a single window, printed as JSON")
    _add_model_args(pt)
    pt.add_argument("--lambda", dest="lambda_fb", type=float, default=None)
    pt.add_argument("--tau", type=float, default=0.0)
    pt.add_argument("--tau-d", type=float, default=1.0)
    _add_numeric_args(pt)

    tr = sub.add_parser("trajectory", help="density matrix samples over time, as CSV")
    _add_model_args(tr)
    tr.add_argument("--lambda", dest="lambda_fb", type=float, default=None)
    tr.add_argument("--t-end", type=float, default=5.0)
    tr.add_argument("--samples", type=int, default=101)
    tr.add_argument("--engine", choices=ENGINES, default="analytic")
    tr.add_argument("--coeff-mode", choices=COEFF_MODES, default=ORACLE_VALIDATED)
    tr.add_argument("--oracle-dt", type=float, default=DEFAULT_DT)
    tr.add_argument("--output", help="CSV path (default stdout)")

    va = sub.add_parser("validate", help="compare analytic coefficients with the RK4 oracle")
    _add_model_args(va)
    va.add_argument("--alphas", type=parse_angle, action="append",
                    help="feedback angle; repeatable (default 0, pi/4, pi/2)")
    va.add_argument("--lambda", dest="lambdas", type=float, action="append",
                    help="repeatable (default 0, 0.1, 0.3, 0.5)")
    va.add_argument("--t-end", type=float, default=5.0)
    va.add_argument("--t-samples", type=int, default=51)
    va.add_argument("--dt", type=float, default=DEFAULT_DT)
    va.add_argument("--jobs", type=int, default=1)
    return ap


def _model_overrides(args):
    return {k: getattr(args, k) for k in ("omega", "gamma", "alpha", "theta", "chi") if getattr(args, k) is not None}


def _base_params(args, lambda_fb=None) -> ModelParams:
    over = _model_overrides(args)
    if lambda_fb is not None:
        over["lambda_fb"] = lambda_fb
    if args.preset:
        over.setdefault("alpha", PRESET_ALPHAS[args.preset])
    return ModelParams(**over)


def sweep_config_from_args(args) -> SweepConfig:
    over = _model_overrides(args)
    mapping = {
        "lambdas": "lambda_values", "tau_start": "tau_start", "tau_end": "tau_end",
        "tau_steps": "tau_steps", "tau_d": "tau_d", "quad_steps": "n_quad",
        "engine": "engine", "coeff_mode": "coeff_mode", "oracle_dt": "oracle_dt", "output": "output_path",
    }
    for src, dst in mapping.items():
        value = getattr(args, src)
        if value is not None:
            over[dst] = tuple(value) if src == "lambdas" else value
    if args.preset:
        return resolve_preset(args.preset, **over)
    model_keys = ("omega", "gamma", "alpha", "theta", "chi")
    params = ModelParams(**{k: over.pop(k) for k in model_keys if k in over})
    return SweepConfig(params=params, **over)


def _numeric_kwargs(args):
    kw = {}
    if args.quad_steps is not None:
        kw["n_steps"] = args.quad_steps
    if args.engine is not None:
        kw["engine"] = args.engine
    if args.coeff_mode is not None:
        kw["coeff_mode"] = args.coeff_mode
    if args.oracle_dt is not None:
        kw["oracle_dt"] = args.oracle_dt
    return kw


def _cmd_sweep(args) -> int:
    config = sweep_config_from_args(args)
    try:
        path = run_sweep(config, jobs=args.jobs)
    except SweepFailure as exc:
        print(f"qslt: numerical failure at lambda={exc.lambda_fb!r}, tau={exc.tau!r}: {exc.cause}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"qslt: wrote {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_point(args) -> int:
    p = _base_params(args, args.lambda_fb)
    result = qslt_open(p, args.tau, args.tau_d, **_numeric_kwargs(args))
    json.dump(result.as_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_trajectory(args) -> int:
    p = _base_params(args, args.lambda_fb)
    if args.samples < 1 or not args.t_end >= 0:
        raise DomainError("need samples >= 1 and t_end >= 0")
    times = np.linspace(0.0, args.t_end, args.samples)
    rho0 = initial_state(p.theta, p.chi)
    if args.engine == "analytic":
        states = evolve_analytic(rho0, times, p, args.coeff_mode).mat
    else:
        states = sample(rho0, times, args.oracle_dt, p)
    lines = ["t,rho00,rho01_re,rho01_im,rho11"]
    for k, t in enumerate(times):
        m = states[k]
        lines.append(",".join(repr(float(x)) for x in (t, m.m00.real, m.m01.real, m.m01.imag, m.m11.real)))
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_validate(args) -> int:
    base = _base_params(args)
    alphas = args.alphas or list(PRESET_ALPHAS.values())
    lambdas = args.lambdas or [0.0, 0.1, 0.3, 0.5]
    reports = run_validate(base, alphas, lambdas, default_t_grid(args.t_end, args.t_samples), args.dt, args.jobs)
    sys.stdout.write(format_report(reports))
    if all(r.passed for r in reports):
        return EXIT_OK
    print("qslt: oracle-validated coefficients exceed tolerance", file=sys.stderr)
    return EXIT_NUMERIC


COMMANDS = {"sweep": _cmd_sweep, "point": _cmd_point, "trajectory": _cmd_trajectory, "validate": _cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"qslt: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qslt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QsltError, ArithmeticError) as exc:
        print(f"qslt: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
