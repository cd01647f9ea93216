import json
import math

import numpy as np
import pytest

from homodyne_qsl.cli import main, parse_angle
from homodyne_qsl.errors import DomainError, UnknownPreset
from homodyne_qsl.sweep import CSV_COLUMNS, SweepConfig, render_csv, resolve_preset, run_sweep, sweep_rows

SMALL = ["--tau-steps", "5", "--tau-end", "1", "--quad-steps", "50"]


def read_csv(path):
    lines = path.read_text().split("\n")
    comments = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if l and not l.startswith("#")]
    return comments, body[0], [list(map(float, l.split(","))) for l in body[1:]]


class TestPresets:
    def test_fig1(self):
        cfg = resolve_preset("fig1")
        assert cfg.params.alpha == 0.0
        assert (cfg.params.omega, cfg.params.gamma, cfg.params.theta, cfg.params.chi) == (10.0, 0.1, math.pi / 4, 0.0)
        assert cfg.lambda_values == (0.0, 0.1, 0.3, 0.5)
        assert (cfg.tau_start, cfg.tau_end, cfg.tau_steps, cfg.tau_d, cfg.n_quad) == (0.0, 5.0, 201, 1.0, 2000)
        assert (cfg.engine, cfg.coeff_mode) == ("analytic", "oracle-validated")

    def test_fig2_fig3(self):
        assert resolve_preset("fig2").params.alpha == pytest.approx(math.pi / 4)
        assert resolve_preset("fig3").params.alpha == pytest.approx(math.pi / 2)

    def test_override(self):
        cfg = resolve_preset("fig2", tau_d=2.0)
        assert cfg.tau_d == 2.0
        assert cfg.params == resolve_preset("fig2").params

    def test_unknown(self):
        with pytest.raises(UnknownPreset):
            resolve_preset("fig4")


class TestSweepConfig:
    def test_lambdas_sorted(self):
        assert SweepConfig(lambda_values=(0.5, 0.0, 0.1)).lambda_values == (0.0, 0.1, 0.5)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(lambda_values=()),
            dict(lambda_values=(0.1, 0.1)),
            dict(lambda_values=(-0.1,)),
            dict(tau_start=2.0, tau_end=1.0),
            dict(tau_steps=1),
            dict(tau_d=0.0),
            dict(n_quad=1),
            dict(engine="euler"),
            dict(coeff_mode="x"),
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            SweepConfig(**kw)

    def test_uniform_grid(self):
        g = SweepConfig(tau_start=1.0, tau_end=2.0, tau_steps=5).tau_grid()
        np.testing.assert_allclose(np.diff(g), 0.25)
        assert g[0] == 1.0 and g[-1] == 2.0


class TestSweep:
    def test_fig1_row_count_and_schema(self, tmp_path):
        out = tmp_path / "fig1.csv"
        assert main(["sweep", "--preset", "fig1", "--output", str(out)]) == 0
        comments, header, rows = read_csv(out)
        assert header == ",".join(CSV_COLUMNS)
        assert len(rows) == 804
        assert "# preset=fig1" in comments and "# lambda_values=0.0 0.1 0.3 0.5" in comments
        lam_tau = [(r[1], r[2]) for r in rows]
        assert lam_tau == sorted(lam_tau)
        assert out.read_bytes().count(b"\r") == 0

    def test_floats_round_trip(self, tmp_path):
        out = tmp_path / "s.csv"
        main(["sweep", "--preset", "fig2", *SMALL, "--output", str(out)])
        cfg = resolve_preset("fig2", tau_steps=5, tau_end=1.0, n_quad=50)
        rows = sweep_rows(cfg)
        _, _, parsed = read_csv(out)
        assert parsed == [list(r) for r in rows]

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            main(["sweep", "--preset", "fig3", *SMALL, "--lambda", "0.2", "--lambda", "0", "--output", str(path)])
        assert a.read_bytes() == b.read_bytes()

    def test_stationary_all_zero(self, tmp_path):
        out = tmp_path / "s.csv"
        code = main(["sweep", "--preset", "fig1", *SMALL, "--lambda", "0", "--theta", "pi/2", "--output", str(out)])
        assert code == 0
        _, _, rows = read_csv(out)
        assert all(r[9] == 0.0 for r in rows)

    def test_custom_without_preset(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["sweep", "--alpha", "pi/4", "--lambda", "0.1", *SMALL, "--output", str(out)]) == 0
        comments, _, rows = read_csv(out)
        assert "# preset=custom" in comments
        assert rows[0][0] == pytest.approx(math.pi / 4)

    def test_output_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QSLT_OUTPUT_DIR", str(tmp_path))
        assert main(["sweep", "--preset", "fig1", *SMALL]) == 0
        assert (tmp_path / "fig1.csv").exists()

    def test_render_matches_run(self, tmp_path):
        cfg = resolve_preset("fig1", tau_steps=3, n_quad=20, output_path=str(tmp_path / "x.csv"))
        path = run_sweep(cfg)
        assert path.read_text() == render_csv(cfg, sweep_rows(cfg))


class TestExitCodes:
    def test_config_error(self, tmp_path):
        assert main(["sweep", "--preset", "fig1", "--tau-d", "-1", "--output", str(tmp_path / "x")]) == 2
        assert main(["sweep", "--alpha", "4", "--output", str(tmp_path / "x")]) == 2

    def test_argparse_error(self):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--preset", "fig9"])
        assert info.value.code == 2

    def test_io_error(self, tmp_path):
        assert main(["sweep", "--preset", "fig1", *SMALL, "--output", str(tmp_path / "missing" / "x.csv")]) == 3

    def test_numerical_error(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        code = main(["sweep", "--gamma", "0", "--lambda", "0", *SMALL, "--output", str(out)])
        assert code == 4
        assert "lambda=0.0, tau=0.0" in capsys.readouterr().err
        assert not out.exists()


class TestOtherCommands:
    def test_point(self, capsys):
        assert main(["point", "--preset", "fig1", "--lambda", "0"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["tau_qsl"] == pytest.approx(0.1843367079703927, rel=1e-5)

    def test_point_oracle_engine(self, capsys):
        assert main(["point", "--preset", "fig3", "--lambda", "0.3", "--engine", "oracle", "--quad-steps", "100"]) == 0
        oracle = json.loads(capsys.readouterr().out)["tau_qsl"]
        main(["point", "--preset", "fig3", "--lambda", "0.3", "--quad-steps", "100"])
        assert json.loads(capsys.readouterr().out)["tau_qsl"] == pytest.approx(oracle, rel=1e-5)

    def test_trajectory(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["trajectory", "--preset", "fig2", "--lambda", "0.3", "--t-end", "1", "--samples", "11", "--output", str(a)]) == 0
        assert main(["trajectory", "--preset", "fig2", "--lambda", "0.3", "--t-end", "1", "--samples", "11",
                     "--engine", "oracle", "--output", str(b)]) == 0
        ta = np.loadtxt(a, delimiter=",", skiprows=1)
        tb = np.loadtxt(b, delimiter=",", skiprows=1)
        assert ta.shape == (11, 5)
        np.testing.assert_allclose(ta, tb, atol=1e-9)
        np.testing.assert_allclose(ta[:, 1] + ta[:, 4], 1.0, atol=1e-12)

    def test_validate_t_zero(self, capsys):
        assert main(["validate", "--t-end", "0", "--t-samples", "1"]) == 0
        out = capsys.readouterr().out
        assert "oracle-validated 0.000e+00" in out and "paper-literal 0.000e+00" in out

    def test_validate_small(self, capsys):
        code = main(["validate", "--alphas", "pi/4", "--lambda", "0.3", "--t-end", "0.5", "--t-samples", "6"])
        assert code == 0
        row = capsys.readouterr().out.splitlines()[1].split(",")
        assert float(row[2]) < 1e-8  # oracle-validated
        assert float(row[4]) < 1e-8  # paper-literal populations
        assert float(row[5]) > 1e-2  # paper-literal coherences


@pytest.mark.parametrize(
    "text,value",
    [("0", 0.0), ("pi/4", math.pi / 4), ("pi/2", math.pi / 2), ("-pi/2", -math.pi / 2),
     ("pi", math.pi), ("3pi/4", 3 * math.pi / 4), ("0.25", 0.25), ("PI/4", math.pi / 4)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, rel=1e-15)


def test_parse_angle_rejects():
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        parse_angle("quarter")
