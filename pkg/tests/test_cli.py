"""Config parsing, command execution, artifact formats, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from euleralign.cli import main, read_table
from euleralign.config import ConfigError, parse_config
from euleralign.diagnostics import SERIES_COLUMNS

MINIMAL_SIMULATE = """
command = "simulate"

[model]
alpha = 0.5
dimension = 2

[grid]
points = 16
box_length = 10.0

[stepper]
dt = 0.1
output_stride = 2

[scenario]
name = "gaussian"
amplitude = 0.01
seed = 7

[run]
t_end = 1.0
"""


class TestParseConfig:
    def test_minimal_simulate_fills_defaults(self):
        cfg = parse_config(MINIMAL_SIMULATE)
        assert cfg.command == "simulate"
        assert cfg.params.mu == 1.0 and cfg.params.gamma == 1.0
        assert cfg.stepper.scheme == "etdrk2"
        assert cfg.fit["quantities"] == ["L2_a", "L2_u"]
        assert cfg.output_dir == "out"

    def test_alpha_out_of_solver_range(self):
        text = MINIMAL_SIMULATE.replace("alpha = 0.5", "alpha = 1.5")
        with pytest.raises(ConfigError, match="alpha"):
            parse_config(text)

    def test_unknown_key_named(self):
        text = MINIMAL_SIMULATE.replace("alpha = 0.5", "aplha = 0.5")
        with pytest.raises(ConfigError, match="aplha"):
            parse_config(text)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="solver"):
            parse_config(MINIMAL_SIMULATE + "\n[solver]\nx = 1\n")

    def test_missing_command(self):
        with pytest.raises(ConfigError, match="command"):
            parse_config("[model]\nalpha = 0.5\n")

    def test_wrong_type_reported(self):
        text = MINIMAL_SIMULATE.replace("points = 16", 'points = "many"')
        with pytest.raises(ConfigError, match="grid.points"):
            parse_config(text)

    def test_odd_points_rejected(self):
        text = MINIMAL_SIMULATE.replace("points = 16", "points = 17")
        with pytest.raises(ConfigError, match="points"):
            parse_config(text)

    def test_presets_fill_conserved_targets(self):
        text = MINIMAL_SIMULATE.replace('name = "gaussian"', 'name = "lower-bound"')
        cfg = parse_config(text)
        assert cfg.scenario.mean_a == 0.01
        assert cfg.scenario.momentum == "auto"


def run_cli(tmp_path, text, name="run.toml", extra=()):
    cfg_path = tmp_path / name
    cfg_path.write_text(text)
    out = tmp_path / "out"
    return main(["--config", str(cfg_path), "--out", str(out), "--quiet", *extra]), out


class TestSimulateCommand:
    def test_artifacts_and_header(self, tmp_path):
        code, out = run_cli(tmp_path, MINIMAL_SIMULATE)
        assert code == 0
        header, data = read_table(out / "series.csv")
        assert header == list(SERIES_COLUMNS)
        assert data.shape[1] == len(SERIES_COLUMNS)
        summary = json.loads((out / "summary.json").read_text())
        assert summary["format_version"] == 1
        assert summary["config"]["model"]["alpha"] == 0.5
        assert (out / "resolved_config.json").exists()

    def test_byte_identical_given_seed(self, tmp_path):
        code1, out1 = run_cli(tmp_path, MINIMAL_SIMULATE)
        cfg_path = tmp_path / "run2.toml"
        cfg_path.write_text(MINIMAL_SIMULATE)
        out2 = tmp_path / "out2"
        code2 = main(["--config", str(cfg_path), "--out", str(out2), "--quiet"])
        assert code1 == code2 == 0
        assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()

    def test_seed_flag_overrides(self, tmp_path):
        text = MINIMAL_SIMULATE.replace('name = "gaussian"',
                                        'name = "gaussian"\nrandom_phases = true')
        _, out1 = run_cli(tmp_path, text)
        cfg_path = tmp_path / "run3.toml"
        cfg_path.write_text(text)
        out3 = tmp_path / "out3"
        main(["--config", str(cfg_path), "--out", str(out3), "--seed", "99", "--quiet"])
        b1 = (out1 / "series.csv").read_bytes()
        b3 = (out3 / "series.csv").read_bytes()
        assert b1 != b3

    def test_config_error_exit_code(self, tmp_path):
        cfg_path = tmp_path / "bad.toml"
        cfg_path.write_text(MINIMAL_SIMULATE.replace("alpha = 0.5", "alpha = 1.5"))
        assert main(["--config", str(cfg_path), "--quiet"]) == 2

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.toml"), "--quiet"]) == 2

    def test_numerical_failure_exit_code(self, tmp_path):
        text = MINIMAL_SIMULATE.replace("amplitude = 0.01", "amplitude = 0.45")
        text = text.replace("dt = 0.1", "dt = 2.0")
        text = text.replace("alpha = 0.5", "alpha = 0.25")
        text = text.replace("mu = 1.0", "mu = 0.05")
        code, out = run_cli(tmp_path, text)
        if code != 0:  # blow-up depends on how violent the configuration is
            assert code == 3
            assert (out / "error.json").exists()


class TestRatesCommand:
    def test_table_reproduces_branches(self, tmp_path):
        text = """
command = "rates"

[rates]
dims = [2, 3]
alpha_min = 0.1
alpha_max = 1.9
alpha_points = 19
"""
        code, out = run_cli(tmp_path, text)
        assert code == 0
        header, data = read_table(out / "rates.csv")
        assert header[:4] == ["dim", "alpha", "r1", "r2"]
        d2 = data[data[:, 0] == 2]
        exact = np.where(d2[:, 1] <= 1.0, 2.0 / (2.0 * (2.0 - d2[:, 1])),
                         2.0 / (2.0 * d2[:, 1]))
        assert np.allclose(d2[:, 2], exact, rtol=1e-12)
        # junction: r1 = r2 = N/2 at alpha = 1
        at_one = d2[np.isclose(d2[:, 1], 1.0)]
        assert np.allclose(at_one[:, 2], 1.0) and np.allclose(at_one[:, 3], 1.0)


class TestLinearDecayCommand:
    def test_fast_window_passes(self, tmp_path):
        text = """
command = "linear-decay"

[model]
alpha = 0.5
dimension = 2

[linear]
t_min = 1e2
t_max = 1e4
t_points = 9
"""
        code, out = run_cli(tmp_path, text)
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["passed"]
        header, data = read_table(out / "linear_decay.csv")
        assert header[0] == "t" and data.shape[0] == 9


class TestGreenAuditCommand:
    def test_pass_and_samples(self, tmp_path):
        text = """
command = "green-audit"

[model]
alpha = 0.5

[audit]
t_points = 24
xi_points = 24
"""
        code, out = run_cli(tmp_path, text)
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"]
        header, data = read_table(out / "samples.csv")
        assert data.shape[0] == 24 * 24


class TestLowerBoundCommand:
    def test_nonzero_mean_passes(self, tmp_path):
        text = """
command = "lower-bound"

[model]
alpha = 0.5

[linear]
t_min = 1.0
t_max = 1e4
t_points = 13
"""
        code, out = run_cli(tmp_path, text)
        assert code == 0
        assert (out / "scaled.csv").exists()

    def test_zero_mean_rejected_exit_4(self, tmp_path):
        text = """
command = "lower-bound"

[model]
alpha = 0.5

[scenario]
name = "zero-mean"

[linear]
t_min = 1.0
t_max = 1e3
t_points = 9
"""
        code, out = run_cli(tmp_path, text)
        assert code == 4
        report = json.loads((out / "report.json").read_text())
        assert not report["passed"]
        assert "zero mean" in report["report"]["reason"]


class TestSweepCommand:
    def test_sweep_over_alpha(self, tmp_path):
        text = MINIMAL_SIMULATE.replace('command = "simulate"', 'command = "sweep"')
        text += """
[sweep]
key = "model.alpha"
values = [0.4, 0.6]
command = "simulate"
"""
        code, out = run_cli(tmp_path, text)
        assert code == 0
        runs = json.loads((out / "sweep.json").read_text())["runs"]
        assert len(runs) == 2
        for entry in runs:
            assert (out / entry["dir"] / "series.csv").exists()

    def test_sweep_requires_key(self, tmp_path):
        text = MINIMAL_SIMULATE.replace('command = "simulate"', 'command = "sweep"')
        cfg_path = tmp_path / "run.toml"
        cfg_path.write_text(text)
        assert main(["--config", str(cfg_path), "--quiet"]) == 2


class TestBoxSensitivityCommand:
    def test_two_boxes(self, tmp_path):
        text = MINIMAL_SIMULATE.replace('command = "simulate"', 'command = "box-sensitivity"')
        text = text.replace('name = "gaussian"', 'name = "zero-mean"')
        text += """
[boxes]
lengths = [10.0, 15.0]
"""
        code, out = run_cli(tmp_path, text)
        assert code == 0
        assert (out / "series_L10.csv").exists()
        assert (out / "series_L15.csv").exists()
        report = json.loads((out / "report.json").read_text())
        assert "trustworthy_t" in report["report"]
