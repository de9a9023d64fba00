import json
import pytest
from numpy.testing import assert_allclose
from pysgdct.cli import main


def _values(output):
    pairs = (line.partition("=") for line in output.splitlines() if "=" in line)
    return {key: value for key, _, value in pairs}


@pytest.fixture
def config_file(config_data, tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config_data), encoding = "utf-8")
    return path


class TestOracleCommand:

    def test_values(self, capsys):
        assert main(["oracle", "--model", "quadratic", "--theta01", "1.2", "--theta02", "0.5", "--sigma", "1", "--n", "2"]) == 0
        values = _values(capsys.readouterr().out)
        assert_allclose(float(values["theta2_star"]), 0.6 / 2.9)
        assert_allclose(float(values["V_N"]), 0.355392, rtol = 1e-5)
        assert_allclose(float(values["C_N"]), 0.208333, rtol = 1e-5)
        assert_allclose(float(values["objective_floor"]), 0.25 / 23.2)

    def test_euler_moments(self, capsys):
        assert main(["oracle", "--theta01", "1.2", "--theta02", "0.5", "--n", "10", "--dt", "0.05"]) == 0
        assert "V_N_euler" in _values(capsys.readouterr().out)

    def test_invalid_truth(self, capsys):
        assert main(["oracle", "--theta01", "-1", "--theta02", "0.5", "--n", "2"]) == 2
        assert "INVALID_ARGUMENT" in capsys.readouterr().err


class TestEstimateCommand:

    def test_writes_traces(self, config_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["estimate", "--config", str(config_file), "--out", str(out)]) == 0
        values = _values(capsys.readouterr().out)
        assert len(values["config_hash"]) == 16
        assert values["seed1.status"] == "DONE"
        assert {"theta_1", "vartheta_2"} <= {key.split(".")[1] for key in values if key.startswith("seed0.")}
        assert {x.name for x in out.iterdir()} == {"trace_seed0.csv", "trace_seed1.csv", "trace_seed2.csv", "summary.csv"}

    def test_single_seed(self, config_file, tmp_path, capsys):
        assert main(["estimate", "--config", str(config_file), "--seed", "9", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "trace_seed9.csv").exists()
        assert not (tmp_path / "trace_seed0.csv").exists()

    def test_invalid_config(self, config_data, tmp_path, capsys):
        config_data["N"] = 0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(config_data), encoding = "utf-8")
        assert main(["estimate", "--config", str(path), "--out", str(tmp_path)]) == 2
        assert "N:" in capsys.readouterr().err

    def test_divergence(self, config_data, tmp_path, capsys):
        config_data.update(learning_rate = {"kind": "constant", "c": 1e300}, seeds = [0])
        path = tmp_path / "diverging.json"
        path.write_text(json.dumps(config_data), encoding = "utf-8")
        assert main(["estimate", "--config", str(path), "--out", str(tmp_path)]) == 1
        assert _values(capsys.readouterr().out)["seed0.status"] == "DIVERGED"


class TestSweepCommand:

    def test_stdout(self, config_file, capsys):
        assert main(["sweep", "--config", str(config_file), "--axis", "N", "--values", "2,3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("axis,value,variant,seeds,diverged")
        assert len(lines) == 1 + 2 * 2

    def test_bad_values(self, config_file, capsys):
        assert main(["sweep", "--config", str(config_file), "--axis", "M", "--values", "3,x"]) == 2

    def test_bad_axis(self, config_file):
        with pytest.raises(SystemExit) as info:
            main(["sweep", "--config", str(config_file), "--axis", "dt", "--values", "1"])
        assert info.value.code == 2


class TestCheckCommand:

    def test_passes(self, capsys):
        assert main(["check"]) == 0
        values = _values(capsys.readouterr().out)
        passed = {key: value for key, value in values.items() if key.endswith(".passed")}
        assert len(passed) == 6
        assert set(passed.values()) == {"True"}


class TestReplicateCommand:

    def test_scaled(self, tmp_path, capsys):
        assert main(["replicate", "--figure", "fig6a", "--scale", "0.01", "--out", str(tmp_path)]) == 0
        values = _values(capsys.readouterr().out)
        assert values["fig6a.diverged"] == "0"
        assert "fig6a.averaged.l2_1" in values

    def test_unknown_figure(self, tmp_path, capsys):
        assert main(["replicate", "--figure", "fig0", "--out", str(tmp_path)]) == 2
