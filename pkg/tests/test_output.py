import csv
import pytest
from pysgdct import ExperimentConfig, UsageError, config_hash, run_experiment, write_trace_csv
from pysgdct.experiment import summarize
from pysgdct.output import read_csv_comments, write_long_csv, write_summary_csv


def _table(path):
    with open(path, encoding = "utf-8") as file:
        return list(csv.reader(line for line in file if not line.startswith("#")))


@pytest.fixture
def kuramoto_config():
    return ExperimentConfig.from_dict({
        "model": {"name": "kuramoto"},
        "N": 3,
        "M": 4,
        "dt": 0.1,
        "steps": 12,
        "truth": [{"until_step": 6, "theta": [1.5]}, {"until_step": 12, "theta": [0.2]}],
        "initial_law": {"kind": "uniform", "low": [-3.14], "high": [3.14]},
        "theta_init": {"kind": "explicit", "value": [2.5]},
        "variants": ["averaged"],
        "record_stride": 5,
        "seeds": [4]
    })


class TestTraceCsv:

    def test_single_variant_header(self, kuramoto_config, tmp_path):
        trace = run_experiment(kuramoto_config)[0]
        write_trace_csv(trace, tmp_path / "trace.csv")
        rows = _table(tmp_path / "trace.csv")
        assert rows[0] == ["step", "time", "theta_1"]
        assert [int(x[0]) for x in rows[1:]] == [0, 5, 10, 12]
        meta = read_csv_comments(tmp_path / "trace.csv")
        assert meta["config_hash"] == config_hash(kuramoto_config)
        assert meta["seed"] == "4"
        assert meta["status"] == "DONE"

    def test_both_variants(self, config_data, tmp_path):
        trace = run_experiment(ExperimentConfig.from_dict(config_data))[0]
        write_trace_csv(trace, tmp_path / "nested" / "trace.csv")
        rows = _table(tmp_path / "nested" / "trace.csv")
        assert rows[0] == ["step", "time", "theta_1", "theta_2", "vartheta_1", "vartheta_2"]
        assert all(len(x) == 6 for x in rows)
        steps = [int(x[0]) for x in rows[1:]]
        assert steps == sorted(set(steps))

    def test_unwritable(self, kuramoto_config, tmp_path):
        trace = run_experiment(kuramoto_config)[0]
        blocker = tmp_path / "file"
        blocker.write_text("", encoding = "utf-8")
        with pytest.raises(UsageError):
            write_trace_csv(trace, blocker / "trace.csv")


class TestSummaryCsv:

    def test_rows(self, config_data, tmp_path):
        config = ExperimentConfig.from_dict(config_data)
        traces = run_experiment(config)
        write_summary_csv(summarize(config, traces), tmp_path / "summary.csv", {"config_hash": config_hash(config)})
        rows = _table(tmp_path / "summary.csv")
        assert rows[0][:5] == ["axis", "value", "variant", "seeds", "diverged"]
        assert [x[2] for x in rows[1:]] == ["averaged", "particlewise"]
        meta = read_csv_comments(tmp_path / "summary.csv")
        assert "final iterate" in meta["l2"]

    def test_empty(self, tmp_path):
        with pytest.raises(UsageError):
            write_summary_csv([], tmp_path / "summary.csv")


class TestLongCsv:

    def test_one_line_per_value(self, config_data, tmp_path):
        traces = run_experiment(ExperimentConfig.from_dict(config_data))
        write_long_csv({"": traces}, tmp_path / "long.csv", {"figure": "test"})
        rows = _table(tmp_path / "long.csv")
        assert rows[0] == ["group", "seed", "variant", "step", "time", "coordinate", "value"]
        assert len(rows) - 1 == sum(x.records * len(x.variants) * x.p for x in traces)
        assert read_csv_comments(tmp_path / "long.csv") == {"figure": "test"}
