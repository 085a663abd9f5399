import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from rbfpnn.cli import main
from rbfpnn.dataset import load_csv, samples_to_table, synth_generate, write_csv
from rbfpnn.gasa import TRACE_HEADER, TrainingTrace


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write_config(path, data, **trainer):
    settings = {"population_size": 10, "max_iterations": 15, "rng_seed": 3}
    settings.update(trainer)
    config = {
        "data": data,
        "split": {"train_count": 8, "test_count": 4, "seed": 0},
        "hidden_nodes": 3,
        "normalization": "global",
        "model_out": "model.json",
        "trace_out": "trace.csv",
        "trainer": settings,
    }
    path.write_text(json.dumps(config))
    return str(path)


@pytest.fixture
def small_data(workdir):
    samples = synth_generate(12, 6, 0.05, np.random.default_rng(0))
    write_csv(str(workdir / "data.csv"), samples_to_table(samples))
    return "data.csv"


class TestDistance:
    def test_example(self, runner, workdir):
        (workdir / "a.csv").write_text("0,1,2\n")
        (workdir / "b.csv").write_text("0,2\n")
        result = runner.invoke(main, ["distance", "a.csv", "b.csv"])
        assert result.exit_code == 0
        assert result.output.strip() == "1.000000"

    def test_identical(self, runner, workdir):
        (workdir / "a.csv").write_text("0.5,1,7\n3,3,1\n")
        result = runner.invoke(main, ["distance", "a.csv", "a.csv"])
        assert result.output.strip() == "0.000000"

    def test_generalized(self, runner, workdir):
        (workdir / "a.csv").write_text("0,0\n0,0\n")
        (workdir / "b.csv").write_text("3,3\n4,4\n")
        result = runner.invoke(main, ["distance", "a.csv", "b.csv"])
        assert result.output.strip() == "5.000000"

    def test_component_mismatch(self, runner, workdir):
        (workdir / "a.csv").write_text("0,1\n")
        (workdir / "b.csv").write_text("0,1\n2,3\n")
        result = runner.invoke(main, ["distance", "a.csv", "b.csv"])
        assert result.exit_code == 2
        assert "mismatch" in result.output

    def test_malformed(self, runner, workdir):
        (workdir / "a.csv").write_text("0,x\n")
        result = runner.invoke(main, ["distance", "a.csv", "a.csv"])
        assert result.exit_code == 2

    def test_missing(self, runner, workdir):
        assert runner.invoke(main, ["distance", "no.csv", "no.csv"]).exit_code == 2


class TestSynth:
    def test_rows(self, runner, workdir):
        result = runner.invoke(main, ["synth", "--n-per-class", "30", "--length", "14",
                                      "--noise", "0.05", "--seed", "1", "--out", "s.csv"])
        assert result.exit_code == 0
        table = load_csv("s.csv")
        assert len(table) == 60
        assert int(table.labels.sum()) == 30
        assert table.features.shape[1] == 14

    def test_byte_identical(self, runner, workdir):
        for name in ("a.csv", "b.csv"):
            runner.invoke(main, ["synth", "--seed", "9", "--out", name])
        assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()

    def test_noiseless_templates(self, runner, workdir):
        runner.invoke(main, ["synth", "--n-per-class", "2", "--length", "3",
                             "--noise", "0", "--out", "s.csv"])
        table = load_csv("s.csv")
        ramps = table.features[table.labels == 1]
        np.testing.assert_array_equal(ramps, [[0.0, 0.5, 1.0]] * 2)

    def test_unwritable(self, runner, workdir):
        result = runner.invoke(main, ["synth", "--out", str(workdir / "no" / "dir.csv")])
        assert result.exit_code == 2

    def test_bad_length(self, runner, workdir):
        assert runner.invoke(main, ["synth", "--length", "1", "--out", "s.csv"]).exit_code == 2


class TestTrain:
    def test_writes_outputs(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data)
        result = runner.invoke(main, ["train", config])
        assert result.exit_code == 0, result.output
        assert "best_E=" in result.output and "generations=" in result.output
        assert "wall time" in result.output
        trace = TrainingTrace.read_csv("trace.csv")
        assert 1 <= len(trace) <= 15
        assert json.loads((workdir / "model.json").read_text())["seed"] == 3

    def test_zero_iterations_rejected(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data)
        result = runner.invoke(main, ["train", config, "--max-iterations", "0"])
        assert result.exit_code == 2

    def test_unknown_key_rejected(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data, popsize=3)
        assert runner.invoke(main, ["train", config]).exit_code == 2

    def test_missing_config(self, runner, workdir):
        assert runner.invoke(main, ["train", "nope.json"]).exit_code == 2

    def test_ga_only_trace(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data, mode="ga_only")
        assert runner.invoke(main, ["train", config]).exit_code == 0
        with open("trace.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert {r["temperature"] for r in rows} == {"0.0"}
        assert {r["sa_accepts"] for r in rows} == {"0"}

    def test_seed_override(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data)
        runner.invoke(main, ["train", config, "--seed", "11"])
        assert json.loads((workdir / "model.json").read_text())["seed"] == 11

    def test_repeats_both_modes(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data, max_iterations=5)
        result = runner.invoke(main, ["train", config, "--mode", "both", "--repeats", "2",
                                      "--summary", "summary"])
        assert result.exit_code == 0, result.output
        for mode in ("ga_sa", "ga_only"):
            for seed in (3, 4):
                assert (workdir / f"model-{mode}-s{seed}.json").exists()
                assert (workdir / f"trace-{mode}-s{seed}.csv").exists()
            assert f"{mode}: mean test_accuracy" in result.output
        with open("summary.csv", newline="") as fh:
            assert len(list(csv.DictReader(fh))) == 4
        assert (workdir / "summary.png").stat().st_size > 0

    def test_numerical_failure_exit_code(self, runner, small_data, workdir, monkeypatch):
        from rbfpnn import network

        def broken(self, batch):
            return np.full(len(np.atleast_2d(batch)), np.nan)

        monkeypatch.setattr(network.PopulationObjective, "evaluate", broken)
        config = write_config(workdir / "run.json", small_data)
        result = runner.invoke(main, ["train", config])
        assert result.exit_code == 3
        assert "generation" in result.output


class TestEvaluate:
    @pytest.fixture
    def trained(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data, max_iterations=30)
        assert runner.invoke(main, ["train", config]).exit_code == 0
        return "model.json"

    def test_report(self, runner, trained, small_data, workdir):
        result = runner.invoke(main, ["evaluate", trained, small_data, "--json", "r.json"])
        assert result.exit_code == 0
        assert "accuracy" in result.output
        report = json.loads((workdir / "r.json").read_text())
        assert report["tp"] + report["tn"] + report["fp"] + report["fn"] == report["total"] == 24
        assert report["accuracy"] == (report["tp"] + report["tn"]) / 24

    def test_flipped_labels(self, runner, trained, small_data, workdir):
        table = load_csv(small_data)
        flipped = type(table)(table.columns, table.label_column, table.features, 1 - table.labels)
        write_csv("flipped.csv", flipped)
        runner.invoke(main, ["evaluate", trained, small_data, "--json", "a.json"])
        runner.invoke(main, ["evaluate", trained, "flipped.csv", "--json", "b.json"])
        a = json.loads((workdir / "a.json").read_text())["accuracy"]
        b = json.loads((workdir / "b.json").read_text())["accuracy"]
        assert b == pytest.approx(1 - a, abs=1e-15)

    def test_length_mismatch(self, runner, trained, workdir):
        write_csv("long.csv", samples_to_table(synth_generate(2, 9, 0.0, np.random.default_rng(0))))
        result = runner.invoke(main, ["evaluate", trained, "long.csv"])
        assert result.exit_code == 2

    def test_bad_model(self, runner, small_data, workdir):
        (workdir / "bad.json").write_text("{}")
        assert runner.invoke(main, ["evaluate", "bad.json", small_data]).exit_code == 2


class TestReport:
    @pytest.fixture
    def traces(self, runner, small_data, workdir):
        config = write_config(workdir / "run.json", small_data, max_iterations=12)
        runner.invoke(main, ["train", config, "--trace-out", "sa.csv"])
        runner.invoke(main, ["train", config, "--mode", "ga_only", "--trace-out", "ga.csv"])
        return ["sa.csv", "ga.csv"]

    def test_single(self, runner, traces, workdir):
        result = runner.invoke(main, ["report", traces[0], "--out", "one", "--no-figure"])
        assert result.exit_code == 0
        table = [line for line in result.output.splitlines() if line.startswith("sa ")]
        assert len(table) == 1
        assert not (workdir / "one.png").exists()

    def test_comparison(self, runner, traces, workdir):
        result = runner.invoke(main, ["report", *traces, "--out", "cmp"])
        assert result.exit_code == 0
        assert (workdir / "cmp.png").stat().st_size > 0
        with open("cmp.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["trace"] + TRACE_HEADER
        total = sum(len(TrainingTrace.read_csv(p)) for p in traces)
        assert len(rows) - 1 == total

    def test_malformed_trace(self, runner, workdir):
        (workdir / "bad.csv").write_text("generation,oops\n1,2\n")
        assert runner.invoke(main, ["report", "bad.csv"]).exit_code == 2

    def test_label_count(self, runner, traces, workdir):
        result = runner.invoke(main, ["report", *traces, "--label", "x"])
        assert result.exit_code == 2


@pytest.mark.parametrize("name", ["synthetic.json", "eeg.json"])
def test_shipped_configs_load(name):
    import os

    from rbfpnn.pipeline import RunConfig

    path = os.path.join(os.path.dirname(__file__), "..", "configs", name)
    config = RunConfig.load(path)
    assert config.trainer.population_size == 25
    assert config.trainer.max_iterations == 1000
    assert config.trainer.error_precision == 0.03
    assert (config.split.train_count, config.split.test_count) == (30, 30)
