import csv
import io
import json

import pytest

from main import main
from src.cli import parse_grid
from src.cli.common import load_dataset
from src.core.errors import ConfigError
from src.core.schema import RunConfig

TOY_CONFIG = {
    "data": {"classes": 3, "channels": 6, "steps": 20, "spikes_per_pattern": 3, "max_lag": 5,
             "train_samples": 12, "test_samples": 6},
    "model": {"layers": 1, "hidden": 8, "d_max": 4, "dropout": 0.0},
    "train": {"epochs": 2, "batch_size": 6},
}


def cli(*argv):
    return main([*argv, "--log-file", ""])


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def toy_config(tmp_path):
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(TOY_CONFIG), encoding="utf-8")
    return str(path)


@pytest.fixture
def toy_data(tmp_path, toy_config):
    out_dir = tmp_path / "data"
    assert cli("gen-data", "--config", toy_config, "--out-dir", str(out_dir)) == 0
    return str(out_dir / "train.evt"), str(out_dir / "test.evt")


@pytest.fixture
def trained(tmp_path, toy_config, toy_data):
    run_dir = tmp_path / "run"
    code = cli("train", "--config", toy_config, "--data", toy_data[0], "--test-data", toy_data[1],
               "--out-dir", str(run_dir))
    assert code == 0
    return run_dir


class TestCost:
    def test_default_table(self, capsys):
        assert cli("cost") == 0
        rows = read_csv(capsys.readouterr().out)
        assert len(rows) == 6
        axonal = next(r for r in rows if (r["mechanism"], r["strategy"]) == ("axonal", "unshared"))
        assert axonal["total_bits"] == "47616"

    def test_json_output(self, capsys):
        assert cli("cost", "--hidden", "8", "--layers", "1", "--format", "json") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema_version"] == 1
        assert len(doc["rows"]) == 6

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "cost.csv"
        assert cli("cost", "--out", str(out)) == 0
        assert capsys.readouterr().out == ""
        assert "47616" in out.read_text(encoding="utf-8")

    def test_invalid_flags(self):
        assert cli("cost", "--rho-p", "1.5") == 2

    def test_table_format(self, capsys):
        assert cli("cost", "--hidden", "8", "--layers", "1", "--format", "table") == 0
        assert capsys.readouterr().out.strip()


class TestUsage:
    def test_unknown_command(self):
        with pytest.raises(SystemExit) as info:
            cli("fly")
        assert info.value.code == 1

    def test_empty_grid(self):
        assert cli("sweep", "delay_range", "--grid", "") == 1

    def test_bad_grid_entry(self):
        assert cli("sweep", "sparsity", "--grid", "rho=0,1") == 1

    def test_sparsity_grid_is_a_product(self):
        points = parse_grid("sparsity", "eta=0,0.8;kappa=0,0.6")
        assert len(points) == 4
        assert {"eta": 0.8, "kappa": 0.6} in points


class TestConfigErrors:
    def test_missing_data_file(self, tmp_path, toy_config):
        missing = str(tmp_path / "nope.evt")
        assert cli("train", "--config", toy_config, "--data", missing, "--out-dir", str(tmp_path / "r")) == 2
        with pytest.raises(ConfigError, match="nope.evt"):
            load_dataset(missing, RunConfig())

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"model": {"beta": 1.5}}), encoding="utf-8")
        assert cli("train", "--config", str(path), "--out-dir", str(tmp_path / "r")) == 2

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"model": {"hiden": 4}}), encoding="utf-8")
        assert cli("cost", "--config", str(path)) == 0  # cost ignores the document
        assert cli("gen-data", "--config", str(path), "--out-dir", str(tmp_path / "d")) == 2

    def test_corrupted_checkpoint(self, tmp_path):
        path = tmp_path / "broken.pt"
        path.write_bytes(b"garbage")
        assert cli("eval", str(path)) == 3


class TestWorkflow:
    def test_gen_data(self, tmp_path, toy_config, capsys):
        assert cli("gen-data", "--config", toy_config, "--out-dir", str(tmp_path / "d")) == 0
        rows = read_csv(capsys.readouterr().out)
        assert [(r["split"], r["samples"]) for r in rows] == [("train", "12"), ("test", "6")]

    def test_train_writes_artifacts(self, trained, capsys):
        for name in ("checkpoint.pt", "metrics.csv", "config.resolved.json"):
            assert (trained / name).exists()
        rows = read_csv((trained / "metrics.csv").read_text(encoding="utf-8"))
        assert [(r["epoch"], r["split"]) for r in rows] == [("0", "train"), ("0", "test"), ("1", "train"),
                                                            ("1", "test")]
        snapshot = json.loads((trained / "config.resolved.json").read_text(encoding="utf-8"))
        assert snapshot["model"]["input_channels"] == 6

    def test_training_is_reproducible(self, tmp_path, toy_config, toy_data):
        outputs = []
        for name in ("a", "b"):
            run_dir = tmp_path / name
            assert cli("train", "--config", toy_config, "--data", toy_data[0], "--test-data", toy_data[1],
                       "--out-dir", str(run_dir)) == 0
            outputs.append((run_dir / "metrics.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_eval(self, trained, toy_data, capsys):
        capsys.readouterr()
        assert cli("eval", str(trained / "checkpoint.pt"), "--data", toy_data[1]) == 0
        (row,) = read_csv(capsys.readouterr().out)
        assert row["samples"] == "6"
        assert row["mechanism"] == "axonal"
        assert 0.0 <= float(row["accuracy"]) <= 1.0

    def test_events(self, tmp_path, trained, toy_data, capsys):
        capsys.readouterr()
        spikes_out = tmp_path / "out.evt"
        code = cli("events", str(trained / "checkpoint.pt"), "--data", toy_data[1], "--samples", "3",
                   "--spikes-out", str(spikes_out))
        assert code == 0
        rows = read_csv(capsys.readouterr().out)
        assert {r["strategy"] for r in rows} == {"unshared", "shared"}
        assert all(r["equivalent"] == "True" for r in rows)
        assert spikes_out.exists()

    def test_events_input_width_mismatch(self, tmp_path, trained):
        wide = dict(TOY_CONFIG, data=dict(TOY_CONFIG["data"], channels=9))
        path = tmp_path / "wide.json"
        path.write_text(json.dumps(wide), encoding="utf-8")
        assert cli("events", str(trained / "checkpoint.pt"), "--config", str(path)) == 3


class TestSweep:
    def test_resume_skips_finished_cells(self, tmp_path, toy_config, monkeypatch, capsys):
        out_dir = tmp_path / "sweep"
        args = ("sweep", "delay_range", "--grid", "2,4", "--seeds", "2", "--config", toy_config,
                "--out-dir", str(out_dir))
        assert cli(*args) == 0
        first = (out_dir / "sweep.csv").read_bytes()
        progress = json.loads((out_dir / "progress.json").read_text(encoding="utf-8"))
        assert sum(1 for cell in progress["cells"].values() if cell["status"] == "done") == 4

        def fail(task):
            raise AssertionError("finished cell was rerun")

        monkeypatch.setattr("src.cli.sweep.run_cell", fail)
        assert cli(*args) == 0
        assert (out_dir / "sweep.csv").read_bytes() == first
        rows = read_csv(first.decode("utf-8"))
        assert [r["d_max"] for r in rows] == ["2", "4"]
        assert all(r["seeds"] == "2" and r["status"] == "ok" for r in rows)

    def test_failed_cells_exit_with_runtime_error(self, tmp_path, toy_config):
        # d_max = 0 fails validation inside the cell
        code = cli("sweep", "delay_range", "--grid", "0", "--config", toy_config, "--out-dir", str(tmp_path / "s"))
        assert code == 3
