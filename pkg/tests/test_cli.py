"""
Tests for the semigraph command-line interface.
"""

import json

import pytest
from typer.testing import CliRunner

from semigraph.cli import app

runner = CliRunner()


@pytest.fixture
def run_config_file(temp_dir):
    path = temp_dir / "tiny.cfg"
    path.write_text(
        "dataset = synthetic\n"
        "synthetic_graphs = 15\n"
        "seeds = 1\n"
        "epochs = 1\n"
        "hidden_dim = 8\n"
        "num_layers = 2\n"
        "num_hidden_graphs = 2\n"
        "hidden_graph_size = 3\n"
        "walk_length = 2\n"
        "batch_size = 8\n"
        "max_degree = 12\n"
    )
    return path


class TestSynthesizeCommand:
    """Test suite for `semigraph synthesize`."""

    def test_writes_tu_files(self, temp_dir):
        result = runner.invoke(app, ["synthesize", str(temp_dir / "data"), "--graphs", "12", "--name", "SYN"])
        assert result.exit_code == 0
        assert (temp_dir / "data" / "SYN_A.txt").exists()
        assert (temp_dir / "data" / "SYN_graph_labels.txt").read_text().count("\n") == 12


@pytest.mark.integration
class TestRunCommand:
    """Test suite for `semigraph run`."""

    def test_run_writes_report(self, run_config_file, temp_dir):
        out = temp_dir / "out"
        result = runner.invoke(
            app, ["run", "--config", str(run_config_file), "--output-dir", str(out), "--log-level", "WARNING"]
        )
        assert result.exit_code == 0, result.output
        assert "Mean accuracy" in result.output
        report = json.loads((out / "report.json").read_text())
        assert report["seeds"] == [1]
        assert (out / "seed_1" / "model.npz").exists()

    def test_override_and_export(self, run_config_file, temp_dir):
        out = temp_dir / "out"
        result = runner.invoke(
            app,
            ["run", "-c", str(run_config_file), "--set", "variant=gk-sup", "--output-dir", str(out),
             "--log-level", "WARNING"],
        )
        assert result.exit_code == 0, result.output
        assert json.loads((out / "report.json").read_text())["variant"] == "gk-sup"

        exported = runner.invoke(
            app, ["export", str(out / "seed_1" / "model.npz"), "--output-dir", str(temp_dir / "dot")]
        )
        assert exported.exit_code == 0, exported.output
        manifest = json.loads((temp_dir / "dot" / "manifest.json").read_text())
        assert len(manifest["hidden_graphs"]) == 2
        assert manifest["hidden_graphs"][0]["role"] == "primary"

    def test_unknown_key(self, run_config_file):
        result = runner.invoke(app, ["run", "-c", str(run_config_file), "--set", "bogus=1"])
        assert result.exit_code == 1

    def test_invalid_value(self, run_config_file):
        result = runner.invoke(app, ["run", "-c", str(run_config_file), "--set", "label_ratio=0"])
        assert result.exit_code == 1


class TestSweepCommand:
    """Test suite for `semigraph sweep` argument handling."""

    def test_unknown_parameter(self):
        assert runner.invoke(app, ["sweep", "dropout", "0.1"]).exit_code == 1

    def test_non_numeric_values(self):
        assert runner.invoke(app, ["sweep", "M", "a,b"]).exit_code == 1


class TestExportCommand:
    """Test suite for `semigraph export` errors."""

    def test_missing_checkpoint(self, temp_dir):
        result = runner.invoke(app, ["export", str(temp_dir / "absent.npz")])
        assert result.exit_code == 1
        assert "not found" in result.output


@pytest.mark.slow
class TestCheckCommand:
    """Test suite for `semigraph check`."""

    def test_quick_checks_pass(self):
        result = runner.invoke(app, ["check", "--quick"])
        assert result.exit_code == 0, result.output
        assert "checks passed" in result.output
