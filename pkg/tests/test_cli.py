"""End-to-end tests of the command-line interface via main()."""

import json
import subprocess
import sys

import numpy as np
import pytest

from bmreg.cli import main
from bmreg.data import Dataset
from bmreg.kernel_regression import bandwidth_rule

FAST_ANNEAL = ["--anneal-steps", "20", "--anneal-cool", "0.5"]


def run_cli(*argv):
    return main(list(argv))


def read(path):
    with open(path) as fh:
        return fh.read()


def strip_runtime_column(csv_text):
    lines = csv_text.strip().splitlines()
    return [",".join(line.split(",")[:-1]) for line in lines]


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def dataset(workdir):
    assert run_cli("generate", "--n", "25", "--seed", "5", "--out", "data.csv") == 0
    return workdir / "data.csv"


class TestGenerate:
    def test_writes_rows_and_summary(self, workdir, capsys):
        assert run_cli("generate", "--n", "7", "--seed", "1", "--out", "d.csv") == 0
        data = Dataset.load_csv(str(workdir / "d.csv"), "circle")
        assert data.n == 7
        assert "7 circle observations" in capsys.readouterr().out

    def test_same_seed_is_byte_identical(self, workdir):
        run_cli("generate", "--n", "9", "--seed", "3", "--out", "a.csv")
        run_cli("generate", "--n", "9", "--seed", "3", "--out", "b.csv")
        assert read(workdir / "a.csv") == read(workdir / "b.csv")

    def test_different_seed_differs(self, workdir):
        run_cli("generate", "--n", "9", "--seed", "3", "--out", "a.csv")
        run_cli("generate", "--n", "9", "--seed", "4", "--out", "b.csv")
        assert read(workdir / "a.csv") != read(workdir / "b.csv")

    def test_n_zero_is_config_error(self, workdir):
        assert run_cli("generate", "--n", "0") == 2

    def test_sphere_dataset(self, workdir):
        assert run_cli("generate", "--manifold", "sphere", "--n", "5", "--out", "s.csv") == 0
        data = Dataset.load_csv(str(workdir / "s.csv"), "sphere")
        assert data.points.shape == (5, 3)


class TestFit:
    def test_ker_prints_bandwidth_rule(self, dataset, capsys):
        assert run_cli("fit", str(dataset), "--method", "ker", "--out", "f.json") == 0
        out = capsys.readouterr().out
        data = Dataset.load_csv(str(dataset), "circle")
        expected = repr(bandwidth_rule(data.ts))
        assert f"bandwidth={expected}" in out
        payload = json.loads(read(dataset.parent / "f.json"))
        assert payload["method"] == "ker"
        assert payload["bandwidth"] == bandwidth_rule(data.ts)
        assert payload["l1_error"] >= 0.0

    def test_dbm_writes_fit_json_and_row(self, dataset, capsys):
        code = run_cli(
            "fit", str(dataset), "--method", "dbm", "--grid-K", "8", "--seed", "2",
            "--out", "f.json", *FAST_ANNEAL,
        )
        assert code == 0
        payload = json.loads(read(dataset.parent / "f.json"))
        assert set(payload) >= {"path", "best_log_posterior", "acceptance_rate", "l1_error", "method"}
        assert np.isfinite(payload["l1_error"])
        rows = read(dataset.parent / "f.csv").strip().splitlines()
        assert rows[0].startswith("run_id,")
        fields = rows[1].split(",")
        assert fields[1] == "dbm"
        assert fields[3] == "8"
        assert "l1_error=" in capsys.readouterr().out

    def test_row_appends_without_duplicate_header(self, dataset):
        for seed in ("2", "3"):
            run_cli("fit", str(dataset), "--method", "ker", "--seed", seed, "--out", "f.json")
        lines = read(dataset.parent / "f.csv").strip().splitlines()
        assert len(lines) == 3
        assert sum(1 for line in lines if line.startswith("run_id,")) == 1

    def test_rate_epsilon_sets_grid(self, dataset):
        code = run_cli(
            "fit", str(dataset), "--method", "dbm", "--rate-epsilon", "0.05",
            "--out", "f.json", *FAST_ANNEAL,
        )
        assert code == 0
        fields = read(dataset.parent / "f.csv").strip().splitlines()[1].split(",")
        # n=25: round(25^0.4) = 4 intervals under the rate rule
        assert fields[3] == "4"

    def test_grid_and_rate_are_exclusive(self, dataset):
        assert run_cli(
            "fit", str(dataset), "--method", "dbm", "--grid-K", "8", "--rate-epsilon", "0.05"
        ) == 2

    def test_unknown_method_is_config_error(self, dataset):
        assert run_cli("fit", str(dataset), "--method", "boost") == 2

    def test_missing_dataset_is_config_error(self, workdir):
        assert run_cli("fit", "nope.csv", "--method", "ker") == 2

    def test_malformed_dataset_is_runtime_failure(self, workdir):
        bad = workdir / "bad.csv"
        bad.write_text("t,coord1\nnot,numbers\n")
        assert run_cli("fit", str(bad), "--method", "ker") == 3


class TestSweep:
    def test_two_values_write_rows(self, workdir, capsys):
        code = run_cli(
            "sweep", "--axis", "c", "--values", "0.05,5.0", "--replicates", "2",
            "--seed", "3", "--out", "sw.csv", *FAST_ANNEAL,
        )
        assert code == 0
        lines = read(workdir / "sw.csv").strip().splitlines()
        assert len(lines) == 5
        out = capsys.readouterr().out
        assert "c=0.05 mean_l1=" in out and "c=5.0 mean_l1=" in out

    def test_pool_size_leaves_bytes_unchanged(self, workdir):
        base = [
            "sweep", "--axis", "c", "--values", "0.05,5.0", "--replicates", "2",
            "--seed", "3", *FAST_ANNEAL,
        ]
        run_cli(*base, "--out", "w1.csv", "--workers", "1")
        run_cli(*base, "--out", "w2.csv", "--workers", "2")
        assert strip_runtime_column(read(workdir / "w1.csv")) == strip_runtime_column(
            read(workdir / "w2.csv")
        )

    def test_single_value_is_config_error(self, workdir):
        assert run_cli("sweep", "--axis", "c", "--values", "0.05") == 2

    def test_bad_axis_is_config_error(self, workdir):
        assert run_cli("sweep", "--axis", "sigma2", "--values", "0.1,0.2") == 2

    def test_missing_axis_is_config_error(self, workdir):
        assert run_cli("sweep", "--values", "0.1,0.2") == 2


class TestContract:
    def test_two_sizes_is_config_error(self, workdir):
        assert run_cli("contract", "--n-values", "50,100") == 2

    def test_missing_sizes_is_config_error(self, workdir):
        assert run_cli("contract") == 2

    def test_bad_size_entry_is_config_error(self, workdir):
        assert run_cli("contract", "--n-values", "50,sixty,70") == 2


class TestCheckKernels:
    def test_clean_run_passes(self, capsys):
        assert run_cli("check-kernels") == 0
        out = capsys.readouterr().out
        assert "7/7 checks passed" in out
        assert "FAIL" not in out
        assert "semigroup" in out

    def test_perturbation_fails_normalization(self, capsys):
        assert run_cli("check-kernels", "--inject-kernel-perturbation", "0.001") == 1
        out = capsys.readouterr().out
        assert "FAIL normalization" in out


class TestConfigFile:
    def test_file_supplies_options(self, workdir):
        (workdir / "cfg.json").write_text(json.dumps({"n": 6, "seed": 11, "out": "c.csv"}))
        assert run_cli("generate", "--config", "cfg.json") == 0
        assert Dataset.load_csv(str(workdir / "c.csv"), "circle").n == 6

    def test_flags_override_file(self, workdir):
        (workdir / "cfg.json").write_text(json.dumps({"n": 6, "seed": 11}))
        assert run_cli("generate", "--config", "cfg.json", "--n", "4", "--out", "c.csv") == 0
        assert Dataset.load_csv(str(workdir / "c.csv"), "circle").n == 4

    def test_unknown_key_is_config_error(self, workdir):
        (workdir / "cfg.json").write_text(json.dumps({"bogus": 1}))
        assert run_cli("generate", "--config", "cfg.json") == 2

    def test_invalid_json_is_config_error(self, workdir):
        (workdir / "cfg.json").write_text("{not json")
        assert run_cli("generate", "--config", "cfg.json") == 2

    def test_missing_config_file_is_config_error(self, workdir):
        assert run_cli("generate", "--config", "nope.json") == 2


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "bmreg.cli", "generate", "--n", "5", "--seed", "1",
             "--out", str(tmp_path / "d.csv")],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "5 circle observations" in proc.stdout

    def test_help_exits_zero(self):
        assert run_cli("--help") == 0

    def test_no_command_is_config_error(self):
        assert run_cli() == 2
