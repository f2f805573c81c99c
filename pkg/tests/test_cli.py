"""End-to-end tests of the command-line entry point."""

import json

import numpy as np
import pandas as pd
import pytest

import main
from src.cli import commands


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("NIS_WORKERS", "NIS_LOG_FILE", "NIS_HOUSING_CSV", "NIS_REPS", "NIS_DEBUG"):
        monkeypatch.delenv(name, raising=False)


def run_json(capsys, *argv):
    code = main.main(list(argv))
    assert code == 0
    return json.loads(capsys.readouterr().out)


class TestScreenCommand:
    def test_signal_ranks_first(self, capsys, demo_csv):
        report = run_json(capsys, "screen", "--input", str(demo_csv), "--basis-size", "5")
        assert report["command"] == "screen"
        assert {"version", "schema", "seed", "config"} <= set(report)
        assert report["ranking"][0] == 2
        top = min(report["covariates"], key=lambda c: c["rank"])
        assert top["name"] == "x2"
        assert report["selected"] is None
        assert "timing" not in report

    def test_negative_infinite_threshold_selects_all(self, capsys, demo_csv):
        report = run_json(capsys, "screen", "--input", str(demo_csv), "--threshold=-inf")
        assert report["selected"] == [0, 1, 2, 3, 4]
        assert report["threshold"] == "-inf"

    def test_permutation_selection(self, capsys, demo_csv):
        report = run_json(capsys, "screen", "--input", str(demo_csv), "--basis-size", "5", "--permutation", "--seed", "3")
        assert 2 in report["selected"]
        assert report["provenance"] == {"q": 1}
        assert report["method"] == "nis"
        assert report["selection_rule"] == "permutation"

    def test_repeated_runs_are_byte_identical(self, demo_csv, tmp_path):
        outputs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert main.main(["screen", "--input", str(demo_csv), "--permutation", "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_csv_table(self, demo_csv, tmp_path):
        out = tmp_path / "screen.csv"
        assert main.main(["screen", "--input", str(demo_csv), "--format", "csv", "--out", str(out)]) == 0
        table = pd.read_csv(out)
        assert list(table.columns) == ["index", "name", "u_hat", "v_hat", "rank"]
        assert sorted(table["rank"]) == [1, 2, 3, 4, 5]

    def test_timing_only_on_request(self, capsys, demo_csv):
        report = run_json(capsys, "screen", "--input", str(demo_csv), "--timing")
        assert report["timing"]["seconds"] >= 0
        assert "timing" not in report["config"]

    def test_workers_from_environment(self, capsys, demo_csv, monkeypatch):
        seen = []
        original = commands.screen_all

        def recording(dataset, basis, config=None, *rest, **kwargs):
            seen.append(config.workers)
            return original(dataset, basis, config, *rest, **kwargs)

        monkeypatch.setattr(commands, "screen_all", recording)
        pinned = run_json(capsys, "screen", "--input", str(demo_csv), "--workers", "1")
        monkeypatch.setenv("NIS_WORKERS", "-1")
        from_env = run_json(capsys, "screen", "--input", str(demo_csv))
        assert seen == [1, -1]
        assert from_env == pinned


class TestExitCodes:
    def test_missing_response_column(self, demo_csv):
        assert main.main(["screen", "--input", str(demo_csv), "--response", "price"]) == 3

    def test_invalid_variant(self, demo_csv):
        assert main.main(["inis", "--input", str(demo_csv), "--variant", "forward"]) == 2

    def test_conflicting_selection_flags(self, demo_csv):
        assert main.main(["screen", "--input", str(demo_csv), "--top", "2", "--threshold", "1"]) == 2

    def test_permutation_needs_nis(self, demo_csv):
        assert main.main(["screen", "--input", str(demo_csv), "--method", "sis", "--permutation"]) == 3

    def test_missing_input_file(self, tmp_path):
        assert main.main(["screen", "--input", str(tmp_path / "absent.csv")]) == 3

    def test_bench_without_housing_data(self):
        assert main.main(["bench", "--reps", "1"]) == 3

    def test_invalid_option_value(self, demo_csv):
        assert main.main(["inis", "--input", str(demo_csv), "--K", "-1"]) == 2

    def test_invalid_permutation_count(self, demo_csv):
        assert main.main(["screen", "--input", str(demo_csv), "--permutation", "--num-permutations", "0"]) == 2

    def test_invalid_reps(self):
        assert main.main(["simulate", "--sim", "ex2", "--mode", "mms", "--reps", "0"]) == 2

    def test_numeric_value_error_is_numeric_failure(self, demo_csv, monkeypatch):
        def failing(*args, **kwargs):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setattr(commands, "screen_all", failing)
        assert main.main(["screen", "--input", str(demo_csv)]) == 4

    def test_empty_csv(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert main.main(["screen", "--input", str(empty)]) == 3


class TestInisCommand:
    def test_simulated_run(self, capsys):
        report = run_json(
            capsys, "inis", "--sim", "ex3", "--n", "150", "--p", "30", "--basis-size", "5", "--K", "3", "--seed", "2"
        )
        assert report["true_support"] == [0, 1, 2, 3]
        assert set(report["evaluation"]) == {"tp", "fp", "pe", "size", "mms"}
        assert report["trace"]["termination"] in {"fixed-point", "size-cap", "max-iter"}
        assert set(report["coefficients"]) == {str(j) for j in report["selected"]}
        assert all(len(gamma) == 5 for gamma in report["coefficients"].values())
        assert report["basis"]["num_basis"] == 5

    def test_simulated_run_keeps_true_support(self, capsys):
        report = run_json(capsys, "inis", "--sim", "ex3", "--n", "400", "--p", "100", "--K", "5", "--seed", "7")
        assert set(report["selected"]) >= {0, 1, 2, 3}
        assert report["evaluation"]["tp"] == 4

    def test_pure_noise_selects_little(self, capsys, tmp_path):
        sizes = []
        for seed in range(5):
            rng = np.random.default_rng(seed)
            n, p = 200, 50
            frame = pd.DataFrame(rng.standard_normal((n, p)), columns=[f"x{j}" for j in range(p)])
            frame.insert(0, "w", rng.uniform(size=n))
            frame.insert(0, "y", rng.standard_normal(n))
            path = tmp_path / f"noise{seed}.csv"
            frame.to_csv(path, index=False)
            report = run_json(capsys, "inis", "--input", str(path), "--K", "0", "--q", "1", "--seed", str(seed))
            sizes.append(len(report["selected"]))
        assert sum(size <= 2 for size in sizes) >= 4

    def test_greedy_on_csv(self, capsys, demo_csv):
        report = run_json(capsys, "inis", "--input", str(demo_csv), "--variant", "greedy", "--basis-size", "5", "--zeta", "3")
        assert 2 in report["selected"]
        assert report["selected_names"][report["selected"].index(2)] == "x2"
        assert report["trace"]["initial_set"] == []


class TestSimulateCommand:
    def test_mms_study(self, capsys):
        report = run_json(
            capsys, "simulate", "--sim", "ex2", "--mode", "mms", "--reps", "2",
            "--n", "100", "--p", "20", "--basis-size", "5",
        )
        assert report["reps"] == 2
        assert [row["replicate"] for row in report["replicates"]] == [0, 1]
        (summary,) = report["summary"]
        assert summary["count"] == 2
        assert "mms_nis_median" in summary and "mms_sis_robust_sd" in summary

    def test_permutation_study_groups_by_k(self, capsys):
        report = run_json(
            capsys, "simulate", "--sim", "ex3", "--mode", "permutation", "--reps", "1",
            "--n", "120", "--p", "20", "--basis-size", "5", "--K-list", "0,2",
        )
        assert [row["K"] for row in report["summary"]] == [0, 2]

    def test_reps_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("NIS_REPS", "1")
        report = run_json(
            capsys, "simulate", "--sim", "ex2", "--mode", "mms", "--n", "80", "--p", "10", "--basis-size", "5"
        )
        assert report["reps"] == 1
