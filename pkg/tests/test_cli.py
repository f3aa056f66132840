"""End-to-end tests of the command-line interface."""

import json

import numpy as np
import pytest

from wasserfcm import FuzzyVector, vector_distance_sq
from wasserfcm.cli import main
from wasserfcm.datafiles import read_dataset, read_transformed, write_dataset


@pytest.fixture
def dataset_path(tmp_path):
    rng = np.random.default_rng(91)
    n, p = 20, 2
    centers = np.column_stack([
        np.concatenate([rng.uniform(0, 1, 10), rng.uniform(4, 5, 10)]),
        rng.uniform(0, 1, n)])
    rows = np.stack([centers, rng.uniform(0, 1, (n, p)),
                     rng.uniform(0, 1, (n, p))], axis=-1).reshape(n, -1)
    vectors = [FuzzyVector.from_array(row) for row in rows]
    path = tmp_path / "data.csv"
    write_dataset(path, vectors)
    return path


@pytest.fixture
def run_config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[run]\nclusters = 2\nseed = 5\nepsilon = 1e-9\n")
    return path


def scenario_config(tmp_path, reps=2):
    path = tmp_path / "sim.ini"
    path.write_text(
        f"[scenario:clean]\ncase = alpha\nn = 20\np = 2\n"
        f"replications = {reps}\nseed = 17\n"
        f"[scenario:noisy]\ncase = beta\noutliers = true\nn = 40\np = 2\n"
        f"replications = {reps}\nseed = 18\n")
    return path


class TestCluster:
    def test_writes_all_outputs(self, tmp_path, dataset_path, run_config,
                                capsys):
        out = tmp_path / "out"
        assert main(["cluster", "--data", str(dataset_path), "--config",
                     str(run_config), "--out", str(out)]) == 0
        protos, _, names = read_dataset(out / "prototypes.csv")
        assert len(protos) == 2 and names == ["x1", "x2"]
        memberships = np.loadtxt(out / "memberships.csv", delimiter=",",
                                 skiprows=1)
        assert memberships.shape == (20, 2)
        np.testing.assert_allclose(memberships.sum(axis=1), 1.0, atol=1e-12)
        weights = np.loadtxt(out / "weights.csv", skiprows=1)
        assert weights.sum() == pytest.approx(200.0, rel=1e-9)
        summary = json.loads((out / "summary.json").read_text())
        assert summary["converged"] is True
        assert summary["final_objective"] == summary["objective_trace"][-1]
        assert "cluster:" in capsys.readouterr().out

    def test_single_cluster_prototype_is_weighted_mean(self, tmp_path,
                                                       dataset_path):
        cfg = tmp_path / "one.ini"
        cfg.write_text("[run]\nclusters = 1\n")
        out = tmp_path / "one_out"
        assert main(["cluster", "--data", str(dataset_path), "--config",
                     str(cfg), "--out", str(out)]) == 0
        protos, _, _ = read_dataset(out / "prototypes.csv")
        data, _, _ = read_dataset(dataset_path)
        weights = np.loadtxt(out / "weights.csv", skiprows=1)
        coef = weights ** -1.0  # q defaults to 1
        raw = np.vstack([v.to_array() for v in data])
        np.testing.assert_allclose(protos[0].to_array(),
                                   coef @ raw / coef.sum(), rtol=1e-9)

    def test_engines_report_matching_objective(self, tmp_path, dataset_path):
        finals = {}
        for engine in ("approach1", "approach2"):
            cfg = tmp_path / f"{engine}.ini"
            cfg.write_text(f"[run]\nclusters = 2\nseed = 5\n"
                           f"epsilon = 1e-9\nengine = {engine}\n")
            out = tmp_path / f"out_{engine}"
            assert main(["cluster", "--data", str(dataset_path), "--config",
                         str(cfg), "--out", str(out)]) == 0
            summary = json.loads((out / "summary.json").read_text())
            finals[engine] = summary["final_objective"]
        assert finals["approach1"] == pytest.approx(finals["approach2"],
                                                    rel=1e-6)

    def test_missing_dataset_fails_without_outputs(self, tmp_path, run_config,
                                                   capsys):
        out = tmp_path / "never"
        code = main(["cluster", "--data", str(tmp_path / "nope.csv"),
                     "--config", str(run_config), "--out", str(out)])
        assert code == 1
        assert not out.exists()
        assert "error:" in capsys.readouterr().err


class TestTransform:
    def test_roundtrip_recovers_input(self, tmp_path, dataset_path):
        crisp = tmp_path / "crisp.csv"
        back = tmp_path / "back.csv"
        assert main(["transform", "--data", str(dataset_path), "--out",
                     str(crisp)]) == 0
        assert main(["transform", "--data", str(crisp), "--out", str(back),
                     "--inverse"]) == 0
        original, _, _ = read_dataset(dataset_path)
        recovered, _, _ = read_dataset(back)
        for a, b in zip(original, recovered):
            np.testing.assert_allclose(b.to_array(), a.to_array(), atol=1e-12)

    def test_output_distances_match_fuzzy_distances(self, tmp_path,
                                                    dataset_path):
        crisp = tmp_path / "crisp.csv"
        main(["transform", "--data", str(dataset_path), "--out", str(crisp)])
        matrix, _ = read_transformed(crisp)
        vectors, _, _ = read_dataset(dataset_path)
        rng = np.random.default_rng(92)
        for _ in range(100):
            i, j = rng.integers(0, len(vectors), 2)
            euclid = float(np.sum((matrix[i] - matrix[j]) ** 2))
            assert euclid == pytest.approx(
                vector_distance_sq(vectors[i], vectors[j]),
                rel=1e-9, abs=1e-12)

    def test_zero_dataset(self, tmp_path):
        src = tmp_path / "zeros.csv"
        write_dataset(src, [FuzzyVector.from_array([0.0, 0.0, 0.0])] * 3)
        crisp = tmp_path / "crisp.csv"
        main(["transform", "--data", str(src), "--out", str(crisp)])
        matrix, _ = read_transformed(crisp)
        np.testing.assert_array_equal(matrix, 0.0)


class TestSimulate:
    def test_deterministic_outputs(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WASSERFCM_JOBS", "1")
        cfg = scenario_config(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", str(cfg), "--out", str(out1),
                     "--raw"]) == 0
        assert main(["simulate", "--config", str(cfg), "--out", str(out2),
                     "--raw"]) == 0
        for name in ("report.csv", "raw_clean.csv", "raw_noisy.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_report_reaggregates_raw(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WASSERFCM_JOBS", "1")
        cfg = scenario_config(tmp_path)
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--raw"]) == 0
        summary = tmp_path / "summary.csv"
        assert main(["report", "--raw", str(out), "--out",
                     str(summary)]) == 0
        agg_lines = (out / "report.csv").read_text().splitlines()
        rep_lines = summary.read_text().splitlines()
        # metric columns of the re-aggregation match the simulate aggregate
        agg = {row.split(",")[0]: row.split(",")[-7:]
               for row in agg_lines[1:]}
        rep = {row.split(",")[0]: row.split(",")[-7:]
               for row in rep_lines[1:]}
        assert agg == rep

    def test_parallel_matches_serial(self, tmp_path, monkeypatch):
        cfg = scenario_config(tmp_path)
        monkeypatch.setenv("WASSERFCM_JOBS", "1")
        serial = tmp_path / "serial"
        main(["simulate", "--config", str(cfg), "--out", str(serial)])
        monkeypatch.setenv("WASSERFCM_JOBS", "2")
        parallel = tmp_path / "parallel"
        main(["simulate", "--config", str(cfg), "--out", str(parallel)])
        assert (serial / "report.csv").read_bytes() == \
            (parallel / "report.csv").read_bytes()

    def test_plots_written(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WASSERFCM_JOBS", "1")
        cfg = scenario_config(tmp_path, reps=1)
        out = tmp_path / "plots"
        assert main(["simulate", "--config", str(cfg), "--out", str(out),
                     "--plots"]) == 0
        for name in ("clean_memberships.png", "clean_weights.png",
                     "clean_prototypes.png"):
            assert (out / name).stat().st_size > 0

    def test_scenario_failure_continues_and_flags_exit(self, tmp_path,
                                                       monkeypatch, capsys):
        monkeypatch.setenv("WASSERFCM_JOBS", "1")
        cfg = tmp_path / "sim.ini"
        cfg.write_text(
            "[scenario:bad]\ncase = alpha\nn = 6\np = 2\nclusters = 6\n"
            "[scenario:good]\ncase = alpha\nn = 20\np = 2\nseed = 1\n")
        out = tmp_path / "mixed"
        assert main(["simulate", "--config", str(cfg), "--out",
                     str(out)]) == 1
        err = capsys.readouterr().err
        assert "scenario bad" in err
        report = (out / "report.csv").read_text()
        assert "good" in report and "bad" not in report

    def test_bad_jobs_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("WASSERFCM_JOBS", "0")
        cfg = scenario_config(tmp_path)
        assert main(["simulate", "--config", str(cfg), "--out",
                     str(tmp_path / "x")]) == 1
        assert "WASSERFCM_JOBS" in capsys.readouterr().err


class TestReport:
    def test_missing_raw_dir_fails(self, tmp_path, capsys):
        code = main(["report", "--raw", str(tmp_path), "--out",
                     str(tmp_path / "s.csv")])
        assert code == 1
        assert "raw_*.csv" in capsys.readouterr().err
