import json
import subprocess
import sys

import numpy as np
import pytest

from bidfm import fileio
from bidfm.cli import main
from bidfm.errors import ParseError, ValidationError
from bidfm.model import P2


class TestMatrixFormat:
    def test_round_trip_identity(self, tmp_path):
        path = tmp_path / "m.txt"
        fileio.write_matrix(path, np.eye(3))
        assert np.array_equal(fileio.read_matrix(path), np.eye(3))

    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((5, 7)) * 10.0 ** rng.integers(-8, 8, (5, 7))
        path = tmp_path / "m.txt"
        fileio.write_matrix(path, a)
        back = fileio.read_matrix(path)
        assert back.dtype == a.dtype
        assert np.array_equal(back, a)

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "m.txt"
        fileio.write_matrix(path, np.ones((4, 2)))
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ParseError):
            fileio.read_matrix(path)

    def test_bad_value_reports_line(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 2\n1.0 2.0\n1.0 oops\n")
        with pytest.raises(ParseError, match="line 3"):
            fileio.read_matrix(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("1 2\n1.0 inf\n")
        with pytest.raises(ParseError):
            fileio.read_matrix(path)


class TestEdgeList:
    def test_square_universe(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("a\tb\t2.0\nb\tc\t-1.5\nc\ta\t1.0\n")
        matrix, row_ids, col_ids = fileio.read_edge_list(path)
        assert row_ids == col_ids == ["a", "b", "c"]
        assert matrix[0, 1] == 2.0
        assert matrix[1, 2] == -1.5
        assert matrix[2, 0] == 1.0
        assert matrix.sum() == pytest.approx(1.5)

    def test_duplicates_summed_with_warning(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("a\tb\t1.0\na\tb\t2.5\n")
        with pytest.warns(UserWarning, match="duplicate"):
            matrix, _, _ = fileio.read_edge_list(path)
        assert matrix[0, 1] == 3.5

    def test_header_skipped(self, tmp_path):
        path = tmp_path / "edges.csv"
        path.write_text("source,target,weight\na,b,1.0\n")
        matrix, _, _ = fileio.read_edge_list(path, delimiter=",", header=True)
        assert matrix[0, 1] == 1.0

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("\n")
        with pytest.raises(ParseError):
            fileio.read_edge_list(path)

    def test_separate_universes(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("u1\tm1\t5\nu2\tm1\t3\nu1\tm2\t1\n")
        matrix, row_ids, col_ids = fileio.read_edge_list(
            path, directed_as_bipartite=False
        )
        assert row_ids == ["u1", "u2"]
        assert col_ids == ["m1", "m2"]
        assert matrix.shape == (2, 2)

    def test_bad_weight_reports_line(self, tmp_path):
        path = tmp_path / "edges.tsv"
        path.write_text("a\tb\t1.0\na\tc\tnope\n")
        with pytest.raises(ParseError, match="line 2"):
            fileio.read_edge_list(path)

    def test_generated_matrix_round_trips(self, tmp_path):
        from bidfm.model import P1, BiDFMParams, expected_adjacency, sample_memberships

        params = BiDFMParams(
            sample_memberships(8, 2, 0), sample_memberships(11, 3, 1), P1, 0.7
        )
        omega = expected_adjacency(params)  # fully nonzero, canonical ids
        path = tmp_path / "omega.tsv"
        fileio.write_edge_list(path, omega)
        back, row_ids, col_ids = fileio.read_edge_list(
            path, directed_as_bipartite=False
        )
        assert row_ids == [str(i) for i in range(1, 9)]
        assert col_ids == [str(j) for j in range(1, 12)]
        assert np.array_equal(back, omega)


class TestLabelFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "labels.txt"
        fileio.write_labels(path, ["n1", "n2", "n3"], [2, 1, 2])
        ids, labels = fileio.read_labels(path)
        assert ids == ["n1", "n2", "n3"]
        assert np.array_equal(labels, [2, 1, 2])

    def test_length_mismatch(self, tmp_path):
        with pytest.raises(ValidationError):
            fileio.write_labels(tmp_path / "x.txt", ["a"], [1, 2])


class TestConfigParsing:
    def test_named_mixing(self):
        assert np.array_equal(fileio.mixing_from_config("P2"), P2)

    def test_flat_row_major(self):
        arr = fileio.mixing_from_config([1.0, 0.2, 0.3, 0.3, 0.8, 0.2], 2, 3)
        assert arr.shape == (2, 3)
        assert arr[1, 1] == 0.8

    def test_params_round_trip_through_config(self):
        params = fileio.params_from_config(
            {
                "model": "bidcdfm",
                "n_r": 20,
                "n_c": 30,
                "k_r": 2,
                "k_c": 3,
                "mixing": "P1",
                "rho": 0.5,
                "membership_seed": 5,
                "theta": {"seed": 9, "floor": 0.1},
            }
        )
        assert params.shape == (20, 30)
        assert params.theta_row.min() > np.sqrt(0.5) * 0.1

    def test_explicit_labels(self):
        params = fileio.params_from_config(
            {
                "model": "bidfm",
                "k_r": 2,
                "k_c": 2,
                "mixing": [[1.0, 0.2], [0.3, 0.8]],
                "rho": 0.3,
                "row_labels": [1, 2, 1],
                "col_labels": [2, 1, 2, 1],
            }
        )
        assert np.array_equal(params.row_membership.labels, [1, 2, 1])

    def test_params_config_round_trip(self):
        original = fileio.params_from_config(
            {
                "model": "bidcdfm", "n_r": 10, "n_c": 15, "k_r": 2, "k_c": 3,
                "mixing": "P1", "rho": 0.4, "membership_seed": 8,
            }
        )
        back = fileio.params_from_config(fileio.params_to_config(original))
        assert np.array_equal(
            back.row_membership.labels, original.row_membership.labels
        )
        assert np.array_equal(back.theta_col, original.theta_col)
        assert np.array_equal(back.mixing, original.mixing)

    def test_simulation_config_unknown_key(self):
        with pytest.raises(ValidationError, match="unknown"):
            fileio.simulation_config_from_config({"model": "bidfm", "bogus": 1})

    def test_theory_inputs_unbounded_tau(self):
        inputs = fileio.theory_inputs_from_config(
            {
                "n_r": 10, "n_c": 20, "k_r": 2, "k_c": 2,
                "sigma_min_mixing": 0.5, "gamma": 1.0,
                "n_r_min": 4, "n_r_max": 6, "n_c_min": 9, "n_c_max": 11,
                "rho": 0.5,
            }
        )
        assert np.isinf(inputs.tau)


@pytest.fixture
def model_config(tmp_path):
    config = {
        "model": "bidfm",
        "n_r": 40,
        "n_c": 60,
        "k_r": 2,
        "k_c": 3,
        "mixing": "P1",
        "rho": 0.8,
        "membership_seed": 3,
        "distribution": {"kind": "bernoulli"},
    }
    path = tmp_path / "model.json"
    path.write_text(json.dumps(config))
    return path


class TestCli:
    def test_generate_detect_evaluate_flow(self, tmp_path, model_config, capsys):
        prefix = str(tmp_path / "gen")
        assert main(["generate", "--config", str(model_config),
                     "--seed", "7", "--output", prefix]) == 0
        capsys.readouterr()

        detected = str(tmp_path / "det")
        assert main(["detect", "--input", f"{prefix}_adjacency.txt",
                     "--alg", "bisc", "--kr", "2", "--kc", "3",
                     "--seed", "1", "--output", detected]) == 0
        capsys.readouterr()

        report = tmp_path / "metrics.csv"
        assert main(["evaluate",
                     "--est-rows", f"{detected}_row_labels.txt",
                     "--truth-rows", f"{prefix}_row_labels.txt",
                     "--est-cols", f"{detected}_col_labels.txt",
                     "--truth-cols", f"{prefix}_col_labels.txt",
                     "--output", str(report)]) == 0
        lines = report.read_text().strip().splitlines()
        assert lines[0].startswith("#")
        header, row = lines[1], lines[2]
        assert header.split(",")[0] == "error_rate_r"
        values = [float(v) for v in row.split(",")]
        assert all(0.0 <= v <= 1.0 for v in values)

        ids, labels = fileio.read_labels(f"{detected}_row_labels.txt")
        assert len(ids) == 40
        assert set(labels) <= {1, 2}

    def test_evaluate_identical_labels_zero_error(self, tmp_path, capsys):
        path = tmp_path / "labels.txt"
        fileio.write_labels(path, ["1", "2", "3", "4"], [1, 2, 1, 2])
        assert main(["evaluate", "--est-rows", str(path), "--truth-rows", str(path),
                     "--est-cols", str(path), "--truth-cols", str(path)]) == 0
        out = capsys.readouterr().out
        row = out.strip().splitlines()[2].split(",")
        assert float(row[2]) == 0.0  # combined error rate
        assert float(row[5]) == 1.0  # combined nmi

    def test_simulate_deterministic_output(self, tmp_path, capsys):
        config = {
            "model": "bidfm", "kind": "bernoulli", "mixing": "P1",
            "n_r": 30, "n_c": 45, "rho_grid": [0.6, 0.9],
            "replicates": 2, "algorithms": ["bisc"],
        }
        cfg_path = tmp_path / "sim.json"
        cfg_path.write_text(json.dumps(config))
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", str(cfg_path), "--seed", "5",
                     "--output", str(out1)]) == 0
        assert main(["simulate", "--config", str(cfg_path), "--seed", "5",
                     "--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        lines = out1.read_text().strip().splitlines()
        assert len(lines) == 2 + 2  # header comment + csv header + 2 points

    def test_simulate_preset_smoke(self, tmp_path):
        out = tmp_path / "curve.csv"
        assert main(["simulate", "--preset", "sim1a", "--replicates", "1",
                     "--algorithms", "bisc", "--seed", "7",
                     "--output", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 2 + 10  # ten sparsity values

    def test_simulate_requires_one_source(self, capsys):
        assert main(["simulate"]) == 1

    def test_simulate_honors_config_base_seed(self, tmp_path):
        config = {
            "model": "bidfm", "kind": "bernoulli", "mixing": "P1",
            "n_r": 30, "n_c": 45, "rho_grid": [0.8], "replicates": 2,
            "algorithms": ["bisc"], "base_seed": 123,
        }
        cfg_path = tmp_path / "sim.json"
        cfg_path.write_text(json.dumps(config))
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", str(cfg_path),
                     "--output", str(out1)]) == 0
        assert main(["simulate", "--config", str(cfg_path), "--seed", "123",
                     "--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_estimate_k(self, tmp_path, model_config, capsys):
        prefix = str(tmp_path / "gen")
        main(["generate", "--config", str(model_config), "--output", prefix])
        capsys.readouterr()
        assert main(["estimate-k", "--input", f"{prefix}_omega.txt",
                     "--m", "6", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["k_suggestion"] == 2
        assert len(payload["singular_values"]) == 6

    def test_preprocess(self, tmp_path, capsys):
        a = np.ones((4, 4))
        a[2, :] = 0.0
        a[:, 2] = 0.0
        src = tmp_path / "a.txt"
        fileio.write_matrix(src, a)
        prefix = str(tmp_path / "filtered")
        assert main(["preprocess", "--input", str(src), "--mode", "both-or",
                     "--output", prefix]) == 0
        capsys.readouterr()
        filtered = fileio.read_matrix(f"{prefix}_matrix.txt")
        assert filtered.shape == (3, 3)
        indices = json.loads((tmp_path / "filtered_indices.json").read_text())
        assert indices["zero_degree_both"] == [3]

    def test_theory_subcommand(self, tmp_path, capsys):
        config = {
            "model": "bidfm",
            "c_alpha": 1.0,
            "inputs": {
                "n_r": 200, "n_c": 300, "k_r": 2, "k_c": 3,
                "sigma_min_mixing": 0.5, "gamma": 1.0, "tau": 1.0,
                "n_r_min": 90, "n_r_max": 110, "n_c_min": 95, "n_c_max": 105,
                "rho": 0.5, "delta_c": 0.2,
            },
        }
        path = tmp_path / "theory.json"
        path.write_text(json.dumps(config))
        assert main(["theory", "--config", str(path), "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["assumption_holds"] is True
        assert payload["spectral_deviation_bound"] > 0

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1
        assert main([]) == 1
        assert main(["detect", "--input", "x", "--alg", "warp",
                     "--kr", "2", "--kc", "2"]) == 1

    def test_missing_file_is_data_error(self, capsys, tmp_path):
        assert main(["detect", "--input", str(tmp_path / "nope.txt"),
                     "--alg", "bisc", "--kr", "2", "--kc", "2"]) == 2

    def test_bad_matrix_is_data_error(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n1 2\n")
        assert main(["estimate-k", "--input", str(path)]) == 2

    def test_module_entry_point(self, tmp_path, model_config):
        prefix = str(tmp_path / "sub")
        result = subprocess.run(
            [sys.executable, "-m", "bidfm", "generate",
             "--config", str(model_config), "--output", prefix],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert (tmp_path / "sub_omega.txt").exists()
