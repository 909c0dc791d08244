import csv
import io
import json

import pytest

from qdp.cli_report import REFERENCE_RESULTS, load_benchmark_config, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def small_pricing_config(tmp_path, paths=2000):
    doc = {
        "model": {
            "r": 0.02, "sigmas": [0.3], "rho": [[1.0]], "dt": 1.0 / 3.0,
            "T": 3, "s0": [1.0],
        },
        "contract": {
            "type": "autocallable",
            "binaries": [[1.1, 1.0 / 3.0, 2.0], [1.1, 2.0 / 3.0, 4.0], [1.1, 1.0, 6.0]],
            "k_put": 1.0, "barrier": 0.7, "notional": 18.0,
            "barrier_dates": [1.0 / 3.0, 2.0 / 3.0, 1.0],
        },
        "grid": {"n": 3, "w": 5.0},
        "paths": paths,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestBenchmarkConfigs:
    def test_autocallable_shape(self, autocall_config):
        model = autocall_config["model"]
        assert model["T"] == 20
        assert len(model["sigmas"]) == 3
        assert model["dt"] == pytest.approx(0.05)
        assert len(autocall_config["contract"]["binaries"]) == 5
        assert len(autocall_config["contract"]["barrier_dates"]) == 20

    def test_tarf_shape(self, tarf_config):
        model = tarf_config["model"]
        assert model["T"] == 26
        assert model["sigmas"] == [0.4]
        assert len(tarf_config["contract"]["payment_times"]) == 26

    def test_unknown_benchmark_rejected(self):
        with pytest.raises(KeyError):
            load_benchmark_config("swaption")


class TestPricingCommands:
    def test_price_mc_json(self, tmp_path, capsys):
        config = small_pricing_config(tmp_path)
        code, out, err = run_cli(capsys, "price-mc", "--config", config, "--seed", "3")
        assert code == 0, err
        doc = json.loads(out)
        assert set(doc) >= {"estimate", "stderr", "paths", "seed", "config_sha256"}
        assert doc["paths"] == 2000
        assert doc["seed"] == 3

    def test_price_mc_deterministic(self, tmp_path, capsys):
        config = small_pricing_config(tmp_path)
        _, out1, _ = run_cli(capsys, "price-mc", "--config", config, "--seed", "1")
        _, out2, _ = run_cli(capsys, "price-mc", "--config", config, "--seed", "1")
        assert out1 == out2

    def test_price_exact(self, tmp_path, capsys):
        config = small_pricing_config(tmp_path)
        code, out, err = run_cli(capsys, "price-exact", "--config", config)
        assert code == 0, err
        doc = json.loads(out)
        assert doc["lattice_size"] == 8**3
        assert 0.9 <= doc["total_mass"] <= 1.0

    def test_config_required(self, capsys):
        code, _, err = run_cli(capsys, "price-mc")
        assert code == 2
        assert "error:" in err

    def test_malformed_config(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run_cli(capsys, "price-mc", "--config", str(bad))
        assert code == 2
        assert "error:" in err

    def test_missing_key_reported(self, tmp_path, capsys):
        incomplete = tmp_path / "incomplete.json"
        incomplete.write_text(json.dumps({"model": {
            "r": 0.0, "sigmas": [0.2], "rho": [[1.0]], "dt": 1.0, "T": 1, "s0": [1.0],
        }}))
        code, _, err = run_cli(capsys, "price-mc", "--config", str(incomplete))
        assert code == 2
        assert "contract" in err


class TestEstimatorCommands:
    def test_estimate_resources_benchmark(self, tmp_path, capsys):
        import importlib.resources as ir

        text = ir.files("qdp.configs").joinpath("autocallable_benchmark.json").read_text()
        config = tmp_path / "bench.json"
        config.write_text(text)
        code, out, err = run_cli(capsys, "estimate-resources", "--config", str(config))
        assert code == 0, err
        doc = json.loads(out)
        assert doc["method"] == "reparam"
        assert doc["feasible"] is True
        assert doc["total_t_depth"] > 0
        assert len(doc["loading_breakdown"]) > 0

    def test_error_budget_command(self, tmp_path, capsys):
        import importlib.resources as ir

        text = ir.files("qdp.configs").joinpath("tarf_benchmark.json").read_text()
        config = tmp_path / "bench.json"
        config.write_text(text)
        code, out, err = run_cli(capsys, "error-budget", "--config", str(config))
        assert code == 0, err
        doc = json.loads(out)
        assert set(doc) >= {"eps_trunc", "eps_disc", "eps_arith", "eps_amp", "scale"}
        assert doc["eps_trunc"] + doc["eps_disc"] + doc["eps_arith"] < 2e-3

    def test_qarith_csv(self, capsys):
        code, out, err = run_cli(capsys, "qarith", "--format", "csv")
        assert code == 0, err
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) > 5
        assert {"n", "toffoli_count", "t_depth"} <= set(rows[0])

    def test_table1_rows(self, capsys):
        code, out, err = run_cli(capsys, "table1")
        assert code == 0, err
        doc = json.loads(out)
        rows = {(r["method"], r["contract"]): r for r in doc["rows"]}
        assert set(rows) == set(REFERENCE_RESULTS)
        for key, row in rows.items():
            ref_depth = REFERENCE_RESULTS[key][1]
            if key[0] == "riemann":
                assert row["feasible"] is False
            else:
                assert row["feasible"] is True
                assert ref_depth / 2 <= row["t_depth"] <= ref_depth * 2

    def test_iqae_demo_quick(self, tmp_path, capsys):
        config = tmp_path / "iqae.json"
        config.write_text(json.dumps({"epsilons": [1e-2], "n_seeds": 5}))
        code, out, err = run_cli(capsys, "iqae-demo", "--config", str(config))
        assert code == 0, err
        doc = json.loads(out)
        assert len(doc["rows"]) == 1
        assert doc["rows"][0]["calls_quantum"] > 0


class TestOutputHandling:
    def test_out_file_and_env_dir(self, tmp_path, capsys, monkeypatch):
        config = small_pricing_config(tmp_path)
        monkeypatch.setenv("QDP_OUT_DIR", str(tmp_path))
        code, out, err = run_cli(
            capsys, "price-mc", "--config", config, "--out", "report.json"
        )
        assert code == 0, err
        doc = json.loads((tmp_path / "report.json").read_text())
        assert "estimate" in doc

    def test_csv_format_of_scalar_report(self, tmp_path, capsys):
        config = small_pricing_config(tmp_path)
        code, out, err = run_cli(
            capsys, "price-mc", "--config", config, "--format", "csv"
        )
        assert code == 0, err
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 1
        assert "estimate" in rows[0]
