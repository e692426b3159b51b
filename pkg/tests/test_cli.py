"""CLI: config validation, subcommands, exit codes, byte-stable outputs."""

import json
import math

import pytest

from suptail.cli import main
from suptail.heat import SheModel

MODEL = {"hurst": 0.5, "rho": 0.5, "holder_const": 1.0, "init_sup": 1.0, "det_const": 1.0, "alpha": 2.0}
BOX = {"a1": 0.1, "b1": 1.0, "a2": 0.0, "b2": 1.0}


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def run(tmp_path, command, payload, *extra):
    cfg = write_config(tmp_path, payload)
    out = tmp_path / "out"
    return main([command, "--config", cfg, "--out", str(out), *extra]), out


class TestConstants:
    def test_values_match_model(self, tmp_path):
        code, out = run(tmp_path, "constants", {"model": MODEL})
        assert code == 0
        payload = json.loads((out / "constants.json").read_text())
        expected = SheModel(**MODEL).constants()
        for key, val in expected.items():
            assert payload["constants"][key] == pytest.approx(val, rel=1e-12)
        assert "config_hash" in payload
        assert any("beta" in note for note in payload["provenance"]["notes"])

    def test_csv_format(self, tmp_path):
        code, out = run(tmp_path, "constants", {"model": MODEL}, "--format", "csv")
        assert code == 0
        lines = (out / "constants.csv").read_text().splitlines()
        assert lines[0].startswith("# config_hash=")
        assert lines[1] == "name,value"
        assert len(lines) == 2 + len(SheModel(**MODEL).constants())

    def test_invalid_hurst_nonzero_exit(self, tmp_path):
        code, _ = run(tmp_path, "constants", {"model": {**MODEL, "hurst": 0.7}})
        assert code == 1

    def test_unknown_key_rejected(self, tmp_path):
        code, _ = run(tmp_path, "constants", {"model": MODEL, "bogus": 1})
        assert code == 1

    def test_byte_stable(self, tmp_path):
        cfg = write_config(tmp_path, {"model": MODEL})
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["constants", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["constants", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "constants.json").read_bytes() == (out2 / "constants.json").read_bytes()


class TestBoundSup:
    def test_v_field_curve(self, tmp_path):
        payload = {"field": "v", "model": MODEL, "box": BOX, "u_auto": {"count": 8, "max": 2.0}}
        code, out = run(tmp_path, "bound-sup", payload)
        assert code == 0
        data = json.loads((out / "bound_sup.json").read_text())
        rows = data["curve"]
        assert len(rows) == 8
        validities = [r["validity"] for r in rows]
        assert "INVALID" in validities  # the padded low-u entries
        assert "VALID" in validities
        valid_bounds = [r["bound"] for r in rows if r["validity"] == "VALID"]
        assert all(0.0 <= b <= 1.0 for b in valid_bounds)
        assert all(b <= a + 1e-15 for a, b in zip(valid_bounds, valid_bounds[1:]))

    def test_generic_field_fixed_theta(self, tmp_path):
        payload = {
            "field": "generic",
            "fam": 2.0,
            "eps0": 1.0,
            "profile": {"scale": 1.0, "exponent": 1.0},
            "box": {"a1": 0.0, "b1": 1.0, "a2": 0.0, "b2": 1.0},
            "theta": 0.5,
            "u_grid": [10.0, 40.0],
        }
        code, out = run(tmp_path, "bound-sup", payload)
        assert code == 0
        rows = json.loads((out / "bound_sup.json").read_text())["curve"]
        assert rows[0]["validity"] == "INVALID"  # below the theta=0.5 threshold
        z = 20.0 - 4.0 * math.sqrt(0.5) * 4.0
        assert rows[1]["bound"] == pytest.approx(2 * math.exp(-0.5 * z * z), rel=1e-12)

    def test_csv_output(self, tmp_path):
        payload = {"field": "v", "model": MODEL, "box": BOX, "u_grid": [80.0, 100.0]}
        code, out = run(tmp_path, "bound-sup", payload, "--format", "csv")
        assert code == 0
        lines = (out / "bound_sup.csv").read_text().splitlines()
        assert lines[1] == "u,theta,bound,validity"


class TestBoundGrowth:
    def test_envelope_and_series(self, tmp_path):
        payload = {"model": MODEL, "p": 2.0, "halfwidth": 1.0, "u_grid": [900.0, 1500.0]}
        code, out = run(tmp_path, "bound-growth", payload)
        assert code == 0
        data = json.loads((out / "bound_growth.json").read_text())
        model = SheModel(**MODEL)
        target = model.a_h * math.exp(0.25) * (1 + math.pi ** 2 / 6)
        assert data["series"]["c_tilde"] == pytest.approx(target, abs=1e-5)
        assert data["series"]["c_tilde_remainder"] <= 1e-6
        for row in data["curve"]:
            assert row["validity"] == "VALID"
            assert row["optimized_bound"] <= row["envelope_bound"] * (1 + 1e-9)

    def test_divergent_config_errors(self, tmp_path):
        payload = {"model": MODEL, "p": 0.9, "halfwidth": 1.0, "u_grid": [10.0]}
        code, _ = run(tmp_path, "bound-growth", payload)
        assert code == 1


class TestCovering:
    def test_oracle_below_bound(self, tmp_path):
        payload = {
            "box": {"a1": 0.0, "b1": 1.0, "a2": 0.0, "b2": 1.0, "h1": 1.0, "h2": 1.0},
            "eps": 0.5,
            "resolution": 81,
        }
        code, out = run(tmp_path, "covering", payload)
        assert code == 0
        data = json.loads((out / "covering.json").read_text())
        assert data["oracle_count"] <= data["upper_bound"]
        assert data["oracle_leq_bound"] is True


class TestSimulateVerify:
    PAYLOAD = {
        "field": "v",
        "model": MODEL,
        "box": BOX,
        "grid": {"nt": 5, "nx": 5},
        "samples": 400,
        "u_auto": {"count": 6, "max": 1.5},
        "workers": 1,
    }

    def test_small_run_passes(self, tmp_path):
        code, out = run(tmp_path, "simulate-verify", self.PAYLOAD, "--seed", "42")
        assert code == 0
        report = json.loads((out / "verify_report.json").read_text())
        assert report["passed"] is True
        assert report["seed"] == 42
        lines = (out / "verify_curve.csv").read_text().splitlines()
        assert lines[1] == "u,empirical,ci_lo,ci_hi,bound,verdict"
        assert len(lines) == 2 + 6

    def test_seed_required(self, tmp_path):
        code, _ = run(tmp_path, "simulate-verify", self.PAYLOAD)
        assert code == 1

    def test_zero_samples_rejected(self, tmp_path):
        payload = {**self.PAYLOAD, "samples": 0}
        code, _ = run(tmp_path, "simulate-verify", payload, "--seed", "1")
        assert code == 1

    def test_worker_count_byte_identical(self, tmp_path):
        cfg1 = write_config(tmp_path, {**self.PAYLOAD, "workers": 1}, "c1.json")
        cfg3 = write_config(tmp_path, {**self.PAYLOAD, "workers": 3}, "c3.json")
        out1, out3 = tmp_path / "w1", tmp_path / "w3"
        assert main(["simulate-verify", "--config", cfg1, "--out", str(out1), "--seed", "7"]) == 0
        assert main(["simulate-verify", "--config", cfg3, "--out", str(out3), "--seed", "7"]) == 0
        assert (out1 / "verify_curve.csv").read_bytes() == (out3 / "verify_curve.csv").read_bytes()
