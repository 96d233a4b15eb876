import json

import pytest

from seqchaos.cli import list_experiments, main, run_config


def run_tmp(tmp_path, cfg, name="cfg.json", extra_args=()):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    status = main(["run", str(path), "--out", str(out), *extra_args])
    return status, out


BASE_CONFIGS = {
    "ConditionStarProfile": {
        "kind": "ConditionStarProfile",
        "sequence": {"family": "Naturals"},
        "max_gap": 1,
        "checkpoints": [10, 100],
        "require_decreasing": True,
    },
    "VeryGoodDeviation": {
        "kind": "VeryGoodDeviation",
        "system": {"kind": "Rotation", "alpha": "golden"},
        "observable": {"kind": "TrigOnRotation", "frequency": 1, "component": "cos"},
        "sequence": {"family": "Naturals"},
        "n_terms": 2000,
        "samples": 3,
        "tolerance": 0.05,
    },
    "DisintegrationConsistency": {
        "kind": "DisintegrationConsistency",
        "system": {"kind": "FullShift", "weights": ["1/2", "1/2"]},
        "observable": {"kind": "CylinderIndicator", "constraints": {"0": 0}},
        "sequence": {"family": "Primes"},
        "n_terms": 500,
        "samples": 40,
        "tolerance": 0.05,
    },
    "TupleScan": {
        "kind": "TupleScan",
        "system": {"kind": "FullShift", "weights": ["1/2", "1/2"]},
        "sequence": {"family": "Naturals"},
        "tuple_size": 2,
        "tuples": 5,
        "n_terms": 500,
        "min_average_floor": 0.3,
    },
    "ScrambledBuildVerify": {
        "kind": "ScrambledBuildVerify",
        "sequence": {"family": "Primes"},
        "tuple_size": 2,
        "growth": 4,
        "phase_pairs": 2,
        "window": 16,
    },
    "FiberConstancy": {
        "kind": "FiberConstancy",
        "weights": ["1/2", "1/2"],
        "alpha": "1/2",
        "thetas": ["0", "1/3"],
        "observable": {
            "kind": "ProductOf",
            "factors": [
                {"kind": "CylinderIndicator", "constraints": {"0": 0}},
                {"kind": "TrigOnRotation", "frequency": 1, "component": "cos"},
            ],
        },
        "sequence": {"family": "PolynomialFloor", "coefficients": [0, 2]},
        "n_terms": 1000,
        "samples": 20,
        "max_dispersion": 0.2,
        "expected_means": [0.5, -0.25],
        "mean_tolerance": 0.1,
    },
    "KolmogorovCheck": {
        "kind": "KolmogorovCheck",
        "weights": ["1/2", "1/2"],
        "observable": {"kind": "CylinderIndicator", "constraints": {"0": 0}},
        "sequence": {"family": "Primes"},
        "n_terms": 1000,
        "samples": 20,
        "tolerance": 0.1,
    },
    "LacunaryContrast": {
        "kind": "LacunaryContrast",
        "weights": ["1/2", "1/2"],
        "observable": {"kind": "CylinderIndicator", "constraints": {"0": 0}},
        "good_sequence": {"family": "Naturals"},
        "lacunary_sequence": {"family": "Lacunary", "base": 2},
        "matched_terms": 30,
        "samples": 40,
        "extended_terms": 2000,
        "max_extended_dispersion": 0.1,
    },
}


def test_list_is_stable_and_complete(capsys):
    assert main(["list"]) == 0
    first = capsys.readouterr().out
    assert main(["list"]) == 0
    second = capsys.readouterr().out
    assert first == second
    for kind in BASE_CONFIGS:
        assert kind in first
    assert first.count("\n  ".replace("\n", "\n")) >= 8
    assert list_experiments() == list_experiments()


@pytest.mark.parametrize("kind", sorted(BASE_CONFIGS))
def test_every_kind_runs_with_minimal_config(tmp_path, kind):
    status, out = run_tmp(tmp_path, BASE_CONFIGS[kind])
    assert status == 0
    assert (out / "manifest.json").exists()
    assert (out / "result.json").exists()
    assert (out / "summary.json").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] is True
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["tool"] == "seqchaos"
    assert manifest["config"]["kind"] == kind
    assert manifest["config"]["seed"] == 0  # default echoed


def test_rerun_is_byte_identical(tmp_path):
    cfg = BASE_CONFIGS["ScrambledBuildVerify"]
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(p), "--out", str(out1)]) == 0
    assert main(["run", str(p), "--out", str(out2)]) == 0
    for name in ("manifest.json", "result.json", "result.csv", "summary.json", "certificate.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_workers_do_not_change_outputs(tmp_path):
    cfg = BASE_CONFIGS["KolmogorovCheck"]
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    assert main(["run", str(p), "--out", str(out1), "--workers", "1"]) == 0
    assert main(["run", str(p), "--out", str(out2), "--workers", "2"]) == 0
    for name in ("manifest.json", "result.json", "result.csv", "summary.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_seed_flag_overrides_config(tmp_path):
    cfg = dict(BASE_CONFIGS["TupleScan"], seed=5)
    status1, out1 = run_tmp(tmp_path, cfg, name="a.json")
    r1 = (out1 / "result.json").read_text()
    m1 = json.loads((out1 / "manifest.json").read_text())
    assert m1["config"]["seed"] == 5
    cfg_dir2 = tmp_path / "two"
    cfg_dir2.mkdir()
    status2, out2 = run_tmp(cfg_dir2, cfg, name="b.json", extra_args=("--seed", "6"))
    assert status1 == status2 == 0
    assert json.loads((out2 / "manifest.json").read_text())["config"]["seed"] == 6
    assert (out2 / "result.json").read_text() != r1


def test_invalid_negative_parameter_is_status_2(tmp_path):
    cfg = dict(BASE_CONFIGS["TupleScan"], n_terms=-4)
    status, _ = run_tmp(tmp_path, cfg)
    assert status == 2


def test_unknown_key_is_status_2(tmp_path):
    cfg = dict(BASE_CONFIGS["TupleScan"], bogus=1)
    status, _ = run_tmp(tmp_path, cfg)
    assert status == 2


def test_unknown_nested_key_is_status_2(tmp_path):
    cfg = json.loads(json.dumps(BASE_CONFIGS["KolmogorovCheck"]))
    cfg["sequence"]["surprise"] = True
    status, _ = run_tmp(tmp_path, cfg)
    assert status == 2


def test_malformed_json_is_status_2(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"kind": "TupleScan",')
    assert main(["run", str(p)]) == 2
    err = capsys.readouterr().err
    assert "broken.json:1:" in err


def test_missing_file_is_status_2(tmp_path):
    assert main(["run", str(tmp_path / "absent.json")]) == 2


def test_overflow_is_status_3(tmp_path):
    cfg = {
        "kind": "ConditionStarProfile",
        "sequence": {"family": "Lacunary", "base": 2},
        "max_gap": 1,
        "checkpoints": [100],
    }
    status, _ = run_tmp(tmp_path, cfg)
    assert status == 3


def test_failed_assertion_is_status_1(tmp_path):
    cfg = dict(BASE_CONFIGS["VeryGoodDeviation"], tolerance=1e-15)
    status, out = run_tmp(tmp_path, cfg)
    assert status == 1
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] is False
    assert any(not a["passed"] for a in summary["assertions"])


def test_run_config_accepts_dict_directly(tmp_path):
    cfg = dict(BASE_CONFIGS["ConditionStarProfile"], out=str(tmp_path / "direct"))
    assert run_config(cfg) == 0
    assert (tmp_path / "direct" / "result.csv").exists()


def test_csv_floats_have_17_significant_digits(tmp_path):
    status, out = run_tmp(tmp_path, BASE_CONFIGS["ConditionStarProfile"])
    assert status == 0
    rows = (out / "result.csv").read_text().strip().splitlines()
    density = rows[1].split(",")[2]
    assert float(density) == (10 + 2 * 9) / 100  # (N + 2(N-1)) / N**2 at N = 10
    # 17 significant digits round-trip the double exactly
    assert len(density.replace(".", "").replace("-", "").lstrip("0")) >= 15
