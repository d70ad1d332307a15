import json
import math

import pytest

from bssk.cli import dumps, load_config, run
from bssk.errors import ConfigError


def test_theory_subcommand(capsys):
    code = run(["theory", "--beta", "1", "--r1", "0.5", "--w4", "3"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["beta_c"] == pytest.approx(1.41421356, abs=1e-8)
    assert out["f_limit"] == pytest.approx(0.125, abs=1e-12)
    assert out["regime"] == "high"
    assert out["mu"] == pytest.approx(-0.76506770, abs=1e-7)


def test_unknown_flag_exits_2(capsys):
    assert run(["--nope"]) == 2
    capsys.readouterr()
    assert run(["theory", "--beta", "1", "--bogus"]) == 2
    capsys.readouterr()


def test_unknown_subcommand_exits_2(capsys):
    assert run(["frobnicate"]) == 2
    capsys.readouterr()


def test_theory_bad_parameters_exit_2(capsys):
    assert run(["theory", "--beta", "-1"]) == 2
    capsys.readouterr()


def test_dumps_17_digits():
    text = dumps({"x": 1.0 / 3.0, "flag": True, "none": None, "v": [1, 2.5]})
    assert "0.33333333333333331" in text
    parsed = json.loads(text)
    assert parsed["x"] == 1.0 / 3.0
    assert parsed["flag"] is True


def test_saddle_subcommand(capsys):
    code = run(["saddle", "--n1", "40", "--n2", "20", "--beta", "0.8", "--seed", "3"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["gamma1"] - out["gamma2"] == pytest.approx(
        (40 - 20) / (2 * 20) / (40 * 0.8 / math.sqrt(20 * 60)), abs=1e-10
    )
    assert out["residual"] <= 1e-12
    assert out["regime"] == "high"


def test_spectrum_subcommand(tmp_path, capsys):
    code = run(["spectrum", "--n1", "12", "--n2", "6", "--seed", "1", "--out-dir", str(tmp_path)])
    assert code == 0
    capsys.readouterr()
    lines = (tmp_path / "spectrum.csv").read_text().strip().split("\n")
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 7
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["error"] is None
    assert str(tmp_path / "spectrum.csv") in manifest["outputs"]


def test_verify_q_subcommand(tmp_path, capsys):
    code = run(
        [
            "verify-q",
            "--out-dir",
            str(tmp_path),
            "--samples",
            "200000",
        ]
    )
    assert code == 0
    record = json.loads((tmp_path / "verify_q.json").read_text())
    assert set(record) == {"mc", "mc_se", "contour", "z_ratio"}
    assert record["z_ratio"] == pytest.approx(1.0, abs=0.01)
    capsys.readouterr()


def test_fluctuate_reproducible_csv(tmp_path, capsys):
    cfg = {"n1": 40, "n2": 40, "beta": 1.0, "trials": 10, "seed": 11}
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert run(["fluctuate", "--config", str(cfg_path), "--out-dir", str(d1)]) == 0
    assert run(["fluctuate", "--config", str(cfg_path), "--out-dir", str(d2)]) == 0
    capsys.readouterr()
    assert (d1 / "samples.csv").read_bytes() == (d2 / "samples.csv").read_bytes()
    assert (d1 / "summary.json").read_bytes() == (d2 / "summary.json").read_bytes()
    summary = json.loads((d1 / "summary.json").read_text())
    assert summary["regime"] == "high"
    assert summary["count"] == 10
    lines = (d1 / "samples.csv").read_text().strip().split("\n")
    assert lines[0] == "trial,seed,statistic,mu1"
    assert len(lines) == 11


def test_flag_overrides_config_file(tmp_path, capsys):
    cfg = {"n1": 40, "n2": 40, "beta": 1.0, "trials": 5, "seed": 11}
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    d1 = tmp_path / "out"
    code = run(
        ["fluctuate", "--config", str(cfg_path), "--beta", "2", "--out-dir", str(d1)]
    )
    assert code == 0
    capsys.readouterr()
    manifest = json.loads((d1 / "manifest.json").read_text())
    assert manifest["config"]["beta"] == 2.0
    summary = json.loads((d1 / "summary.json").read_text())
    assert summary["regime"] == "low"


def test_config_minimal_defaults_gaussian(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({"n1": 4, "n2": 4, "beta": 1.0, "trials": 1, "seed": 0}))
    parsed = load_config(str(cfg_path))
    assert "dist" not in parsed  # default applied later, stays gaussian
    from bssk.cli import resolve_config

    class Args:
        config = str(cfg_path)
        n1 = n2 = beta = trials = seed = dist = None

    config = resolve_config(Args(), "high_fluct")
    assert config.spec.kind == "gaussian"


def test_zero_trials_rejected_naming_field(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({"n1": 4, "n2": 4, "beta": 1.0, "trials": 0, "seed": 0}))
    d = tmp_path / "out"
    code = run(["fluctuate", "--config", str(cfg_path), "--out-dir", str(d)])
    assert code == 2
    err = capsys.readouterr().err
    assert "trials" in err
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["error"] is not None and "trials" in manifest["error"]


def test_malformed_config_rejected(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text("{not json")
    assert run(["fluctuate", "--config", str(cfg_path), "--out-dir", str(tmp_path / "x")]) == 2
    capsys.readouterr()
    cfg_path.write_text(json.dumps({"n1": 4, "n2": 4, "beta": 1.0, "trials": 1, "seed": 0, "zzz": 1}))
    assert run(["fluctuate", "--config", str(cfg_path), "--out-dir", str(tmp_path / "y")]) == 2
    capsys.readouterr()


def test_load_config_unknown_field():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/path.json")


def test_manifest_written_on_failure(tmp_path, capsys):
    # critical beta: the campaign raises before any samples are produced
    d = tmp_path / "out"
    code = run(
        [
            "fluctuate",
            "--n1", "10", "--n2", "10",
            "--beta", str(math.sqrt(2.0)),
            "--trials", "3",
            "--seed", "0",
            "--out-dir", str(d),
        ]
    )
    assert code in (1, 2)
    capsys.readouterr()
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["error"] is not None


def test_rigidity_subcommand(tmp_path, capsys):
    d = tmp_path / "out"
    code = run(
        [
            "rigidity",
            "--n1", "60", "--n2", "60",
            "--trials", "2",
            "--seed", "0",
            "--epsilon", "0.5",
            "--out-dir", str(d),
        ]
    )
    assert code == 0
    capsys.readouterr()
    summary = json.loads((d / "summary.json").read_text())
    assert "total_violations" in summary
    lines = (d / "rigidity.csv").read_text().strip().split("\n")
    assert lines[0] == "trial,seed,max_ratio,violations"
    assert len(lines) == 3


def test_edge_subcommand(tmp_path, capsys):
    d = tmp_path / "out"
    code = run(
        [
            "edge",
            "--n1", "60", "--n2", "60",
            "--trials", "4",
            "--seed", "5",
            "--out-dir", str(d),
        ]
    )
    assert code == 0
    capsys.readouterr()
    summary = json.loads((d / "summary.json").read_text())
    assert summary["count"] == 4
    assert (d / "samples.csv").exists()


def test_w4_check_flag(tmp_path, capsys):
    d = tmp_path / "out"
    code = run(
        [
            "fluctuate",
            "--n1", "40", "--n2", "40",
            "--beta", "1.0",
            "--trials", "8",
            "--seed", "3",
            "--w4-check",
            "--out-dir", str(d),
        ]
    )
    assert code == 0
    capsys.readouterr()
    summary = json.loads((d / "summary.json").read_text())
    assert "w4_check" in summary
    assert "mean_shift" in summary["w4_check"]
