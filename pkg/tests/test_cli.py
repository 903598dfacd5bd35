from __future__ import annotations

import json

import pytest

from hecke_exponents.cli import OUT_ENV, RunConfig, build_parser, run


def run_json(argv, tmp_path, name="out.json"):
    path = tmp_path / name
    code = run([*argv, "--out", str(path)])
    return code, json.loads(path.read_text()) if path.exists() else None


def test_exponents_delta(tmp_path):
    code, data = run_json(["exponents", "--form", "builtin:Delta", "--precision", "50"], tmp_path)
    assert code == 0 and data["exponents"] == [24] * 50 and data["h"] == 1


def test_exponents_csv(tmp_path):
    path = tmp_path / "c.csv"
    assert run(["exponents", "--form", "2; 1:8, 2:8", "-P", "4", "--format", "csv", "--out", str(path)]) == 0
    assert path.read_text() == "n,c\n1,8/1\n2,16/1\n3,8/1\n4,16/1\n"


def test_verify_identity(tmp_path):
    code, data = run_json(["verify-identity", "--level", "2", "--eta", "1:8,2:8", "--mmax", "200"], tmp_path)
    assert code == 0 and data["sign_audit"]["winner"] == "forced" and len(data["rows"]) == 100
    assert all(r["match_forced"] for r in data["rows"])


def test_verify_identity_paper_sign_fails(tmp_path):
    code, data = run_json(["verify-identity", "--level", "2", "--eta", "1:8,2:8", "--sign", "paper"], tmp_path)
    assert code == 1 and data["ok"] is False


@pytest.mark.parametrize("argv", [
    ["verify-identity", "--level", "4", "--eta", "1:8,2:8"],
    ["verify-identity", "--level", "2", "--eta", "1:8,2:x"],
    ["verify-identity", "--level", "2", "--eta", "1:16,2:8"],
    ["eisenstein", "--level", "12", "--form", "builtin:E4"],
    ["exponents", "--form", "builtin:Delta", "--bogus"],
    ["frobnicate"],
    ["hecke-orbit", "--level", "2", "--point", "1;2", "--m", "2"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2


def test_eisenstein(tmp_path):
    code, data = run_json(["eisenstein", "--level", "2", "--form", "2; 1:8, 2:8", "-P", "50"], tmp_path)
    assert code == 0
    assert data["solution"]["coefficients"] == {"2": "-1/3"} and data["solution"]["sigma_constant"] == "8/1"
    code, data = run_json(["eisenstein", "--level", "6", "--constants", "1:1/2, 2:0, 3:-1"], tmp_path, "b.json")
    assert code == 0 and data["sigma_proportional"]["ok"]


def test_hecke_orbit(tmp_path):
    code, data = run_json(["hecke-orbit", "--level", "2", "--point", "i", "--m", "2"], tmp_path)
    assert code == 0 and data["count"] == 3 and data["tail_count"] == 1
    ims = sorted(p["reduced"]["im"] for p in data["orbit"])
    assert ims == [0.5, 0.5, 2.0]
    code, data = run_json(["hecke-orbit", "--level", "3", "--point", "0.1,0.8", "--m", "3"], tmp_path, "f.json")
    assert code == 0 and data["count"] == 4


def test_equidist_and_determinism(tmp_path):
    argv = ["equidist", "--level", "2", "--form", "builtin:E4", "--mmax", "41"]
    csv_path = tmp_path / "s.csv"
    assert run([*argv, "--out", str(tmp_path / "a.json"), "--csv", str(csv_path)]) == 0
    assert run([*argv, "--out", str(tmp_path / "b.json"), "-j", "2"]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert csv_path.read_text().splitlines()[0] == "m,sigma1,statistic_re,statistic_im,tail_points,max_imag"
    data = json.loads((tmp_path / "a.json").read_text())
    assert len(data["rows"]) == 21 and data["summary"]["envelope_exponent"] == -0.390625


def test_float_format(tmp_path):
    code, _ = run_json(["equidist", "--level", "2", "--form", "builtin:E4", "--mmax", "41"], tmp_path)
    text = (tmp_path / "out.json").read_text()
    assert '"envelope_exponent": -0.390625,' in text


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert run(["exponents", "--form", "builtin:E4", "-P", "5"]) == 0
    data = json.loads((tmp_path / "env" / "exponents.json").read_text())
    assert data["exponents"][0] == -240


def test_stdout(capsys, monkeypatch):
    monkeypatch.delenv(OUT_ENV, raising=False)
    assert run(["exponents", "--form", "builtin:Delta", "-P", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["exponents"] == [24, 24, 24]


def test_run_config_roundtrip():
    ns = build_parser().parse_args(["verify-identity", "--level", "2", "--eta", "1:8,2:8"])
    cfg = RunConfig.from_namespace(ns)
    assert cfg.precision == 256 and cfg.mmax == 200 and cfg.sign == "forced"
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    with pytest.raises(ValueError):
        RunConfig.from_dict({"command": "x", "nonsense": 1})


def test_selftest_subset(capsys):
    assert run(["selftest", "--only", "1", "2", "12"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3
