import json
import subprocess
import sys

import pytest

from secant_lab.cli import main
from secant_lab.config import SEED_ENV

W11 = '{"kind":"secant","a":1,"b":1}'


def _split(text):
    header = [l for l in text.splitlines() if l.startswith("#")]
    body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    return header, body


def _config_line(header):
    line = next(l for l in header if l.startswith("# config: "))
    return json.loads(line[len("# config: "):])


def test_cis_check_half_shift(capsys):
    code = main(["cis-check", "--window", W11, "--pointset",
                 '{"kind":"lattice","step":1,"offset":0.5}'])
    assert code == 0
    header, body = _split(capsys.readouterr().out)
    verdict = json.loads(body)
    assert verdict["is_cis"] is False
    assert verdict["failed_condition"] == "average"
    assert _config_line(header)["pointset"]["offset"] == 0.5


def test_cis_check_oracle_csv(tmp_path, capsys):
    path = tmp_path / "cond.csv"
    code = main(["cis-check", "--window", W11, "--pointset", '{"kind":"lattice","step":1}',
                 "--oracle", str(path)])
    assert code == 0
    _, body = _split(path.read_text())
    lines = body.splitlines()
    assert lines[0] == "size,condition"
    assert len(lines) == 4


def test_malformed_config_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["stability", "--config", str(bad)]) == 2


def test_schema_violation_exit_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"window": {"kind": "secant", "a": 1, "b": 1}, "extra": 1}))
    assert main(["stability", "--config", str(cfg)]) == 2
    assert main(["stability", "--window", '{"kind":"foo"}']) == 2


def test_bad_arguments_exit_2(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["sampling-bounds", "--N-ladder", "a,b"]) == 2
    assert main(["cis-check", "--window", '{"kind":"gaussian","alpha":3.0}',
                 "--pointset", '{"kind":"lattice","step":1}']) == 2


def test_stability_json(capsys):
    assert main(["stability", "--window", W11]) == 0
    _, body = _split(capsys.readouterr().out)
    rep = json.loads(body)
    assert 0 < rep["C1"] < rep["C2"]


def test_density_csv(capsys):
    assert main(["density", "--pointset", '{"kind":"lattice","step":0.8}',
                 "--r-list", "10,20"]) == 0
    header, body = _split(capsys.readouterr().out)
    assert body.splitlines()[0] == "r,lower,upper"
    assert any("exact density: 1.25" in l for l in header)


def test_sampling_bounds_deterministic(tmp_path):
    args = ["sampling-bounds", "--window", W11, "--pointset", '{"kind":"lattice","step":0.8}',
            "--x-grid", "4", "--N-ladder", "20,40"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b), "--jobs", "3"]) == 0
    _, body = _split(a.read_text())
    assert _split(b.read_text())[1] == body
    rows = body.splitlines()
    assert rows[0] == "x,N,A_est,B_est"
    assert len(rows) == 1 + 4 * 2


def test_sampling_bounds_byte_identical(tmp_path):
    args = ["sampling-bounds", "--window", W11, "--pointset", '{"kind":"lattice","step":0.8}',
            "--x-grid", "4", "--N-ladder", "20,40", "--output", str(tmp_path / "o.csv")]
    assert main(args) == 0
    first = (tmp_path / "o.csv").read_bytes()
    assert main(args) == 0
    assert (tmp_path / "o.csv").read_bytes() == first


def test_frame_dichotomy(capsys):
    code = main(["frame-dichotomy", "--window", W11, "--rho-list", "0.8,1.25",
                 "--ladder", "20,40,80", "--x-grid", "8", "--seed", "3"])
    assert code == 0
    header, body = _split(capsys.readouterr().out)
    lines = body.splitlines()
    assert lines[0] == "rho,D_minus,N,x,A,B,verdict"
    assert lines[3].endswith(",frame") and lines[-1].endswith(",not-frame")
    assert _config_line(header)["seed"] == 3


def test_frame_dichotomy_assertion_exit_1(tmp_path, capsys):
    # a ladder ratio above one makes every verdict "not-frame", contradicting D- > alpha
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"thresholds": {"ladder_ratio": 2.0}}))
    code = main(["frame-dichotomy", "--window", W11, "--rho-list", "0.8", "--ladder", "20,40",
                 "--x-grid", "4", "--config", str(cfg)])
    out = capsys.readouterr()
    assert code == 1
    assert "thresholds overridden: ladder_ratio" in out.out
    assert "assertion failed" in out.out


def test_fock_verify(capsys):
    assert main(["fock-verify", "--beta", "0.125", "--gamma", "0.75"]) == 0
    _, body = _split(capsys.readouterr().out)
    lines = body.splitlines()
    assert lines[0].startswith("n,closed_log10_mag,closed_phase")
    assert len(lines) == 12


def test_kernel_asymptotics_log_pairs(capsys):
    assert main(["kernel-asymptotics", "--a", "1", "--b", "2", "--points", "21"]) == 0
    _, body = _split(capsys.readouterr().out)
    cols = body.splitlines()[0].split(",")
    mags = [c for c in cols if c.endswith("_log10_mag")]
    assert len(mags) == 3
    assert all(c.replace("_log10_mag", "_phase") in cols for c in mags)


def test_coincidence_histogram(capsys):
    assert main(["coincidence", "--samples", "6", "--bins", "3", "--jobs", "2"]) == 0
    _, body = _split(capsys.readouterr().out)
    lines = body.splitlines()
    assert lines[0] == "bin_lo,bin_hi,count"
    assert sum(int(l.split(",")[2]) for l in lines[1:]) == 6


def test_verify_all_subset(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "5")
    out = tmp_path / "report.json"
    assert main(["verify-all", "--only", "1,2,3", "--output", str(out), "--seed", "2"]) == 0
    header, body = _split(out.read_text())
    report = json.loads(body)
    assert report["passed"] is True
    assert [c["number"] for c in report["criteria"]] == [1, 2, 3]
    assert _config_line(header)["seed"] == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "secant_lab", "stability", "--window", W11],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert '"C1"' in proc.stdout
