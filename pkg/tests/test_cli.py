import json
import subprocess
import sys

import pytest

from hyploop import __version__
from hyploop.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bounds_example(capsys):
    code, out, _ = run(capsys, "bounds", "--dimA", "1", "--g", "1", "--t", "1", "--m", "1", "--s", "9")
    assert code == 0
    assert json.loads(out)["theoremA_bound"] == 10000


def test_growth_example(capsys):
    code, out, _ = run(capsys, "growth", "--model", "free:2", "--radius", "2")
    assert code == 0
    obj = json.loads(out)
    assert obj["ball_size"] == 17 and obj["exponential_bound_holds"]


def test_missing_domain_file(capsys, tmp_path):
    code, _, err = run(capsys, "density", "--domain", str(tmp_path / "nope.json"), "--point", "2,0")
    assert code == 2 and "not found" in err


def test_unknown_and_missing_subcommand(capsys):
    code, _, err = run(capsys, "frob")
    assert code == 64 and "usage" in err.lower()
    code, _, err = run(capsys)
    assert code == 64


def test_numeric_failure_exit(capsys, tmp_path):
    loop = tmp_path / "loop.json"
    loop.write_text(json.dumps({"points": [[1.0, 0.0], [-0.5, 0.9], [-0.5, -0.9]]}))
    code, _, _ = run(capsys, "length", "--loop", str(loop), "--preset", "annulus:1,4")
    assert code in (2, 3)


def test_version():
    out = subprocess.run([sys.executable, "-m", "hyploop.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout


def test_density_point(capsys):
    code, out, _ = run(capsys, "density", "--model", "punctured_disc", "--point", "0.36787944117144233,0")
    assert code == 0
    obj = json.loads(out)
    assert obj["oracle"] == pytest.approx(2.718281828459045)
    assert obj["lower"] <= obj["oracle"] <= obj["upper"]


def test_toml_config(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('dimA = 1\ng = 1\nt = 1\nm = "1"\ns = 9\n')
    code, out, _ = run(capsys, "bounds", "--config", str(cfg))
    assert code == 0 and json.loads(out)["theoremA_bound"] == 10000
    # flags given on the command line win over the file
    code, out, _ = run(capsys, "bounds", "--config", str(cfg), "--s", "0")
    assert json.loads(out)["theoremA_bound"] == 1


def test_json_config_and_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": "abelian:2:1", "radius": 2}))
    code, out, _ = run(capsys, "growth", "--config", str(cfg))
    assert code == 0 and json.loads(out)["ball_size"] == 13
    cfg.write_text(json.dumps({"model": "free:2", "radius": 2, "colour": "red"}))
    code, _, err = run(capsys, "growth", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_bad_s_list(capsys):
    code, _, _ = run(capsys, "scan-lower", "--s-list", "4", "2")
    assert code == 2


def test_scan_upper_csv_format(capsys, tmp_path):
    csv_path = tmp_path / "rows.csv"
    code, _, _ = run(capsys, "scan-upper", "--s-list", "0", "1", "2", "--strategies", "uniform", "kershner",
                     "--trials", "2", "--csv", str(csv_path), "--json", str(tmp_path / "s.json"))
    assert code == 0
    raw = csv_path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    lines = raw.decode().splitlines()
    assert lines[0] == "s,strategy,trial,lower,upper,base_re,base_im"
    assert len(lines) == 1 + 1 + 2 * 2 * 2
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 7
        float(cells[4])
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["linear_bound_violations"] == 0


def scan_bytes(tmp_path, workers, tag):
    csv_path, json_path = tmp_path / f"{tag}.csv", tmp_path / f"{tag}.json"
    code = main(["scan-upper", "--s-list", "1", "2", "4", "8", "--trials", "2", "--seed", "42",
                 "--workers", str(workers), "--csv", str(csv_path), "--json", str(json_path)])
    assert code == 0
    return csv_path.read_bytes(), json_path.read_bytes()


def test_byte_identical_across_workers(tmp_path, capsys):
    ref = scan_bytes(tmp_path, 1, "w1")
    for w in (4, 16):
        assert scan_bytes(tmp_path, w, f"w{w}") == ref
    assert scan_bytes(tmp_path, 1, "again") == ref
    capsys.readouterr()


def test_env_overrides_workers(tmp_path, monkeypatch, capsys):
    ref = scan_bytes(tmp_path, 1, "a")
    monkeypatch.setenv("HYPLOOP_WORKERS", "3")
    assert scan_bytes(tmp_path, 1, "b") == ref
    capsys.readouterr()


def test_kershner_subcommand(capsys):
    code, out, _ = run(capsys, "kershner", "--s", "100", "--samples", "20000")
    assert code == 0
    obj = json.loads(out)
    assert obj["uncovered"] == 0 and obj["s"] == 100


def test_cover_subcommand(capsys):
    code, out, _ = run(capsys, "cover", "--points", "0,0;1,0;0,1", "--special", "0,0", "--eps", "0.1")
    assert code == 0
    obj = json.loads(out)
    assert len(obj["discs"]) >= 1 and obj["failures"] == []
