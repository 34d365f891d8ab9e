import json
import subprocess
import sys

import pytest

from shearlab.cli import main


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _rows(path):
    return [line for line in open(path).read().splitlines() if not line.startswith("#")]


@pytest.mark.parametrize("depth,lines", [(0, 3), (3, 45)])
def test_farey_listing(tmp_path, depth, lines):
    out = tmp_path / "f.txt"
    assert main(["farey", "--depth", str(depth), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == lines


def test_farey_depth_guard(tmp_path, capsys):
    out = tmp_path / "f.txt"
    assert main(["farey", "--depth", "31", "--out", str(out)]) == 2
    assert "DepthLimit" in capsys.readouterr().err
    assert not out.exists()


def test_invalid_config_exit_code(tmp_path):
    cfg = _write(tmp_path, "c.json", {"map": {"kind": "counterexample", "n": 1}})
    assert main(["shear", "--config", cfg]) == 2
    cfg = _write(tmp_path, "c2.json", {"unknown_key": 1})
    assert main(["shear", "--config", cfg]) == 2
    assert main(["shear", "--config", str(tmp_path / "missing.json")]) == 2


def test_shear_identity_and_determinism(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["shear", "--depth", "5", "--out", str(out)]) == 0
    assert json.loads((tmp_path / "s.csv.json").read_text())["shear_norm"] == 0.0
    cfg = _write(tmp_path, "c.json", {"map": {"kind": "counterexample", "n": 16}, "depth": 6})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["shear", "--config", cfg, "--out", str(a)]) == 0
    assert main(["shear", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "a.csv.json").read_text())["shear_norm"] > 0
    header = json.loads(a.read_text().splitlines()[0][2:])
    assert header["map"] == {"kind": "counterexample", "n": 16} and header["depth"] == 6


def test_reconstruct_round_trip(tmp_path):
    cfg = _write(tmp_path, "c.json", {"map": {"kind": "counterexample", "n": 8}, "depth": 5})
    s = tmp_path / "s.csv"
    assert main(["shear", "--config", cfg, "--out", str(s)]) == 0
    r = tmp_path / "r.csv"
    assert main(["reconstruct", "--config", _write(tmp_path, "r.json", {"input": str(s)}), "--out", str(r)]) == 0
    rows = _rows(r)
    assert rows[0] == "vertex,image" and rows[1:4] == ["0/1,0.0", "1/1,1.0", "1/0,inf"]
    from shearlab.boundary import Counterexample, to_halfplane

    v, img = rows[4].split(",")
    assert v == "1/2" and float(img) == pytest.approx(to_halfplane(Counterexample(8))(0.5), rel=1e-12)


def test_extend_identity_points(tmp_path):
    pts = [[0.1, 0.2], [-0.5, 0.3]]
    cfg = _write(tmp_path, "c.json", {"points": pts})
    out = tmp_path / "e.csv"
    assert main(["extend", "--config", cfg, "--out", str(out)]) == 0
    for line, (x, y) in zip(_rows(out)[1:], pts):
        vals = [float(v) for v in line.split(",")]
        assert abs(vals[2] - x) < 1e-10 and abs(vals[3] - y) < 1e-10


def test_extend_outside_disk_leaves_no_file(tmp_path):
    cfg = _write(tmp_path, "c.json", {"points": [[0.0, 0.0], [1.5, 0.0]]})
    out = tmp_path / "e.csv"
    assert main(["extend", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def test_counterexample_command(tmp_path, capsys):
    out = tmp_path / "c.csv"
    cfg = _write(tmp_path, "c.json", {"n_values": [2]})
    assert main(["counterexample", "--config", cfg, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == "n,c1_re,c1_im,cm1_re,cm1_im,dm1_re,dm1_im,mu_abs,K0,h_tilde_minus1,shear_norm"
    vals = rows[1].split(",")
    assert float(vals[7]) < 1e-10 and float(vals[9]) == -1.0
    capsys.readouterr()
    cfg = _write(tmp_path, "c2.json", {"n_values": [2, 4, 8, 16, 32, 64, 128, 256]})
    assert main(["counterexample", "--config", cfg, "--out", str(out)]) == 0
    mus = [float(r.split(",")[7]) for r in _rows(out)[1:]]
    assert all(a < b for a, b in zip(mus, mus[1:]))
    printed = capsys.readouterr().out
    assert "FAIL" not in printed and printed.count("PASS") == 6


def test_metrics_identity_vs_moebius(tmp_path):
    cfg = _write(tmp_path, "m.json", {
        "map2": {"kind": "moebius", "matrix": [1, [0.3, 0.1], [0.3, -0.1], 1]},
        "unit_cr": {"count": 100}, "degenerating": {"count": 10, "scales": [0.1, 0.01]}})
    out = tmp_path / "m.csv"
    assert main(["metrics", "--config", cfg, "--out", str(out), "--seed", "3"]) == 0
    assert _rows(out)[0] == "scale,estimate"
    assert all(float(r.split(",")[1]) < 1e-10 for r in _rows(out)[1:])
    side = json.loads((tmp_path / "m.csv.json").read_text())
    assert side["d_C"] < 1e-10 and side["unit_cr"] == {"seed": 3, "count": 100}


def test_das_identical_maps(tmp_path):
    cfg = _write(tmp_path, "d.json", {"map1": {"kind": "counterexample", "n": 8},
                                       "map2": {"kind": "counterexample", "n": 8}, "depth": 6, "thresholds": [0, 3, 5]})
    out = tmp_path / "d.csv"
    assert main(["das", "--config", cfg, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == "G,estimate" and all(float(r.split(",")[1]) == 0.0 for r in rows[1:])


def test_das_threshold_beyond_depth(tmp_path):
    cfg = _write(tmp_path, "d.json", {"depth": 4, "thresholds": [5]})
    assert main(["das", "--config", cfg]) == 2


def test_beltrami_and_lemma3(tmp_path):
    cfg = _write(tmp_path, "b.json", {"map": {"kind": "counterexample", "n": 4}, "grid": {"points": [[0, 0], [0.2, 0.1]]}})
    out = tmp_path / "b.csv"
    assert main(["beltrami", "--config", cfg, "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == "x,y,mu_abs" and len(rows) == 3
    cfg = _write(tmp_path, "l.json", {"map": {"kind": "counterexample", "n": 4}, "M": 100.0})
    out = tmp_path / "l.csv"
    assert main(["lemma3", "--config", cfg, "--out", str(out)]) == 0
    assert json.loads((tmp_path / "l.csv.json").read_text())["below_M"] is True


def test_parallel_matches_serial(tmp_path):
    cfg = _write(tmp_path, "b.json", {"map": {"kind": "counterexample", "n": 6}, "grid": {"radius": 0.4, "rings": 1, "per_ring": 4}})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["beltrami", "--config", cfg, "--out", str(a)]) == 0
    assert main(["beltrami", "--config", cfg, "--out", str(b), "--parallel", "2"]) == 0
    assert _rows(a) == _rows(b)


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "shearlab", "farey", "--depth", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and len(r.stdout.splitlines()) == 9
