import io
import json
import os
import subprocess
import sys

import pytest

from resolvent.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_zeta_global_json():
    code, data = run_json("zeta", "global", "--d", "4", "--bmax", "20")
    assert code == 0 and len(data["rows"]) == 21 and data["kind"] == "global"


def test_zeta_local_csv():
    code, text = run("zeta", "local", "--d", "3", "--bmax", "8", "--format", "csv")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "b,poly" and lines[7] == "6,0:3;1:1"


def test_zeta_betti_and_cohomology():
    code, data = run_json("zeta", "betti", "--d", "3", "--bmax", "6")
    assert data["rows"][6]["betti"] == [3, 0, 1]
    code, data = run_json("zeta", "cohomology", "--d", "4", "--bmax", "4")
    assert {"a": 2, "b": 2, "dim": 3} in data["rows"]


def test_check_secondary():
    code, data = run_json("zeta", "check-secondary", "--d", "4", "--bmax", "220")
    assert code == 0 and data["passed"]
    assert run("zeta", "check-secondary", "--d", "4", "--bmax", "100")[0] == 2


def test_check_conjecture5(tmp_path):
    from resolvent import qseries
    f = tmp_path / "s.json"
    f.write_text(json.dumps(qseries.local_table(3, 30).to_json(d=3, kind="local")))
    code, data = run_json("zeta", "check-conjecture5", "--file", str(f), "--strength", "b")
    assert code == 0 and data["holds"]
    assert run("zeta", "check-conjecture5")[0] == 2
    assert run("zeta", "check-conjecture5", "--file", str(tmp_path / "missing"))[0] == 2


def test_oracle_density_exact():
    code, data = run_json("oracle", "density", "--d", "3", "--p", "5", "--b", "1", "--exact")
    assert code == 0 and data["verdict"] == "match"
    assert data["count"] == "60000" and data["total"] == str(5**8)


def test_oracle_density_mc():
    code, data = run_json("oracle", "density", "--d", "3", "--p", "5", "--b", "2", "--samples", "2e4",
                          "--mc-seed", "3")
    assert code == 0 and data["verdict"] == "within-CI" and int(data["samples"]) == 20000


def test_oracle_compare():
    code, data = run_json("oracle", "compare", "--d", "3", "--p", "5", "--exact-bmax", "1",
                          "--mc", "b=2:20000:1")
    assert code == 0 and [r["verdict"] for r in data["results"]] == ["match", "match", "within-CI"]
    assert run("oracle", "compare", "--d", "3", "--p", "5", "--mc", "b=2")[0] == 2


def test_nichols_hilbert():
    code, data = run_json("nichols", "hilbert", "--d", "3", "--method", "both")
    assert code == 0 and data["groebner"] == [1, 3, 4, 3, 1] and data["verdict"] == "match"
    code, data = run_json("nichols", "check-braid", "--d", "4")
    assert code == 0 and data["braid_equation"]


def test_coh_ext_and_check():
    code, data = run_json("coh", "ext", "--d", "3", "--bmax", "3", "--invariants", "none")
    assert {"a": 2, "b": 2, "dim": 5, "method": "exact"} in data["rows"]
    code, data = run_json("coh", "check", "--d", "4", "--bmax", "3")
    assert code == 0
    row = next(r for r in data["rows"] if (r["a"], r["b"]) == (2, 2))
    assert row["invariant_dim"] == 3 and row["dim"] == 17
    assert run("coh", "ext", "--d", "4", "--bmax", "9")[0] == 2


def test_braid_orbits():
    code, data = run_json("braid", "orbits", "--d", "3", "--n", "2")
    assert data["orbits"] == 5
    code, data = run_json("braid", "orbits", "--d", "3", "--n", "2", "--unmarked")
    assert data["orbits"] == 2


def test_prehomog():
    code, data = run_json("prehomog", "disc3", "--coeffs", "0,1,-1,0")
    assert data["disc"] == "1" and data["valuation"] == 0
    code, data = run_json("prehomog", "disc4", "--ring", "fp:5", "--coeffs", "0,0,0,0,1,-1,0,0,0,1,0,-1")
    assert data["disc"] == "1"
    code, data = run_json("prehomog", "disc3", "--ring", "fpt:5:2", "--coeffs", "1,0,0,0")
    assert data["valuation"] == "≥N"
    assert run("prehomog", "disc3", "--coeffs", "1,2")[0] == 2


def test_export_files(tmp_path):
    out = tmp_path / "t.csv"
    assert run("export", "orbits", "--d", "3", "--bmin", "1", "--bmax", "3", "--format", "csv",
               "--out", str(out))[0] == 0
    assert out.read_text().splitlines()[0] == "n,orbits,sizes,by_product_class"
    empty = tmp_path / "e.csv"
    run("export", "local", "--d", "3", "--bmin", "5", "--bmax", "4", "--format", "csv", "--out", str(empty))
    assert empty.read_text() == "b,poly\n"


def test_json_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("export", "global", "--d", "4", "--bmax", "30", "--out", str(a))
    run("export", "global", "--d", "4", "--bmax", "30", "--out", str(b), "--no-cache")
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors():
    assert run("zeta", "local", "--d", "5")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("braid", "orbits", "--d", "3", "--n", "2", "--budget", "nope=3")[0] == 2
    assert run("braid", "orbits", "--d", "3", "--n", "2", "--budget", "broken")[0] == 2
    assert run("braid", "orbits", "--d", "4", "--n", "8", "--budget", "orbit_tuples=100")[0] == 2


def test_cache_dir_layout_and_corruption(tmp_path, caplog):
    cache = tmp_path / "c"
    run("oracle", "density", "--d", "3", "--p", "5", "--b", "0", "--exact", "--cache-dir", str(cache))
    f = cache / "density" / "d3-p5-b0.json"
    assert json.loads(f.read_text())["payload"]["count"] == 480
    f.write_text("garbage")
    code, text = run("oracle", "density", "--d", "3", "--p", "5", "--b", "0", "--exact",
                     "--cache-dir", str(cache))
    assert code == 0 and json.loads(text)["count"] == "480"
    assert "corrupted" in caplog.text
    assert json.loads(f.read_text())["payload"]["count"] == 480


def test_env_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("RESOLVENT_CACHE_DIR", str(tmp_path / "envcache"))
    run("oracle", "density", "--d", "3", "--p", "7", "--b", "0", "--exact")
    assert (tmp_path / "envcache" / "density" / "d3-p7-b0.json").exists()


def test_verify_all_subset():
    code, data = run_json("verify-all", "--skip-heavy", "--only", "braid,hilbert")
    assert code == 0
    assert data["all_match"] and data["checks"]
    assert all(e["check_id"].split("-")[0] in ("braid", "hilbert", "shuffle") for e in data["checks"])
    assert all("runtime" not in e for e in data["checks"])


def test_console_entry_point():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "resolvent.cli", "braid", "orbits", "--d", "3", "--n", "1"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0 and json.loads(proc.stdout)["orbits"] == 3
    bad = subprocess.run([sys.executable, "-m", "resolvent.cli", "zeta", "local", "--d", "7"],
                         capture_output=True, text=True, env=env)
    assert bad.returncode == 2 and "error" in bad.stderr
