import csv
import json
import subprocess
import sys

import pytest

from simplexlearn.cli import main
from simplexlearn.geometry import Simplex
from simplexlearn.io import save_simplex


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    save_simplex(tmp_path / "unit.json", Simplex([[0.0], [1.0]]))
    return tmp_path


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_complexity_thm2(capsys):
    code, out, _ = run(["complexity", "--formula", "thm2", "--dim", "1", "--theta-upper", "2",
                        "--ratio", "2", "--eps", "0.5", "--delta", "0.1"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["n"] == 95 and rep["formula"] == "thm2" and rep["inputs"]["ratio"] == 2.0


@pytest.mark.parametrize("argv,n", [
    (["--formula", "thm1", "--M", "10", "--eps", "0.1", "--delta", "0.1"], 401),
    (["--formula", "lemma1", "--dim", "1", "--theta-lower", "1", "--delta", "0.5"], 449754),
])
def test_complexity_other(argv, n, capsys):
    code, out, _ = run(["complexity"] + argv, capsys)
    assert code == 0 and json.loads(out)["n"] == n


def test_complexity_thm3_with_radius_cap(capsys):
    code, out, _ = run(["complexity", "--formula", "thm3", "--dim", "1", "--theta-lower", "1",
                        "--theta-upper", "1", "--eps", "0.2", "--delta", "0.1", "--snr", "50"], capsys)
    assert code == 0
    assert "radius-substituted-by-closed-form-cap" in json.loads(out)["flags"]


def test_eval_identical_is_zero(work, capsys):
    code, out, _ = run(["eval", "--a", "unit.json", "--b", "unit.json"], capsys)
    assert code == 0 and json.loads(out)["tv"] == 0.0


def test_usage_errors(work, capsys):
    assert run(["learn"], capsys)[0] == 2
    assert run(["complexity", "--formula", "thm2", "--dim", "1"], capsys)[0] == 2
    code, _, err = run(["eval", "--a", "unit.json", "--b", "unit.json", "--bogus"], capsys)
    assert code == 2 and "usage" in err
    assert run([], capsys)[0] == 2
    assert run(["gen", "--dim", "1", "--n", "5", "--out", "d.csv"], capsys)[0] == 2  # no sigma/snr


def test_domain_errors_exit_1(work, capsys):
    assert run(["gen", "--dim", "1", "--n", "1", "--sigma", "0", "--out", "one.csv"], capsys)[0] == 0
    code, _, err = run(["learn", "--data", "one.csv", "--truth", "unit.json"], capsys)
    assert code == 1 and "[split]" in err
    assert run(["eval", "--a", "missing.json", "--b", "unit.json"], capsys)[0] == 1


def test_gen_learn_bound_cover(work, capsys):
    assert run(["gen", "--dim", "1", "--n", "2000", "--snr", "50", "--seed", "1",
                "--truth", "unit.json", "--out", "d.csv"], capsys)[0] == 0
    assert (work / "d.csv").read_text().startswith("dim,n,sigma,seed\n1,2000,0.02,1\n")
    (work / "run.cfg").write_text("# experiment\neps_rep = 0.3\n")
    code, _, _ = run(["learn", "--data", "d.csv", "--config", "run.cfg", "--truth", "unit.json",
                      "--set", "delta=0.2", "--out", "r.json"], capsys)
    assert code == 0
    res = json.loads((work / "r.json").read_text())
    assert res["config"]["eps_rep"] == 0.3 and res["config"]["delta"] == 0.2
    assert res["tv_to_truth"] <= 0.25 and "timings" not in res
    code, _, err = run(["bound", "--data", "d.csv", "--theta-lower", "1", "--theta-upper", "1",
                        "--snr", "50", "--out", "b.json"], capsys)
    assert code == 0 and "heuristic" in err
    code, out, _ = run(["cover", "--ball", "b.json", "--eps", "0.5", "--verify", "500"], capsys)
    cov = json.loads(out)
    assert code == 0 and cov["method"] == "grid" and cov["verification"]["passed"]


def test_learn_threads_byte_identical(work, capsys):
    run(["gen", "--dim", "1", "--n", "1500", "--snr", "50", "--out", "d.csv"], capsys)
    for t in ("1", "8"):
        assert run(["learn", "--data", "d.csv", "--truth", "unit.json", "--threads", t,
                    "--set", "eps_rep=0.4", "--out", f"r{t}.json"], capsys)[0] == 0
    assert (work / "r1.json").read_bytes() == (work / "r8.json").read_bytes()


def test_sweep_csv(work, capsys, monkeypatch):
    (work / "sw.cfg").write_text("n = 1, 600\nsnr = 50\neps_rep = 0.4\nseeds = 1, 2\n")
    monkeypatch.setenv("SIMPLEXLEARN_THREADS", "2")
    assert run(["sweep", "--config", "sw.cfg", "--out", "out.csv"], capsys)[0] == 0
    rows = list(csv.DictReader((work / "out.csv").open()))
    assert len(rows) == 4
    assert rows[0]["error"].startswith("[split]") and rows[3]["error"] == ""
    (work / "empty.cfg").write_text("# nothing\n")
    assert run(["sweep", "--config", "empty.cfg"], capsys)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "simplexlearn", "complexity", "--formula", "thm1",
                           "--M", "10", "--eps", "0.1", "--delta", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["n"] == 401
