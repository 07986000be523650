import io
import json
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from pgg import (
    CompleteWeighted, GameInstance, Gnp, format_game, generate_instance, parse_game,
)
from pgg.cli import dispatch, main


def run(argv):
    out = io.StringIO()
    status, report = dispatch(argv, stdout=out)
    assert json.loads(out.getvalue()) == report
    return status, report


def payload(report):
    return {k: v for k, v in report.items() if k != "timing"}


@pytest.fixture
def files(tmp_path):
    (tmp_path / "edgeless.pgg").write_text("pgg 3\npatterns 10*\n")
    (tmp_path / "bottom.sat").write_text("p 1in3 0 1\n0 0 0\n")
    (tmp_path / "x123.sat").write_text("p 1in3 3 2\n1 2 3\n1 0 0\n")
    (tmp_path / "fixture.thr").write_text("threshold 2\ntheta 1 3/2\ntheta 2 3/2\na 1 2 1\n")
    (tmp_path / "bad.pgg").write_text("pgg 2\nedge 1 5\n")
    g = generate_instance(Gnp(7, Fraction(1, 2)), ["10*", "110*"], seed=4)
    (tmp_path / "dec.pgg").write_text(format_game(g))
    return tmp_path


def test_classify():
    status, rep = run(["classify", "110*"])
    assert status == 0
    (row,) = rep["result"]["patterns"]
    assert row["classes"] == [{"class": "1^+0^+", "verdict": "PNE always exists, O(1)"}]


def test_classify_syntax_error():
    status, rep = run(["classify", "1x0*"])
    assert status == 2 and "position 1" in rep["result"]["error"]


def test_solve_edgeless(files):
    status, rep = run(["solve", str(files / "edgeless.pgg")])
    assert status == 0 and rep["result"]["exists"] is True and rep["result"]["profile"] == "111"
    assert len(rep["input_digest"]) == 64


def test_solve_enumerate_and_cnf(files):
    cnf = files / "out.cnf"
    status, rep = run(["solve", str(files / "dec.pgg"), "--enumerate", "--cnf-out", str(cnf)])
    assert status == 0 and rep["result"]["count"] == len(rep["result"]["profiles"]) > 0
    assert cnf.read_text().splitlines()[1] == "c vertex -> variable"


def test_reduce_solve_certify(files):
    game = files / "bottom.pgg"
    status, rep = run(["reduce", str(files / "bottom.sat"), "--k", "1", "-o", str(game)])
    assert status == 0 and rep["result"]["gadgets"] == {"clause": 1, "false": 3}
    status, rep = run(["solve", str(game)])
    assert status == 0 and rep["result"]["exists"] is False

    game, cert = files / "x.pgg", files / "x.json"
    run(["reduce", str(files / "x123.sat"), "--k", "2", "-o", str(game), "--cert", str(cert)])
    status, rep = run(["certify", str(game), "--cert", str(cert), "--assignment", "100"])
    assert status == 0 and rep["result"]["is_pne"] and rep["result"]["round_trip"]
    status, rep = run(["certify", str(game), "--cert", str(cert), "--assignment", "110"])
    assert status == 2
    status, rep = run(["certify", str(game), "--cert", str(cert), "--assignment", "10"])
    assert status == 2


def test_certify_rejects_foreign_game(files):
    cert = files / "x.json"
    run(["reduce", str(files / "x123.sat"), "--k", "1", "-o", str(files / "x.pgg"),
         "--cert", str(cert)])
    status, rep = run(["certify", str(files / "edgeless.pgg"), "--cert", str(cert),
                       "--assignment", "100"])
    assert status == 2 and "certificate" in rep["result"]["error"]


def test_exit_codes(files, tmp_path):
    assert run(["solve", str(files / "bad.pgg")])[0] == 2
    assert run(["solve", str(tmp_path / "missing.pgg")])[0] == 2
    assert main(["frobnicate"]) == 2
    assert main(["gadget", "clause"]) == 2  # --k is required
    big = tmp_path / "big.pgg"
    big.write_text(format_game(generate_instance(Gnp(40, Fraction(1, 10)), "10*", seed=1)))
    assert run(["solve", str(big), "--enumerate"])[0] == 3
    status, rep = run(["solve", str(big), "--method", "backtrack", "--budget", "1"])
    assert status == 3 and rep["result"]["status"] == "budget_exceeded"


def test_dynamics(files):
    status, rep = run(["dynamics", str(files / "dec.pgg"), "--init", "random",
                       "--schedule", "random", "--seed", "9", "--trace"])
    res = rep["result"]
    assert status == 0 and res["converged"] and res["final_is_pne"]
    assert len(res["flips"]) == res["steps"] == len(res["potential_series"]) - 1
    assert rep["seeds"] == {"seed": 9}
    status, rep = run(["dynamics", str(files / "dec.pgg")])
    assert "potential_series" not in rep["result"]


def test_threshold(files):
    out = files / "t.pgg"
    status, rep = run(["threshold", str(files / "fixture.thr"), "-o", str(out)])
    assert status == 0 and rep["result"]["patterns"] == ["110*", "110*"]
    assert rep["result"]["pgg_pne"] == ["11"] and rep["result"]["mapped_are_threshold_pne"] == [True]
    status, rep = run(["threshold", str(files / "fixture.thr"), "-o", str(out), "--k-rule", "floor"])
    assert rep["result"]["pgg_pne"] == ["01", "10"]
    assert rep["result"]["mapped_are_threshold_pne"] == [False, False]
    assert parse_game(out.read_text()).patterns[0] == parse_game("pgg 1\npatterns 10*\n").patterns[0]


def test_congestion(files):
    status, rep = run(["congestion", str(files / "dec.pgg"), "--check-samples", "50"])
    assert status == 0 and rep["result"]["ok"] and rep["result"]["exhaustive"] is False
    status, rep = run(["congestion", str(files / "dec.pgg"), "--exhaustive-n", "7"])
    assert rep["result"]["exhaustive"] and rep["result"]["profiles_checked"] == 128


def test_gadget_emit(files):
    path = files / "clause.pgg"
    status, rep = run(["gadget", "clause", "--k", "1", "--verify", "exact", "--emit", str(path)])
    assert status == 0 and rep["result"]["verification"]["passed"]
    text = path.read_text()
    assert "# role 1 operand t1" in text
    assert parse_game(text).n == 18
    status, rep = run(["gadget", "equiv", "--k", "2", "--verify", "exact"])
    assert status == 3


def test_gen_determinism_and_threads(files):
    args = ["gen", "--model", "complete", "--n", "5", "--wmax", "3", "--seed", "12"]
    a = payload(run(args)[1])
    b = payload(run(["--threads", "4"] + args)[1])
    assert a == b
    g = parse_game(a["result"]["game"])
    assert g.n == 5 and len(g.edges) == 10


def test_repeated_runs_identical(files):
    argv = ["dynamics", str(files / "dec.pgg"), "--schedule", "random", "--seed", "3", "--trace"]
    reports = [json.dumps(payload(run(argv)[1]), sort_keys=True) for _ in range(3)]
    assert len(set(reports)) == 1


def test_generate_examples():
    g = generate_instance(Gnp(4, Fraction(0)), "1010*", seed=1)
    assert g.n == 4 and g.edges == ()
    k4 = generate_instance(Gnp(4, Fraction(1)), "10*", seed=1)
    assert len(k4.edges) == 6
    a = generate_instance(CompleteWeighted(3, 2), seed=77)
    b = generate_instance(CompleteWeighted(3, 2), seed=77)
    assert a == b and all(1 <= w <= 2 for _, _, w in a.edges)
    mixed = generate_instance(Gnp(30, Fraction(1, 3)), ["10*", "(10)*"], seed=2)
    assert {str(p) for p in mixed.patterns} == {"10*", "(10)*"}
    with pytest.raises(ValueError):
        generate_instance(Gnp(0), seed=0)
    with pytest.raises(ValueError):
        generate_instance(Gnp(3, Fraction(3, 2)), seed=0)
    with pytest.raises(ValueError):
        generate_instance(CompleteWeighted(3, 0), seed=0)


@pytest.mark.parametrize("seed", range(30))
def test_generated_games_round_trip(seed):
    g = generate_instance(CompleteWeighted(6, 4) if seed % 2 else Gnp(9, Fraction(2, 5)),
                          ["10*", "1010*", "0(1)*", "(011)*"], seed=seed)
    text = format_game(g)
    assert parse_game(text) == g and format_game(parse_game(text)) == text
    assert isinstance(g, GameInstance)


@pytest.mark.skipif(shutil.which("pgg") is None, reason="console script not installed")
def test_console_script(files):
    proc = subprocess.run(["pgg", "solve", str(files / "edgeless.pgg")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["exists"] is True
    assert "PNE exists" in proc.stderr


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "pgg.cli", "classify", "(10)*"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["patterns"][0]["classes"][0]["verdict"] == "polynomial"
