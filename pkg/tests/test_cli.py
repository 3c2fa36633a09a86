import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from spectral_nash.cli import main
from spectral_nash.errors import ParseError
from spectral_nash.gamefile import format_game, parse_game, read_game
from spectral_nash.games import BimatrixGame, SymmetricGame

PENNIES = "bimatrix 2 2\n1 0\n0 1\n0 1\n1 0\n"
RPS = "symmetric 3\n0 1 0\n0 0 1\n1 0 0\n"
C4 = "symmetric 4\n0 1 0 0\n0 0 1 0\n0 0 0 1\n1 0 0 0\n"
TWO_CYCLES = ("symmetric 6\n0 1 0 0 0 0\n0 0 1 0 0 0\n1 0 0 0 0 0\n"
              "0 0 0 0 1 0\n0 0 0 0 0 1\n0 0 0 1 0 0\n")


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in [("pennies", PENNIES), ("rps", RPS), ("c4", C4),
                       ("two", TWO_CYCLES), ("bad", "bimatrix two 2\n")]:
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        out[name] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_parse_formats():
    g = parse_game(PENNIES)
    assert isinstance(g, BimatrixGame)
    np.testing.assert_array_equal(g.R, [[1, 0], [0, 1]])
    s = parse_game("# comment\n\n" + RPS)
    assert isinstance(s, SymmetricGame) and s.n == 3


@pytest.mark.parametrize("text, line", [
    ("", 1), ("matrix 2\n", 1), ("symmetric 2\n0 1\n", 3),
    ("symmetric 2\n0 1\n1\n", 3), ("symmetric 2\n0 x\n1 0\n", 2),
    ("symmetric 1\n0\n0\n", 3), ("bimatrix 0 2\n", 1), ("symmetric 1\nnan\n", 2)])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_game(text)
    assert info.value.line == line


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_round_trip_exact(M):
    g = BimatrixGame(M, -M)
    text = format_game(g)
    back = parse_game(text)
    np.testing.assert_array_equal(back.R, g.R)
    np.testing.assert_array_equal(back.C, g.C)
    assert format_game(back) == text


def test_solve_pennies(capsys, files):
    code, out, _ = run(capsys, "solve", files["pennies"], "--epsilon", "1/2")
    assert code == 0
    rep = json.loads(out)
    assert rep["outcome"]["f_R"] == pytest.approx(0, abs=1e-12)
    assert rep["outcome"]["f_C"] == pytest.approx(0, abs=1e-12)
    assert rep["certificates"] and all(c["ok"] for c in rep["certificates"].values())
    assert "timings" not in rep


def test_solve_rps(capsys, files):
    code, out, _ = run(capsys, "solve", files["rps"], "--epsilon", "0.5", "--timings")
    rep = json.loads(out)
    assert code == 0
    assert rep["outcome"]["f_A"] == pytest.approx(0, abs=1e-12)
    assert rep["spectrum"]["m"] == 1
    assert rep["spectrum"]["xi"] == pytest.approx(2 / 3)
    assert "timings" in rep


def test_solve_ball_mode(capsys, files):
    code, out, _ = run(capsys, "solve", files["rps"], "--mode", "ball")
    assert code == 0 and json.loads(out)["plan"]["mode"] == "ball"


def test_input_errors_exit_2(capsys, files, tmp_path):
    code, out, err = run(capsys, "solve", files["bad"])
    assert code == 2 and "ParseError" in err and "line 1" in err and out == ""
    code, _, err = run(capsys, "solve", str(tmp_path / "missing.txt"))
    assert code == 2
    code, _, err = run(capsys, "solve", files["rps"], "--epsilon", "0.4")
    assert code == 2


def test_spectrum_command(capsys, files):
    code, out, _ = run(capsys, "spectrum", files["rps"])
    rep = json.loads(out)
    assert code == 0
    np.testing.assert_allclose(rep["spectrum"]["eigenvalues"], [2, -1, -1], atol=1e-12)
    assert rep["spectrum"]["m"] == 1 and rep["certificates"]["sqrt_m_bound"]["ok"]
    code, out, _ = run(capsys, "spectrum", files["c4"])
    rep = json.loads(out)
    assert rep["bipartite"]["bipartite"] and rep["bipartite"]["spectrum_symmetric"]
    code, out, _ = run(capsys, "spectrum", files["two"])
    rep = json.loads(out)
    assert [c["nodes"] for c in rep["components"]] == [[0, 1, 2], [3, 4, 5]]
    assert all(c["simple"] for c in rep["components"])


def test_gen_deterministic_and_valid(capsys):
    from spectral_nash.graph import validate_winlose
    _, a, _ = run(capsys, "gen", "--kind", "winlose", "--n", "3", "--p", "0.9", "--seed", "4")
    _, b, _ = run(capsys, "gen", "--kind", "winlose", "--n", "3", "--p", "0.9", "--seed", "4")
    assert a == b
    assert validate_winlose(parse_game(a).A) == []
    _, c, _ = run(capsys, "gen", "--kind", "winlose", "--n", "9", "--p", "0.02", "--seed", "4")
    assert validate_winlose(parse_game(c).A) == []
    _, d, _ = run(capsys, "gen", "--kind", "bimatrix", "--n", "3", "--seed", "1")
    assert format_game(parse_game(d)) == d
    code, _, _ = run(capsys, "gen", "--n", "1")
    assert code == 2


def test_compare(capsys, files):
    code, out, _ = run(capsys, "compare", files["pennies"], "--epsilon", "1/3")
    rep = json.loads(out)
    assert code == 0
    assert rep["planner"]["crossover_n0"] == pytest.approx(2e5, rel=0.1)
    assert rep["spectral"]["max_regret"] == pytest.approx(0, abs=1e-12)
    assert rep["oracle"]["equilibria"] >= 1
    code, out, _ = run(capsys, "compare", files["pennies"], "--k", "2")
    assert json.loads(out)["baseline"]["max_regret"] == pytest.approx(0, abs=1e-12)
    code, out, _ = run(capsys, "compare", "--gen", "winlose", "--n", "8", "--seed", "3")
    rep = json.loads(out)
    assert rep["spectral"]["max_regret"] <= rep["baseline"]["max_regret"] + 1e-6
    code, _, _ = run(capsys, "compare")
    assert code == 2


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "spectral_nash", "solve", files["rps"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outcome"]["f_A"] == pytest.approx(0, abs=1e-12)
