import json

import numpy as np
import pytest

from conftest import rand_series
from freehol import io
from freehol.cli import main
from freehol.harness import gen_row_contraction
from freehol.series import FreeSeries, Tail


@pytest.fixture
def files(tmp_path):
    F = FreeSeries.from_dict({(): 1, (1,): 0.5, (1, 2): -0.25j}, 2)
    io.write_series(F, tmp_path / "f.json")
    io.write_tuple(gen_row_contraction(1, 2, 3, 0.6).mats, tmp_path / "t.json")
    return tmp_path


def rows(text):
    lines = text.strip().splitlines()
    assert lines[0] == "quantity,value,lower,upper,flags"
    return {l.split(",")[0]: l.split(",") for l in lines[1:]}


def test_series_roundtrip(rng, tmp_path):
    for q in (1, 2):
        F = rand_series(rng, 2, 3, q=q, density=0.5).with_tail(Tail(2.0, 0.4))
        io.write_series(F, tmp_path / "s.json")
        G = io.read_series(tmp_path / "s.json")
        assert G.equals(F) and G.tail == F.tail


def test_tuple_roundtrip_and_errors(tmp_path):
    mats = gen_row_contraction(2, 3, 2, 0.5).mats
    io.write_tuple(mats, tmp_path / "t.json")
    assert np.array_equal(io.read_tuple(tmp_path / "t.json"), mats)
    bad = io.tuple_to_dict(mats)
    bad["d"] = 5
    with pytest.raises(ValueError):
        io.tuple_from_dict(bad)


def test_eval(files, capsys):
    assert main(["eval", "--series", str(files / "f.json"), "--tuple", str(files / "t.json"),
                 "--matrix-out", str(files / "m.json")]) == 0
    out = rows(capsys.readouterr().out)
    assert float(out["tail_bound"][1]) == 0.0
    m = json.loads((files / "m.json").read_text())
    assert np.linalg.norm(np.array(m["re"]) + 1j * np.array(m["im"]), 2) == pytest.approx(float(out["value_norm"][1]))


@pytest.mark.parametrize("cmd", [
    ["jsr", "--tuple", "T"],
    ["hinf", "--series", "F", "--grid", "0.5,0.9"],
    ["hp", "--series", "F", "--cells", "50"],
    ["norm", "--series", "F", "--r", "0.8"],
    ["cauchy", "--series", "F", "--tuple", "T"],
    ["poisson", "--series", "F", "--tuple", "T"],
    ["herglotz", "--series", "F", "--fock-level", "3"],
    ["rho", "--a", "F", "--b", "F"],
])
def test_numeric_commands(files, capsys, cmd):
    argv = [str(files / "f.json") if a == "F" else str(files / "t.json") if a == "T" else a for a in cmd]
    assert main(argv) == 0
    out = rows(capsys.readouterr().out)
    assert out
    if cmd[0] == "cauchy":
        assert float(out["calculus_minus_cauchy_transform"][1]) < 1e-12
    if cmd[0] == "rho":
        assert float(out["rho"][1]) == 0.0


def test_diff_and_gen(files, capsys):
    assert main(["diff", "--series", str(files / "f.json"), "--wrt", "1"]) == 0
    d = io.series_from_dict(json.loads(capsys.readouterr().out))
    assert d.scalar(()) == 0.5 and d.scalar((2,)) == -0.25j and d.nnz() == 2
    assert main(["gen", "series", "--seed", "4", "--n", "2", "--degree", "2"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "series", "--seed", "4", "--n", "2", "--degree", "2"]) == 0
    assert capsys.readouterr().out == first
    assert main(["gen", "tuple", "--seed", "4", "--out", str(files / "g.json")]) == 0
    assert io.read_tuple(files / "g.json").shape == (2, 3, 3)


def test_verify(files, capsys):
    cfg = files / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7, "trials": 5}))
    assert main(["verify", "--config", str(cfg), "--suite", "von_neumann", "--no-timestamp"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("suite,instance,quantity,lhs,rhs,slack,pass") and len(text.splitlines()) == 6
    cfg.write_text(json.dumps({"seed": 7, "trials": 1, "tolerances": {"hp_width": 1e-12}}))
    assert main(["verify", "--config", str(cfg), "--suite", "hardy"]) == 1


def test_errors_and_caps(files, capsys):
    assert main(["hinf", "--series", str(files / "missing.json")]) == 2
    assert capsys.readouterr().out == ""
    assert main(["hinf", "--series", str(files / "f.json"), "--fock-level", "13"]) == 2
    assert "unsafe" in capsys.readouterr().err
    assert main(["--unsafe-sizes", "norm", "--series", str(files / "f.json"), "--fock-level", "13"]) == 0
    assert main(["verify", "--suite", "nope"]) == 2
