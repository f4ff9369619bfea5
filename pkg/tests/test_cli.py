import io
import json

import pytest

from hardy_np import serialization as ser
from hardy_np.cli import run
from hardy_np.realization import schur_from_hardy
from hardy_np.sampling import disc_monomial, disc_point

DISC = {"algebra": {"blocks": [1]}, "representation": {"multiplicities": [1]},
        "quiver": {"arrows": [{"src": 0, "dst": 0}]}}


@pytest.fixture
def write(tmp_path):
    def _write(name, obj, raw=False):
        path = tmp_path / name
        path.write_text(obj if raw else json.dumps(ser.jsonable(obj)))
        return str(path)
    return _write


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    report = json.loads(out.getvalue()) if out.getvalue() else None
    return code, report, err.getvalue()


def test_np_solve(write):
    code, rep, err = call("np-solve", "--points", write("z.json", [0, [0.5, 0]]), "--values", write("w.json", [0, 0.25]))
    assert code == 0 and rep["feasible"]
    assert rep["verification"]["max_interpolation_error"] <= 1e-9
    assert rep["verification"]["circle_sup"] <= 1 + 1e-9
    assert rep["command"] == "np-solve" and rep["tolerances"] == {"tol": 1e-9, "depth": 8, "seed": 0}
    assert "feasible=True" in err
    code, rep, _ = call("np-solve", "--points", write("z.json", [0]), "--values", write("w.json", [2]))
    assert code == 0 and not rep["feasible"] and rep["min_eig"] == pytest.approx(-3)


def test_input_errors(write):
    code, rep, _ = call("np-solve", "--points", write("z.json", '[0, 0.5', raw=True), "--values", write("w.json", [0]))
    assert code == 2 and rep["error"] == "input" and "line 1, column" in rep["message"]
    code, rep, _ = call("np-solve", "--points", write("z.json", [0, 0.5]), "--values", write("w.json", [0]))
    assert code == 2
    code, rep, _ = call("np-solve", "--points", write("z.json", [1.5]), "--values", write("w.json", [0]))
    assert code == 2
    code, rep, _ = call("dual", "--frame", write("f.json", {"frame": DISC, "bogus": 1}))
    assert code == 2 and "bogus" in rep["message"]
    assert call("dual", "--frame", "/nonexistent.json")[0] == 2
    assert call("no-such-command")[0] == 2


def test_dual_on_disc(write):
    code, rep, _ = call("dual", "--frame", write("f.json", {"frame": DISC}))
    assert code == 0 and rep["dim"] == 1 and rep["nullspace_dim"] == 1
    assert rep["double_dual"]["passed"]


def test_eval(write):
    poly = {"frame": DISC, **ser.encode_polynomial(disc_monomial(3) * 0.5)}
    code, rep, _ = call("eval", "--poly", write("p.json", poly), "--point", write("pt.json", ser.encode_point(disc_point(0.5))))
    assert code == 0
    assert ser.decode_complex(rep["value"][0][0]) == pytest.approx(0.0625)
    assert rep["agreement"] <= 1e-12 and rep["depth"] == 3
    code, _, _ = call("eval", "--poly", write("p.json", poly), "--point", write("pt.json", {"edge_blocks": [[[1.2]]]}))
    assert code == 2


@pytest.mark.parametrize("w", [[0.0, 0.5], [0.9, -0.9], [0.1, 0.2, 0.3]])
def test_pick_check_matches_scalar_pick(write, w):
    z = [0.0, 0.5, 0.3j][:len(w)]
    doc = {"frame": DISC, "points": [ser.encode_point(disc_point(t)) for t in z], "C": [[[x]] for x in w]}
    code, rep, _ = call("pick-check", "--system", write("s.json", doc))
    assert code == 0
    assert rep["feasible"] == rep["scalar_pick"]["psd"]
    assert rep["min_eig"] == pytest.approx(rep["scalar_pick"]["min_eig"], abs=1e-12)


def test_nest_solve(write):
    doc = {"h": 2, "ranks": [1], "B": [[1, 0], [0, 0]], "C": [[1, 0], [0, 1]]}
    code, rep, _ = call("nest-solve", "--problem", write("n.json", doc))
    assert code == 0 and not rep["feasible"] and rep["certificate"]["min_eig"] == pytest.approx(-1)
    doc = {"h": 2, "ranks": [1], "U": [[1], [0]], "V": [[0.5], [0]]}
    code, rep, _ = call("nest-solve", "--vector", "--problem", write("n.json", doc))
    assert code == 0 and rep["feasible"] and rep["residuals"]["equation"] <= 1e-12
    assert call("nest-solve", "--problem", write("n.json", doc))[0] == 2


def test_realize_round_trip_and_schur_check(write):
    pts = [disc_point(t) for t in (0, 0.3, 0.6j)]
    sdoc = ser.encode_samples(schur_from_hardy(disc_monomial(1), pts))
    spath = write("s.json", sdoc)
    code, rep, _ = call("schur-check", "--samples", spath)
    assert code == 0 and rep["is_cpd"]
    code, rep, _ = call("realize", "--samples", spath)
    assert code == 0 and rep["realizable"] and rep["verification"]["sample_error"] <= 1e-9
    cpath = write("c.json", rep["colligation"])
    code, rep, _ = call("transfer-eval", "--colligation", cpath, "--point", write("p.json", ser.encode_point(disc_point(-0.4))))
    assert code == 0 and ser.decode_complex(rep["value"][0][0]) == pytest.approx(-0.4, abs=1e-9)
    bad = {"frame": DISC, "samples": [{"point": ser.encode_point(disc_point(0.2)), "value": [[1.5]]}]}
    code, rep, _ = call("realize", "--samples", write("b.json", bad))
    assert code == 0 and not rep["realizable"] and rep["min_eig"] < 0


def test_selftest_and_determinism():
    code, rep, err = call("selftest", "--seed", "4")
    assert code == 0 and rep["passed"] and "passed=True" in err
    assert call("selftest", "--seed", "4")[1] == rep


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    assert "np-solve" in capsys.readouterr().out
