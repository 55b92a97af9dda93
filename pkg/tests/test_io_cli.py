import json

import numpy as np
import pytest
from hypothesis import given

from conftest import laurent_polys, symbol_matrices
from rhsing.catalog import example_gprime
from rhsing.cli import main
from rhsing.io import (
    ParseError, dumps_report, function_from_json, function_to_json, load_symbol, poly_from_json, poly_to_json,
    rhs_from_json, rhs_to_json, symbol_from_json, symbol_to_json,
)
from rhsing.laurent import I, LaurentPoly, SymbolMatrix, ZETA
from rhsing.spaces import BoundaryFunction, ConstrainedFunction, fft_sample


@given(laurent_polys())
def test_poly_round_trip(p):
    assert poly_from_json(json.loads(json.dumps(poly_to_json(p)))) == p


@given(symbol_matrices(3))
def test_symbol_round_trip(G):
    assert symbol_from_json(json.loads(json.dumps(symbol_to_json(G)))) == G


def test_function_round_trips():
    v = BoundaryFunction.exact(LaurentPoly({-1: 2, 0: 1}), k=1, alpha=0.25)
    w = function_from_json(function_to_json(v))
    assert w.laurent == v.laurent and (w.k, w.alpha) == (1, 0.25)
    s = fft_sample(LaurentPoly({-1: 2, 0: 1}), 4)
    np.testing.assert_array_equal(function_from_json(function_to_json(s)).samples, s.samples)


def test_rhs_round_trip():
    rhs = [ConstrainedFunction(1, BoundaryFunction.exact(LaurentPoly({0: 1, -1: -1})))]
    back = rhs_from_json(rhs_to_json(rhs))
    assert back[0].m == 1 and back[0].core.laurent == rhs[0].core.laurent
    single = rhs_from_json({"m": 1, "core": function_to_json(rhs[0].core)})
    assert single[0].core.laurent == rhs[0].core.laurent


@pytest.mark.parametrize("payload, where", [
    ({"n": 1, "entries": [[{"terms": [{"k": 0, "re": "0.5"}]}]]}, "entries[0][0].terms[0].re"),
    ({"n": 2, "entries": [[{"terms": []}]]}, "2x2"),
    ({"n": 1, "entries": [[{"terms": [{"k": "a"}]}]]}, "integer 'k'"),
    ([1, 2], "symbol"),
])
def test_symbol_parse_errors(payload, where):
    with pytest.raises(ParseError) as info:
        symbol_from_json(payload)
    assert where in str(info.value)


def test_unknown_builtin():
    with pytest.raises(ParseError, match="@paper-example"):
        load_symbol("@nope")


def test_deterministic_report():
    rep = {"b": 1.0 / 3, "a": [np.float64(2.5), np.int64(3)], "c": LaurentPoly({1: 1})}
    assert dumps_report(rep) == dumps_report(dict(reversed(list(rep.items()))))
    assert '"b": 0.333333333333' in dumps_report(rep)


def _run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_cli_analyze_example(capsys):
    code, out = _run(capsys, ["analyze", "@paper-example-gtilde", "--profile", "1:0,2:2,1:0"])
    rep = json.loads(out)
    assert code == 0
    assert rep["partial_indices"] == [0, 1, 1, 4] and rep["maslov"] == 6 and rep["kernel_dim"] == 6


def test_cli_analyze_paper_example_default_profile(capsys):
    code, out = _run(capsys, ["analyze", "@paper-example", "--profile", "1:0,2:2,1:0"])
    rep = json.loads(out)
    assert code == 0 and rep["kernel_dim"] == 6 and rep["onto"]
    assert rep["diagnostics"]["well_defined"] is False


def _write(tmp_path, name, G):
    p = tmp_path / name
    p.write_text(json.dumps(symbol_to_json(G)))
    return str(p)


def test_cli_identity(tmp_path, capsys):
    code, out = _run(capsys, ["analyze", _write(tmp_path, "id.json", SymbolMatrix.identity(3))])
    rep = json.loads(out)
    assert code == 0 and rep["maslov"] == 0 and rep["kernel_dim"] == 3


def test_cli_circle_singular_exit_3(tmp_path, capsys):
    code, out = _run(capsys, ["analyze", _write(tmp_path, "s.json", SymbolMatrix([[1 - ZETA]]))])
    assert code == 3 and "symbol-singular-on-circle" in out


def test_cli_reduce_flag_handles_singular(tmp_path, capsys):
    code, out = _run(capsys, ["analyze", "--reduce", _write(tmp_path, "s.json", SymbolMatrix([[1 - ZETA]]))])
    assert code == 0


def test_cli_corrupted_json_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 1,\n "entries": [[}')
    code, out = _run(capsys, ["pipeline", str(p)])
    assert code == 1 and "line 2" in out


def test_cli_pipeline_invertible_matches_analyze(tmp_path, capsys):
    path = _write(tmp_path, "g.json", SymbolMatrix([[ZETA, 1], [0, 1]]))
    code, out = _run(capsys, ["pipeline", path])
    pipe = json.loads(out)
    _, out = _run(capsys, ["analyze", path])
    ana = json.loads(out)
    assert code == 0 and pipe["status"] == "PASS"
    assert pipe["analysis"]["partial_indices"] == ana["partial_indices"]
    assert pipe["analysis"]["kernel_dim"] == ana["kernel_dim"]


def test_cli_pipeline_example(capsys):
    code, out = _run(capsys, ["pipeline", "@paper-example-gprime"])
    rep = json.loads(out)
    assert rep["reduction"]["m"] == [0, 2, 2, 0]
    assert rep["blocks"] == [[1, 0], [2, 2], [1, 0]]
    assert rep["analysis"]["partial_indices"] == [0, 1, 1, 4]
    assert rep["oracle"]["block_diagonal"]["dims"] == {"32": 6, "64": 6}
    # the full symbol is not well defined on the constrained spaces; see README
    assert rep["oracle"]["full_symbol"]["dims"] == {"32": 4, "64": 4}
    assert code == 2 and rep["status"] == "FAIL"


def test_cli_output_is_byte_identical(capsys):
    argv = ["analyze", "@paper-example-gtilde", "--profile", "1:0,2:2,1:0"]
    assert _run(capsys, argv)[1] == _run(capsys, argv)[1]


def test_cli_text_format(capsys):
    code, out = _run(capsys, ["analyze", "@paper-example-gtilde", "--profile", "1:0,2:2,1:0", "--format", "text"])
    assert code == 0 and "kernel" in out.lower()


def test_cli_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("RH_TOLERANCE", "1e-6")
    _, out = _run(capsys, ["analyze", "@paper-example-gtilde", "--profile", "1:0,2:2,1:0"])
    assert json.loads(out)["audit"]["tolerance"] == 1e-6


def test_cli_output_file(tmp_path, capsys):
    target = tmp_path / "rep.json"
    code, out = _run(capsys, ["reduce", "@paper-example-gprime", "-o", str(target)])
    rep = json.loads(target.read_text())
    assert code == 0 and out == ""
    assert rep["m"] == [0, 2, 2, 0] and rep["reassembles"]


def test_cli_rotate(tmp_path, capsys):
    # (zeta - i)^2 vanishes at i; a quarter turn moves the zero to 1
    G = SymbolMatrix([[LaurentPoly({0: -I, 1: 1}) ** 2]])
    path = _write(tmp_path, "r.json", G)
    assert _run(capsys, ["reduce", path])[0] == 3
    code, out = _run(capsys, ["reduce", "--rotate", "90", path])
    assert code == 0 and json.loads(out)["m"] == [2]


def test_cli_scalar(capsys):
    code, out = _run(capsys, ["scalar", "--l", "3", "--m", "1", "--sign", "1"])
    rep = json.loads(out)
    assert code == 0 and rep["kernel_dim"] == 3 and set(rep["oracle_dims"].values()) == {3}


def test_cli_solve_scalar(tmp_path, capsys):
    p = tmp_path / "phi.json"
    p.write_text(json.dumps(function_to_json(BoundaryFunction.exact(LaurentPoly({-1: -1, 0: 2, 1: -1})))))
    code, out = _run(capsys, ["solve-scalar", str(p), "--r", "0", "--m", "1"])
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "solved" and rep["check"] is True
    code, out = _run(capsys, ["solve-scalar", str(p), "--r", "-1", "--m", "1"])
    assert json.loads(out)["status"] == "not-surjective"


def test_cli_solve(tmp_path, capsys):
    rhs = tmp_path / "rhs.json"
    comps = [ConstrainedFunction(0, BoundaryFunction.exact(LaurentPoly({-1: 1, 0: 3, 1: 1}))) for _ in range(2)]
    rhs.write_text(json.dumps(rhs_to_json(comps)))
    path = _write(tmp_path, "g.json", SymbolMatrix([[ZETA, 1], [0, 1]]))
    code, out = _run(capsys, ["solve", path, "--rhs", str(rhs), "--truncation", "16"])
    rep = json.loads(out)
    assert code == 0 and rep["residual"] < 1e-8


def test_cli_batch(tmp_path, capsys):
    d = tmp_path / "batch"
    d.mkdir()
    _write(d, "a.json", SymbolMatrix.identity(2))
    _write(d, "b.json", SymbolMatrix([[1 - ZETA]]))
    code, out = _run(capsys, ["analyze", "--batch", str(d)])
    rep = json.loads(out)
    assert set(rep) == {"a.json", "b.json"}
    assert rep["a.json"]["kernel_dim"] == 2
    assert code == 3


def test_cli_selftest(capsys):
    code, out = _run(capsys, ["selftest"])
    assert code == 0 and all(c["status"] == "PASS" for c in json.loads(out)["checks"])


def test_cli_bad_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("RH_TOLERANCE", "abc")
    with pytest.raises(SystemExit) as info:
        main(["selftest"])
    assert info.value.code == 2


def test_example_symbol_round_trip_through_file(tmp_path):
    assert load_symbol(_write(tmp_path, "gp.json", example_gprime())) == example_gprime()
