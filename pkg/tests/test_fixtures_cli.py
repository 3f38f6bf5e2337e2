import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cclab.cli import main, parse_grid, GridError
from cclab.errors import FixtureError, FixtureFormatError
from cclab.families import SweepResult, classify, sweep
from cclab.fixtures import (BUNDLED, build, bundled, bundled_names, decode_array, document, dumps, encode_array,
                            format_csv, lie_payload, loads, parse_csv, read_csv, write_csv, write_document)
from cclab.lie import LieAlgebraData, su2


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def emitted(tmp_path):
    def emit(name):
        code, out, _ = run("examples", "emit", name, str(tmp_path))
        assert code == 0
        return out.strip()
    return emit


def test_list_has_at_least_nine_names():
    code, out, _ = run("examples", "list")
    names = out.split()
    assert code == 0 and len(names) >= 9
    assert {"su2", "su3", "so_n", "hopf", "nonabelian_bundle", "heisenberg", "example3", "theorem2",
            "theorem3"} <= set(names)


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_bundled_fixture_validates(name, emitted):
    code, out, err = run("validate", emitted(name))
    assert code == 0, out + err
    assert out.strip().endswith("valid")


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_document_round_trip(name):
    doc = bundled(name)
    assert loads(dumps(doc)) == doc
    assert dumps(loads(dumps(doc))) == dumps(doc)


def test_unknown_example_lists_names():
    code, _, err = run("examples", "emit", "nope", "/tmp")
    assert code == 1
    assert "hopf" in err


def test_broken_jacobi_exits_one(tmp_path):
    c = np.random.default_rng(0).normal(size=(4, 4, 4))
    c = c - c.transpose(0, 2, 1)
    path = tmp_path / "bad.json"
    write_document(document("lie_algebra", lie_payload(LieAlgebraData(c))), path)
    code, out, _ = run("validate", str(path))
    assert code == 1
    assert "Jacobi residual" in out and "FAIL" in out


def test_truncated_file_exits_two(tmp_path, emitted):
    src = emitted("su2")
    text = open(src).read()
    path = tmp_path / "cut.json"
    path.write_text(text[: len(text) // 2])
    assert run("validate", str(path))[0] == 2
    assert run("curvature", str(path))[0] == 2
    assert run("validate", str(tmp_path / "missing.json"))[0] == 2


def test_wrong_shape_is_domain_failure(tmp_path):
    doc = bundled("su2").to_dict()
    doc["payload"]["c"]["data"] = doc["payload"]["c"]["data"][:-1]
    path = tmp_path / "short.json"
    path.write_text(json.dumps(doc))
    assert run("validate", str(path))[0] == 1


def test_schema_errors():
    with pytest.raises(FixtureFormatError, match="schema_version"):
        loads('{"schema_version": "9", "kind": "lie_algebra", "payload": {}}')
    with pytest.raises(FixtureFormatError, match="kind"):
        loads('{"schema_version": "1", "kind": "nope", "payload": {}}')
    with pytest.raises(FixtureFormatError, match="missing"):
        build(loads('{"schema_version": "1", "kind": "lie_algebra", "payload": {}}'))
    with pytest.raises(FixtureError):
        decode_array({"shape": [2, 2], "data": [1.0]})
    with pytest.raises(FixtureFormatError):
        decode_array({"shape": [1], "data": ["x"]})


def test_hopf_curvature_report(emitted):
    code, out, _ = run("curvature", emitted("hopf"), "--eps", "0.5", "--spectrum")
    assert code == 0
    assert out.splitlines()[0] == "spectrum 0.25 0.25 3.25"


def test_su3_circle_quotient_reports_negative(emitted):
    code, out, _ = run("curvature", emitted("su3_circle_quotient"))
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert code == 0 and float(lines["min_eig"]) < -1e-3


def test_torus_curvature_is_zero(emitted):
    code, out, _ = run("curvature", emitted("torus"), "--spectrum")
    assert code == 0
    assert set(out.splitlines()[0].split()[1:]) == {"0"}


def test_sweep_classifications(emitted, tmp_path):
    expected = {"heisenberg": "almost_nonnegative", "su3_circle_quotient": "diverges_to_minus_infinity",
                "example3": "uniformly_bounded_below"}
    for name, label in expected.items():
        out_csv = tmp_path / f"{name}.csv"
        code, out, _ = run("sweep", emitted(name), "--out", str(out_csv))
        assert code == 0
        assert out.split()[1] == label
        assert read_csv(out_csv).classified == label


def test_sweep_to_stdout_and_grid(emitted):
    code, out, _ = run("sweep", emitted("hopf"), "--grid", "1:1e-2:log:3")
    assert code == 0
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert rows[0] == "eps,min_eig,max_eig,min_sec,max_sec"
    assert [r.split(",")[0] for r in rows[1:]] == ["1", "0.1", "0.01"]


@pytest.mark.parametrize("grid", ["1:1e-2:lin:3", "1:1e-2:log", "a:b:log:3", "1e-2:1:log:3", "1:0:log:3",
                                  "1:1e-2:log:1"])
def test_malformed_grid_exits_two(grid, emitted):
    assert run("sweep", emitted("hopf"), "--grid", grid)[0] == 2
    with pytest.raises(GridError):
        parse_grid(grid)


def test_sweep_needs_family(emitted):
    assert run("sweep", emitted("su2"))[0] == 1


def test_bad_tolerance_env(monkeypatch, emitted):
    path, su3 = emitted("su2"), emitted("su3")
    for bad in ("abc", "0", "-1e-10", "nan"):
        monkeypatch.setenv("CCLAB_TOL", bad)
        assert run("validate", path)[0] == 2, bad
    # su3 residuals sit at rounding level: a tolerance below that rejects it
    monkeypatch.setenv("CCLAB_TOL", "1e-30")
    assert run("validate", su3)[0] == 1
    monkeypatch.setenv("CCLAB_TOL", "1e-10")
    assert run("validate", su3)[0] == 0


def test_usage_errors():
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("curvature", "x.json", "--eps", "-1")[0] == 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=8), st.integers(0, 2**32 - 1))
def test_csv_round_trip(vals, seed):
    rng = np.random.default_rng(seed)
    n = len(vals)
    eps = np.sort(rng.uniform(1e-4, 1, n))[::-1]
    eps = np.unique(eps)[::-1]
    if eps.size < 2:
        return
    cols = [np.array(vals[: eps.size])] + [rng.normal(size=eps.size) for _ in range(3)]
    r = SweepResult(eps, *cols, summary=classify(eps, cols[0]))
    text = format_csv(r)
    back = parse_csv(text)
    for a, b in zip((r.eps, r.min_eig, r.max_eig, r.min_sec, r.max_sec),
                    (back.eps, back.min_eig, back.max_eig, back.min_sec, back.max_sec)):
        np.testing.assert_allclose(b, a, rtol=1e-11, atol=1e-300)
    # the fitted slope is refit from rounded rows, every other line must survive verbatim
    again = format_csv(back).splitlines()
    lines = text.splitlines()
    slope = [i for i, ln in enumerate(lines) if ln.startswith("# tail_slope=")][0]
    assert again[:slope] + again[slope + 1:] == lines[:slope] + lines[slope + 1:]
    s0, s1 = (ln.split("=")[1] for ln in (lines[slope], again[slope]))
    assert s0 == s1 or abs(float(s0) - float(s1)) < 1e-6


def test_csv_file_round_trip(tmp_path):
    r = sweep(build(bundled("hopf")), np.logspace(0, -2, 5))
    path = tmp_path / "s.csv"
    write_csv(r, path)
    assert open(path, "rb").read().count(b"\r") == 0
    assert read_csv(path).classified == r.classified
    with pytest.raises(FixtureFormatError):
        parse_csv("eps,bad\n1,2\n")


def test_array_encoding_round_trip():
    a = np.random.default_rng(0).normal(size=(2, 3, 4))
    np.testing.assert_array_equal(decode_array(encode_array(a)), a)


def test_names_sorted_and_lie_payload_round_trip():
    assert bundled_names() == sorted(bundled_names())
    g = build(document("lie_algebra", lie_payload(su2())))
    np.testing.assert_array_equal(g.c, su2().c)
