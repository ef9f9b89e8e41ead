import json

import numpy as np
import pytest

from instances import ASYMPTOTE_HYPERBOLA, ASYMPTOTIC_PAIR, CROSSING_LINES, DOUBLE_LINE_HYPERBOLA
from qmeet import cli


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    def make(name, pair, **extra):
        return _write(tmp_path / name, {**cli.problem_to_dict(*pair), **extra})
    return make


def test_decide_asymptote_json(files, capsys):
    code = cli.run(["decide", files("asymptote.json", ASYMPTOTE_HYPERBOLA), "--format", "json"])
    out = json.loads(capsys.readouterr().out)
    assert code == 1
    assert out["verdict"] == "DISJOINT"
    assert out["certificate"]["type"] == "Separation"


def test_decide_crossing_lines(files, capsys):
    code = cli.run(["decide", files("lines.json", CROSSING_LINES)])
    out = capsys.readouterr().out
    assert code == 0
    assert "INTERSECT" in out
    w = [float(x) for x in out.split("witness:")[1].split("\n")[0].split()]
    np.testing.assert_allclose(w, [0.0, 0.0], atol=1e-6)


def test_oracle_double_line(files, capsys):
    code = cli.run(["oracle", files("double_line.json", DOUBLE_LINE_HYPERBOLA), "--seed", "7", "--format", "json"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["bestValue"] <= 0.02
    assert out["onBoundary"]


def test_trace_and_oracle_check(files, capsys):
    prob = files("asymptotic.json", ASYMPTOTIC_PAIR)
    code = cli.run(["decide", prob, "--format", "json", "--trace", "--oracle-check"])
    out = json.loads(capsys.readouterr().out)
    assert code == 1
    assert out["trace"] and out["oracle"]["consistent"]
    assert out["po4Value"] == pytest.approx(0.0, abs=1e-6)


def test_certify_round_trip(files, tmp_path, capsys):
    prob = files("asymptotic.json", ASYMPTOTIC_PAIR)
    cli.run(["decide", prob, "--format", "json"])
    cert = tmp_path / "cert.json"
    cert.write_text(capsys.readouterr().out)
    assert cli.run(["certify", prob, str(cert)]) == 0
    # the same certificate does not prove the asymptote pair disjoint
    assert cli.run(["certify", files("asymptote.json", ASYMPTOTE_HYPERBOLA), str(cert)]) == 1


def test_plain_convention_and_symmetrization(tmp_path, capsys):
    # f1 = x1 written with c = (1, 0) in the plain convention, f2 = x1 x2 - 1 with an asymmetric A
    doc = {"schema": "qmeet/1", "convention": "plain",
           "f1": {"A": [[0, 0], [0, 0]], "a": [1, 0], "a0": 0},
           "f2": {"A": [[0, 1], [0, 0]], "a": [0, 0], "a0": -1}}
    code = cli.run(["decide", _write(tmp_path / "p.json", doc), "--format", "json"])
    captured = capsys.readouterr()
    assert code == 1
    assert "symmetrized" in captured.err
    assert json.loads(captured.out)["certificate"]["type"] == "Separation"


@pytest.mark.parametrize("doc, needle", [
    ({"schema": "qmeet/2"}, "schema"),
    ({"f1": {"A": [[1]], "a": [0], "a0": 0}}, "f2"),
    ({"f1": {"A": [[1, 0]], "a": [0], "a0": 0}, "f2": {"A": [[1]], "a": [0], "a0": 0}}, "f1.A"),
    ({"f1": {"A": [[1]], "a": [0, 1], "a0": 0}, "f2": {"A": [[1]], "a": [0], "a0": 0}}, "f1.a"),
    ({"f1": {"A": [[1]], "a": [0], "a0": "x"}, "f2": {"A": [[1]], "a": [0], "a0": 0}}, "f1"),
    ({"f1": {"A": [[1]], "a": [0], "a0": 0}, "f2": {"A": np.eye(2).tolist(), "a": [0, 0], "a0": 0}}, "dimension"),
    ({"f1": {"A": [[1]], "a": [0], "a0": 0}, "f2": {"A": [[1]], "a": [0], "a0": 0},
      "tolerance": {"bogus": 1}}, "tolerance.bogus"),
    ({"f1": {"A": [[1]], "a": [0], "a0": 0}, "f2": {"A": [[1]], "a": [0], "a0": 0},
      "convention": "half"}, "convention"),
])
def test_data_errors_exit_65(tmp_path, capsys, doc, needle):
    assert cli.run(["decide", _write(tmp_path / "bad.json", doc)]) == 65
    assert needle in capsys.readouterr().err


def test_json_syntax_error_reports_line(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"schema": "qmeet/1",\n "f1": }')
    assert cli.run(["decide", str(path)]) == 65
    assert "line 2" in capsys.readouterr().err


def test_usage_errors_exit_64(files, tmp_path, monkeypatch, capsys):
    assert cli.run([]) == 64
    assert cli.run(["explode"]) == 64
    assert cli.run(["decide", str(tmp_path / "missing.json")]) == 64
    prob = files("double_line.json", DOUBLE_LINE_HYPERBOLA)
    assert cli.run(["decide", prob, "--tol", "-1"]) == 64
    monkeypatch.setenv("QMEET_TOL", "not-a-number")
    assert cli.run(["decide", prob]) == 64


def test_tolerance_precedence(tmp_path, monkeypatch, capsys):
    # circles of radius 1 and 1.001: v ~ 5e-7, disjoint at tight tolerance only
    pair_doc = {"schema": "qmeet/1",
                "f1": {"A": np.eye(2).tolist(), "a": [0, 0], "a0": -1},
                "f2": {"A": np.eye(2).tolist(), "a": [0, 0], "a0": -(1.001 ** 2)}}
    prob = _write(tmp_path / "near.json", pair_doc)
    loose = _write(tmp_path / "loose.json", {**pair_doc, "tolerance": {"decisionTol": 1e-3}})
    assert cli.run(["decide", prob]) == 1
    monkeypatch.setenv("QMEET_TOL", "1e-3")
    assert cli.run(["decide", prob]) != 1  # env loosens the threshold
    assert cli.run(["decide", prob, "--tol", "1e-9"]) == 1  # flag wins over env
    monkeypatch.delenv("QMEET_TOL")
    assert cli.run(["decide", loose]) != 1  # file overrides defaults
    assert cli.run(["decide", loose, "--tol", "1e-9"]) == 1  # flag wins over file
    capsys.readouterr()


def test_batch_preserves_order(tmp_path, capsys):
    pairs = [ASYMPTOTE_HYPERBOLA, CROSSING_LINES, ASYMPTOTIC_PAIR, CROSSING_LINES, DOUBLE_LINE_HYPERBOLA] * 3
    docs = [cli.problem_to_dict(*p, pid=f"case{k}") for k, p in enumerate(pairs)]
    path = _write(tmp_path / "batch.json", {"instances": docs})
    assert cli.run(["batch", path, "--format", "json", "--jobs", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [o["id"] for o in out] == [f"case{k}" for k in range(len(pairs))]
    expected = {id(CROSSING_LINES): "INTERSECT"}
    assert [o["verdict"] for o in out] == [expected.get(id(p), "DISJOINT") for p in pairs]


def test_batch_reports_bad_instance(tmp_path, capsys):
    docs = [cli.problem_to_dict(*ASYMPTOTE_HYPERBOLA), {"schema": "qmeet/1"}]
    assert cli.run(["batch", _write(tmp_path / "b.json", docs)]) == 65
    out = capsys.readouterr().out
    assert "0: DISJOINT" in out and "instances[1]" in out
