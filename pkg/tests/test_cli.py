import json
from pathlib import Path

import pytest

from idmeasure import docs
from idmeasure.cli import main
from idmeasure.maxplus import NEG_INF as N
from idmeasure.measures import from_density
from idmeasure.tower import eta, from_measure, element, point
from idmeasure.transport import distance

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_dist(capsys):
    code, out, _ = run(capsys, "dist", DATA / "x3.json", DATA / "delta_a.json", DATA / "delta_c.json")
    assert code == 0 and out.strip() == "2"


def test_dist_with_witness_json(capsys, X3):
    code, out, _ = run(capsys, "dist", DATA / "x3.json", DATA / "mu.json", DATA / "nu.json", "--witness", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["distance"] == 1
    xi = docs.coupling_from_doc(doc["witness"], X3)
    mu, nu = from_density(X3, [0, -1, N]), from_density(X3, [-1, 0, N])
    assert xi == distance(mu, nu).witness


def test_dist_rejects_unnormalized(capsys):
    code, _, err = run(capsys, "dist", DATA / "x3.json", DATA / "mu.json", DATA / "bad.json")
    assert code == 1 and "NotNormalized" in err


def test_rejects_floats_and_unknown_fields(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"kind": "measure", "space": "X3", "density": {"a": 0.0}}')
    code, _, err = run(capsys, "dist", DATA / "x3.json", p, p)
    assert code == 1 and "float" in err
    q = write(tmp_path, "q.json", {"kind": "measure", "space": "X3", "density": {"a": 0}, "extra": 1})
    code, _, err = run(capsys, "dist", DATA / "x3.json", q, q)
    assert code == 1 and "extra" in err


def test_triangle_violation_reported(capsys, tmp_path):
    sp = write(tmp_path, "s.json", {"kind": "space", "labels": ["a", "b", "c"], "dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})
    code, _, err = run(capsys, "dist", sp, DATA / "delta_a.json", DATA / "delta_a.json")
    assert code == 1 and "TriangleViolation(a,b,c)" in err


def test_flatten_project_embed(capsys, X3):
    code, out, _ = run(capsys, "flatten", DATA / "x3.json", DATA / "mixture.json")
    assert code == 0 and docs.measure_from_doc(json.loads(out), X3) == from_density(X3, [0, -1, N])
    code, out, _ = run(capsys, "project", DATA / "x3.json", DATA / "dd_a.json", "--level", "1")
    assert json.loads(out)["density"] == {"a": 0, "b": "-inf", "c": "-inf"}
    code, out, _ = run(capsys, "embed", DATA / "x3.json", DATA / "delta_a.json", "--level", "3")
    _, e = docs.tower_from_doc(json.loads(out), X3)
    assert e == eta(eta(eta(point(0))))


def test_level_errors_name_levels(capsys):
    code, _, err = run(capsys, "flatten", DATA / "x3.json", DATA / "mu.json")
    assert code == 1 and "level-1" in err and "level 0" in err


def test_push(capsys, X3):
    code, out, _ = run(capsys, "push", DATA / "x3.json", DATA / "x3.json", DATA / "collapse.json", DATA / "mu.json")
    assert code == 0 and docs.measure_from_doc(json.loads(out), X3).density == (0, N, N)


def test_dplus_cheb_oracle(capsys):
    assert run(capsys, "dplus", DATA / "x3.json", DATA / "delta_a.json", DATA / "mu.json")[1].strip() == "1"
    assert run(capsys, "dplus", DATA / "x3.json", DATA / "dd_a.json", DATA / "delta_c.json")[1].strip() == "2"
    code, out, _ = run(capsys, "cheb", DATA / "x3.json", DATA / "delta_a.json", DATA / "delta_c.json", "--format", "json")
    doc = json.loads(out)
    assert doc["radius"] == 1 and doc["center"]["density"]["b"] == 0
    assert run(capsys, "oracle", DATA / "x3.json", DATA / "mu.json", DATA / "nu.json")[1].strip() == "1"


def test_p7(capsys):
    code, out, _ = run(capsys, "p7", DATA / "x3.json", DATA / "ab.json", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert (doc["epsilon"], doc["lhs"], doc["holds"], doc["set_distance"]) == (1, 1, True, 1)


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--cases", "3", "--seed", "5")
    assert code == 0 and "total failures: 0" in out
    code2, out2, _ = run(capsys, "verify", "--cases", "3", "--seed", "5")
    assert out2 == out
    code, out, _ = run(capsys, "verify", "--cases", "2", "--format", "json", "--check", "p7")
    assert json.loads(out)["checks"][0]["name"] == "p7"
    assert run(capsys, "verify", "--check", "nope")[0] == 1


def test_verify_failure_exit_code(capsys, monkeypatch):
    from idmeasure import transport

    honest = transport.distance_value
    monkeypatch.setattr(transport, "distance_value", lambda a, b: honest(a, b) * 2 + (a != b))
    code, out, _ = run(capsys, "verify", "--cases", "2", "--check", "solver_oracle")
    assert code == 2 and "FAIL" in out


def test_cli_matches_library(capsys, tmp_path, X3):
    M = element([(0, from_measure(from_density(X3, [0, -1, N]))), (-1, eta(point(2)))])
    p = write(tmp_path, "M.json", docs.tower_to_doc(X3, M))
    from idmeasure.tower import psi

    out = run(capsys, "flatten", DATA / "x3.json", p)[1]
    assert docs.measure_from_doc(json.loads(out), X3) == from_density(X3, [0, -1, -1])
    assert from_measure(docs.measure_from_doc(json.loads(out), X3)) == psi(M)


@pytest.mark.parametrize("name", ["x3.json", "mu.json", "nu.json", "mixture.json", "dd_a.json"])
def test_document_round_trip(name, X3):
    raw = json.loads((DATA / name).read_text())
    kind = raw["kind"]
    if kind == "space":
        parsed = docs.space_from_doc(raw)
        assert docs.space_from_doc(docs.space_to_doc(parsed)) == parsed
        assert docs.space_to_doc(parsed) == raw
    elif kind == "measure":
        mu = docs.measure_from_doc(raw, X3)
        assert docs.measure_from_doc(docs.measure_to_doc(mu), X3) == mu
        printed = docs.measure_to_doc(mu)
        assert docs.measure_to_doc(docs.measure_from_doc(printed, X3)) == printed
    else:
        _, e = docs.tower_from_doc(raw, X3)
        assert docs.tower_to_doc(X3, e) == raw


def test_inline_space_and_name_mismatch(X3):
    mu = from_density(X3, [0, -1, N])
    inline = docs.measure_to_doc(mu, inline=True)
    assert docs.measure_from_doc(inline) == mu
    with pytest.raises(ValueError):
        docs.measure_from_doc({"kind": "measure", "space": "Y", "density": {"a": 0}}, X3)
    with pytest.raises(docs.DocumentError):
        docs.measure_from_doc({"kind": "measure", "space": "X3", "density": {"a": 0}})
