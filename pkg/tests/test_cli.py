import io
import json
import math

import pytest

from qcheeger.cli import parse_grid, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_eig_alpha_zero_is_zero():
    code, out = call("eig", "fig1", "--alpha", "0")
    assert code == 0
    assert out.strip() == "0,secular,0"


def test_eig_subgraph_file(tmp_path):
    spec = tmp_path / "sub.json"
    spec.write_text(json.dumps({"segments": [{"edge": "e", "a": 0.2, "b": 0.7}]}))
    code, out = call("eig", "interval.json", "--subgraph", str(spec), "--dirichlet")
    lam, method, _ = out.strip().split(",")
    assert code == 0 and method == "secular"
    assert float(lam) == pytest.approx((math.pi / 0.5) ** 2, rel=1e-12)


def test_eig_samples_csv(tmp_path):
    spec = tmp_path / "sub.json"
    spec.write_text(json.dumps({"segments": [{"edge": "e", "a": 0.0, "b": 0.6}], "descendants": [[[0, "a"]]]}))
    csv_path = tmp_path / "f.csv"
    code, _ = call("eig", "interval", "--subgraph", str(spec), "--alpha", "2", "--samples", "5", "--samples-csv", str(csv_path))
    lines = csv_path.read_text().splitlines()
    assert code == 0
    assert lines[0] == "edge,offset,value"
    assert len(lines) == 6
    assert all(float(l.split(",")[2]) > 0 for l in lines[1:])


def test_cheeger_fig1(tmp_path):
    j, c = tmp_path / "r.json", tmp_path / "r.csv"
    code, out = call("cheeger", "fig1.json", "--k", "3", "--json", str(j), "--csv", str(c))
    doc = json.loads(j.read_text())
    assert code == 0
    assert doc["value"] == pytest.approx(1.0, abs=1e-9)
    assert sorted(doc["argmin_boundary_sizes"]) == [1, 1, 2]
    assert c.read_text().splitlines()[0] == "class_id,value,lower_bound,status"
    assert json.loads(out)["value"] == doc["value"]


def test_cheeger_count_mode():
    code, out = call("cheeger", "fig7", "--k", "2", "--mode", "count")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0.25, abs=1e-9)


def test_h1_whole_graph_is_zero():
    code, out = call("h1", "star3")
    assert code == 0
    assert json.loads(out)["value"] == 0.0


def test_limit_study_csv_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["limit-study", "interval", "--k", "2", "--direction", "infinity", "--grid", "1:100:3", "--restarts", "2"]
    assert call(*args, "--csv", str(a))[0] == 0
    assert call(*args, "--csv", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert rows[0] == "alpha,Lambda,Lambda_over_alpha,class_id,partition_distance"
    assert len(rows) == 4


def test_robin_partition_json(tmp_path):
    j = tmp_path / "r.json"
    code, _ = call("robin-partition", "interval", "--k", "2", "--alpha", "1", "--restarts", "2", "--json", str(j))
    doc = json.loads(j.read_text())
    assert code == 0
    assert doc["value"] == pytest.approx(1.7070529755509, rel=1e-9)
    assert doc["diagnostics"]["spread"] < 1e-8


def test_dirichlet_partition():
    code, out = call("dirichlet-partition", "path2", "--k", "2", "--restarts", "2")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(math.pi**2 / 4, rel=1e-9)


def test_missing_graph_is_machine_readable(capsys):
    code, _ = call("eig", "no-such-graph", "--alpha", "1")
    err = json.loads(capsys.readouterr().err)
    assert code == 2
    assert err["error"] == "GraphFileError"


def test_malformed_graph_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"vertices": ["a", "b"], "edges": [{"id": "e", "u": "a", "v": "b"}]}))
    code, _ = call("cheeger", str(p), "--k", "2")
    err = json.loads(capsys.readouterr().err)
    assert code == 2
    assert "length" in err["message"]


def test_invalid_numbers_rejected(capsys):
    assert call("robin-partition", "interval", "--k", "0", "--alpha", "1")[0] == 2
    assert call("eig", "interval", "--alpha", "-1")[0] == 2
    capsys.readouterr()


def test_grid_parsing():
    assert parse_grid("1e-1:1e-4:4") == pytest.approx([1e-1, 1e-2, 1e-3, 1e-4])
    assert parse_grid("2:2:1") == [2.0]
    with pytest.raises(Exception):
        parse_grid("1:2")


def test_jobs_env(monkeypatch):
    monkeypatch.setenv("QC_JOBS", "2")
    code, out = call("cheeger", "star3", "--k", "2")
    assert code == 0
    assert json.loads(out)["value"] > 0


def test_check_command():
    code, out = call("check", "--samples", "10")
    assert code == 0
    assert out.count("PASS") == 10
