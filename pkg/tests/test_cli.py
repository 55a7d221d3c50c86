import csv
import io
import json
import re
from importlib import resources

import jsonschema
import pytest
from click.testing import CliRunner

from qgrkit.cli import main


def schema(name):
    return json.loads(resources.files("qgrkit").joinpath("schemas", name).read_text())


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args) + ["--cache-dir", str(tmp_path / "cache"), "--jobs", "1"])

    return _run


def test_ext_examples(run):
    r = run("ext", "--n", "3", "chi(7)", "chi(5)", "--format", "json")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    jsonschema.validate(data, schema("ext_result.schema.json"))
    assert [row["dim"] for row in data["rows"]] == [0, 1, 0]
    r = run("ext", "--n", "2", "A(0)", "A(0)", "--format", "json")
    assert [row["dim"] for row in json.loads(r.stdout)["rows"]] == [1, 0, 0]
    r = run("ext", "--n", "3", "G(6)", "A(6)", "--format", "json")
    assert [row["dim"] for row in json.loads(r.stdout)["rows"]] == [1, 1, 0]


def test_table_json_csv_agree(run):
    args = ("ext", "--n", "3", "Q(6,4)", "Q(6,4)")
    table = run(*args).output
    js = json.loads(run(*args, "--format", "json").output)
    rows = list(csv.DictReader(io.StringIO(run(*args, "--format", "csv").output)))
    t_dims = [int(x) for x in re.findall(r"dim=(\d+)", table)]
    assert t_dims == [r["dim"] for r in js["rows"]] == [int(r["dim"]) for r in rows] == [1, 0, 1]


def test_shifted_objects(run):
    r = run("ext", "--n", "3", "chi(7)", "chi(5)[1]", "--format", "json")
    assert [row["dim"] for row in json.loads(r.stdout)["rows"]] == [1, 0, 0]


def test_json_module_input(run, tmp_path):
    p = tmp_path / "q.json"
    p.write_text(json.dumps({"generators": [-8], "relations": [["x0"], ["x1^2"], ["x2"]]}))
    r = run("ext", "--n", "3", f"@{p}", "Q(8,6)", "--format", "json")
    assert r.exit_code == 0
    assert [row["dim"] for row in json.loads(r.stdout)["rows"]] == [1, 0, 1]


@pytest.mark.parametrize("args", [
    ("ext", "--n", "3", "chi(7", "A(0)"),
    ("ext", "--n", "1", "A(0)", "A(0)"),
    ("ext", "--n", "3", "A(0)", "A(0)", "--imax", "3"),
    ("verify", "--n", "3", "ec_9"),
    ("mutate", "--n", "3", "--object", "chi(4)"),
    ("ext", "--n", "3", "Q(30,0)", "A(0)"),
])
def test_usage_errors(run, args):
    r = run(*args)
    assert r.exit_code == 2, r.output


def test_parse_error_reports_position(run):
    r = run("ext", "--n", "3", "chi(7", "A(0)")
    assert "position 5" in r.output


def test_stabilization_failure_exit(run):
    r = run("ext", "--n", "2", "chi(0)", "chi(0)", "--trunc-start", "0", "--trunc-cap", "1")
    assert r.exit_code == 3


def test_oracle_disagreement_exit(run, monkeypatch):
    import qgrkit.oracles as orc

    monkeypatch.setattr(orc, "applicable_oracles", lambda M, N: [("fake", lambda M, N, i: [9, 9, 9])])
    r = run("ext", "--n", "2", "A(0)", "A(0)")
    assert r.exit_code == 1
    assert "oracle disagreement" in r.output


def test_hilbert(run):
    r = run("hilbert", "--n", "2", "--kmax", "5", "--format", "json")
    assert r.exit_code == 0
    rows = json.loads(r.stdout)["rows"]
    assert [x["enumeration"] for x in rows] == [1, 1, 2, 3, 4, 6]
    assert all(x["match"] for x in rows)


def test_resolve(run):
    r = run("resolve", "--n", "3", "chi(0)", "--format", "json")
    mods = json.loads(r.stdout)["modules"]
    assert [m["rank"] for m in mods] == [1, 3, 4, 4]


def test_mutate(run):
    r = run("mutate", "--n", "3", "--left", "A(6),chi(6)", "--object", "chi(4)", "--format", "json")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    assert data["result"] == "G(6)[-1]"
    assert [s["mechanism"] for s in data["steps"]] == ["ext1-universal-extension", "hom-kernel"]
    r = run("mutate", "--n", "3", "--left", "A(7)", "--object", "chi(7)")
    assert "result: H(7)" in r.output
    r = run("mutate", "--n", "3", "--right", "chi(6)", "--object", "chi(8)")
    assert "result: Q(8,6)[1]" in r.output


@pytest.mark.parametrize("n,label", [(3, "ec_2"), (2, "ec_1"), (2, "intro")])
def test_verify_builtins(run, n, label):
    r = run("verify", "--n", str(n), label, "--format", "json")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    jsonschema.validate(data, schema("collection_report.schema.json"))
    gold = json.loads(resources.files("qgrkit").joinpath("fixtures", f"collection_{label}_n{n}.json").read_text())
    assert data["checks"] == gold["checks"] and data["gram"] == gold["gram"]


def test_verify_custom_file_fails(run, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(["A(1)", "A(0)"]))
    r = run("verify", "--n", "2", str(p))
    assert r.exit_code == 1
    assert "backward Ext^0(A(0), A(1)) = 1" in r.output


def test_verify_negative_control(run):
    r = run("verify", "--n", "3", "ec_1", "--negative-control", "--seed", "5", "--format", "json")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    assert data["negative_control"]["detected"] and not data["passed"]
    assert "seed: 5" in r.stderr


def test_gram(run):
    r = run("gram", "--n", "2", "ec_2", "--format", "json")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    assert data["det"] == 1 and data["upper_unitriangular"]
    assert len(data["gram"]) == 7


def test_morphisms(run):
    r = run("morphisms", "--n", "3", "--format", "json")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    jsonschema.validate(data, schema("morphisms.schema.json"))
    assert data["mismatches"] == []


def test_size_guard(run):
    r = run("gram", "--n", "5", "ec_1")
    assert r.exit_code == 2
