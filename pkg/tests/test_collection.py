import json
from importlib import resources

import pytest

from qgrkit.collection import (
    BUILTINS,
    builtin_collection,
    composition_checks,
    determinant,
    expected_ec3,
    ext_table,
    gram_matrix,
    is_exceptional_object,
    morphism_algebra,
    negative_control,
    verify_collection,
)
from qgrkit.expressions import parse_expr
from qgrkit.oracles import prop_ext
from qgrkit.rings import InvalidParameter


def fixture(name):
    return json.loads(resources.files("qgrkit").joinpath("fixtures", name).read_text())


def test_shapes():
    for n in (2, 3, 4):
        assert len(builtin_collection("intro", n)) == 2 * n + 1
        for label in ("ec_1", "ec_2", "ec_3"):
            assert len(builtin_collection(label, n)) == 4 * n - 1
    assert builtin_collection("ec_2", 3).names == [
        "A(0)", "A(1)", "A(2)", "A(3)", "A(4)", "A(5)", "G(6)", "A(6)", "H(7)", "chi(6)", "chi(5)"]
    assert builtin_collection("ec_3", 3).names[-2:] == ["Q(6,6)", "Q(5,5)"]
    with pytest.raises(InvalidParameter):
        builtin_collection("ec_4", 3)


def test_determinant():
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[1, 5, 7], [0, 1, 2], [0, 0, 1]]) == 1
    assert determinant([[0, 1], [0, 1]]) == 0


def test_exceptional_objects():
    assert is_exceptional_object("G(6)", 3)
    assert is_exceptional_object("Q(6,4)", 3) is False  # self Ext^2 is one-dimensional


@pytest.mark.parametrize("label", BUILTINS)
@pytest.mark.parametrize("n", [2, 3])
def test_against_golden(label, n):
    gold = fixture(f"collection_{label}_n{n}.json")
    rep = verify_collection(builtin_collection(label, n))
    data = rep.to_json()
    assert data["checks"] == gold["checks"]
    assert data["gram"] == gold["gram"] and data["det"] == gold["det"]
    assert rep.passed == gold["passed"]
    assert rep.expected_pass == gold["expected_pass"]


def test_golden_ext_tables_match_closed_form():
    for n in (2, 3):
        rows = fixture(f"ext_table_n{n}.json")["rows"]
        for r in rows:
            s, t = parse_expr(r["source"]), parse_expr(r["target"])
            assert r["dims"] == r["expected"] == prop_ext(n, (s.name, s.args[0]), (t.name, t.args[0]))


def test_parallel_equals_serial():
    c = builtin_collection("intro", 3)
    pairs = [(0, 6), (6, 0), (2, 3)]
    assert ext_table(c, pairs, jobs=2) == ext_table(c, pairs, jobs=1)


def test_gram_unitriangular():
    g, det = gram_matrix(builtin_collection("ec_1", 2))
    assert det == 1
    assert all(g[k][k] == 1 for k in range(len(g)))
    assert all(g[k][l] == 0 for k in range(len(g)) for l in range(k))


def test_negative_control():
    c = builtin_collection("ec_1", 3)
    perm, (later, earlier) = negative_control(c, seed=11)
    rep = verify_collection(perm)
    assert not rep.passed
    assert any(f["source"] == later and f["target"] == earlier for f in rep.failures)
    # same seed, same permutation
    assert negative_control(c, seed=11)[0].names == perm.names


def test_expected_ec3_examples():
    n = 3
    assert expected_ec3(n, parse_expr("G(6)"), parse_expr("A(6)")) == [1, 1, 0]
    assert expected_ec3(n, parse_expr("G(6)"), parse_expr("Q(6,6)")) == [0, 1, 0]


def test_morphisms_golden():
    gold = fixture("morphisms_ec_3_n3.json")
    alg = morphism_algebra(builtin_collection("ec_3", 3))
    assert alg["mismatches"] == []
    assert [r["dims"] for r in alg["morphisms"]] == [r["dims"] for r in gold["morphisms"]]


def test_composition_checks_n2():
    checks = composition_checks(2)
    assert checks and all(c.ok for c in checks)
    assert {c.rule for c in checks} >= {"a", "b", "e", "i"}
