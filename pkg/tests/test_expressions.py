import json

import jsonschema
import pytest

from qgrkit.expressions import ExpressionError, ObjectExpr, build, load_module_json, module_from_json, parse_expr, parse_list
from qgrkit.modules import is_isomorphic, make_Q_top
from qgrkit.rings import InvalidParameter, make_ring


def test_parse():
    assert parse_expr("A(3)") == ObjectExpr("A", (3,))
    assert parse_expr(" Q( 8 , 6 ) ") == ObjectExpr("Q", (8, 6))
    assert parse_expr("chi(-2)[1]") == ObjectExpr("chi", (-2,), 1)
    assert str(parse_expr("chi(5)[-1]")) == "chi(5)[-1]"


@pytest.mark.parametrize("text,pos", [("chi(7", 5), ("B(1)", 0), ("A(1) x", 5), ("Q(3)", 0), ("Q(5,4)", 0), ("A(1,2)", 0)])
def test_parse_errors(text, pos):
    with pytest.raises(ExpressionError) as exc:
        parse_expr(text)
    assert exc.value.pos == pos


def test_parse_list():
    assert [str(e) for e in parse_list("A(6),chi(6), Q(8,6)")] == ["A(6)", "chi(6)", "Q(8,6)"]


def test_roundtrip_builds_isomorphic_objects():
    A = make_ring(3)
    for s in ["A(4)", "chi(5)", "Q(8,6)", "G(6)", "H(7)", "Aq01(2)"]:
        M = build(s, A)
        assert M.tag == s
        assert is_isomorphic(build(str(parse_expr(M.tag)), A), M)


def test_Q_range_checked():
    with pytest.raises(InvalidParameter):
        build("Q(20,0)", make_ring(3))


def test_module_json(tmp_path):
    A = make_ring(3)
    data = {"generators": [-8], "relations": [["x0"], ["x1^2"], ["x2"]]}
    M = module_from_json(data, A)
    assert is_isomorphic(M, make_Q_top(A, 8, 6))
    p = tmp_path / "m.json"
    p.write_text(json.dumps(data))
    assert load_module_json(str(p), A).hilbert(-10, 10) == M.hilbert(-10, 10)


def test_module_json_rejected():
    A = make_ring(3)
    with pytest.raises(jsonschema.ValidationError):
        module_from_json({"generators": ["a"]}, A)
    with pytest.raises(InvalidParameter):
        module_from_json({"generators": [0, 1], "relations": [["x0"]]}, A)
