"""Object expressions such as ``A(3)``, ``chi(5)``, ``Q(8,6)``, ``G(6)``.

Grammar::

    expr   := name "(" int ["," int] ")" [ "[" int "]" ]
    name   := "A" | "chi" | "Q" | "G" | "H" | "Aq01"

The optional bracket is a homological shift.  Ad-hoc modules are read from
JSON of the form ``{"generators": [degrees], "relations": [[poly, ...], ...]}``
where each relation lists one polynomial per generator.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .modules import (
    PresentedModule,
    make_A_twist,
    make_Aq01,
    make_chi,
    make_G,
    make_H,
    make_Q_top,
)
from .rings import InvalidParameter, RingDescriptor, parse_poly
from .terms import context

__all__ = ["ExpressionError", "ObjectExpr", "parse_expr", "parse_list", "build", "load_module_json", "module_from_json"]


class ExpressionError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


_ARITY = {"A": 1, "chi": 1, "Q": 2, "G": 1, "H": 1, "Aq01": 1}
_TOKEN = re.compile(r"\s*(?:(?P<name>Aq01|chi|A|Q|G|H)|(?P<int>[+-]?\d+)|(?P<sym>[(),\[\]]))")


@dataclass(frozen=True)
class ObjectExpr:
    name: str
    args: tuple[int, ...]
    shift: int = 0

    def __str__(self) -> str:
        base = f"{self.name}({','.join(map(str, self.args))})"
        return base if not self.shift else f"{base}[{self.shift}]"


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise ExpressionError(text, bad, "unexpected character")
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_expr(text: str) -> ObjectExpr:
    toks = _tokens(text)
    i = 0

    def expect(kind, value=None):
        nonlocal i
        k, v, p = toks[i]
        if k != kind or (value is not None and v != value):
            want = value or kind
            raise ExpressionError(text, p, f"expected {want!r}")
        i += 1
        return v

    name = expect("name")
    expect("sym", "(")
    args = [int(expect("int"))]
    while toks[i][1] == ",":
        i += 1
        args.append(int(expect("int")))
    expect("sym", ")")
    shift = 0
    if toks[i][1] == "[":
        i += 1
        shift = int(expect("int"))
        expect("sym", "]")
    if toks[i][0] != "end":
        raise ExpressionError(text, toks[i][2], "trailing input")
    if len(args) != _ARITY[name]:
        raise ExpressionError(text, 0, f"{name} takes {_ARITY[name]} argument(s)")
    if name == "Q" and (args[0] - args[1]) % 2:
        raise ExpressionError(text, 0, "Q(top,bottom) needs top - bottom even")
    return ObjectExpr(name, tuple(args), shift)


def parse_list(text: str) -> list[ObjectExpr]:
    """Comma separated expressions; commas inside parentheses are arguments."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return [parse_expr(p.strip()) for p in parts]


def build(expr: ObjectExpr | str, ring: RingDescriptor) -> PresentedModule:
    if isinstance(expr, str):
        expr = parse_expr(expr)
    a = expr.args
    n = ring.n_param
    if expr.name == "A":
        return make_A_twist(ring, a[0])
    if expr.name == "chi":
        return make_chi(ring, a[0])
    if expr.name == "Aq01":
        return make_Aq01(ring, a[0])
    if expr.name == "G":
        return make_G(ring, a[0])
    if expr.name == "H":
        return make_H(ring, a[0])
    top, bottom = a
    if not (0 <= top - bottom < 2 * (2 * n - 1)):
        raise InvalidParameter(f"Q({top},{bottom}) needs 0 <= top - bottom <= {4 * n - 4}")
    return make_Q_top(ring, top, bottom)


def _schema() -> dict:
    return json.loads(resources.files("qgrkit").joinpath("schemas/module.schema.json").read_text())


def module_from_json(data: dict, ring: RingDescriptor, tag: str | None = None) -> PresentedModule:
    jsonschema.validate(data, _schema())
    degs = list(data["generators"])
    ctx = context(ring)
    rels = []
    for r in data.get("relations", []):
        if len(r) != len(degs):
            raise InvalidParameter("each relation needs one polynomial per generator")
        vec = {}
        for j, txt in enumerate(r):
            p = parse_poly(txt, ring)
            for e, c in p.terms.items():
                vec[ctx.pack(e, j)] = c
        rels.append(vec)
    return PresentedModule(ring, degs, rels, tag=tag)


def load_module_json(path: str, ring: RingDescriptor) -> PresentedModule:
    with open(path) as fh:
        return module_from_json(json.load(fh), ring, tag=None)
