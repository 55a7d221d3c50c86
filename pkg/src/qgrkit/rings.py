"""Weighted polynomial rings B = Q[x0..xm] and hypersurface quotients A = B/(f).

Monomials are exponent tuples.  Polynomials are kept as plain ``dict``
objects mapping exponent tuples to ``mpq`` coefficients inside the engine;
:class:`Poly` wraps such a dict for the public surface.

Monomial order: weighted degree first, then lexicographic with
x0 > x1 > ... > xm.  For the hypersurface family used here the leading term
of ``x0*x3 + x1^(2n-1) + x2^2`` is ``x0*x3``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from gmpy2 import mpq

__all__ = [
    "QQ",
    "InvalidParameter",
    "Poly",
    "RingDescriptor",
    "make_ring",
    "normal_form",
    "monomial_basis",
    "hilbert_dim",
    "hilbert_series_coefficients",
    "parse_poly",
    "weighted_degree",
]

QQ = mpq


class InvalidParameter(ValueError):
    """Raised for parameters outside an operation's domain."""


def weighted_degree(exps: tuple[int, ...], weights: tuple[int, ...]) -> int:
    return sum(e * a for e, a in zip(exps, weights))


def _mono_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _divides(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def poly_mul(p: Mapping, q: Mapping) -> dict:
    out: dict = {}
    for ea, ca in p.items():
        for eb, cb in q.items():
            e = _mono_mul(ea, eb)
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def poly_add(p: Mapping, q: Mapping, scale=1) -> dict:
    out = dict(p)
    for e, c in q.items():
        v = out.get(e, 0) + scale * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


@dataclass(frozen=True)
class RingDescriptor:
    """Weighted polynomial ring, optionally modulo one homogeneous relation.

    ``relation`` is stored as a sorted tuple of ``(exponents, coefficient)``
    pairs so that the descriptor is hashable.
    """

    weights: tuple[int, ...]
    relation: tuple[tuple[tuple[int, ...], mpq], ...] | None = None
    n_param: int | None = None
    degree_d: int | None = field(default=None)

    def __post_init__(self):
        if not self.weights or any(a < 1 for a in self.weights):
            raise InvalidParameter(f"weights must be positive: {self.weights}")
        if self.relation is not None:
            degs = {weighted_degree(e, self.weights) for e, _ in self.relation}
            if len(degs) != 1:
                raise InvalidParameter("relation is not homogeneous")
            (d,) = degs
            if self.degree_d is None:
                object.__setattr__(self, "degree_d", d)
            elif self.degree_d != d:
                raise InvalidParameter("degree_d does not match the relation")

    @property
    def num_vars(self) -> int:
        return len(self.weights)

    @property
    def is_quotient(self) -> bool:
        return self.relation is not None

    @property
    def s_total(self) -> int:
        return sum(self.weights)

    @property
    def kappa(self) -> int | None:
        if self.degree_d is None:
            return None
        return self.degree_d - self.s_total

    @property
    def a_max(self) -> int:
        return max(self.weights)

    @property
    def krull_dim(self) -> int:
        return self.num_vars - (1 if self.is_quotient else 0)

    @property
    def a_invariant(self) -> int:
        """Degree shift of the canonical module: omega = R(a)."""
        return self.kappa if self.is_quotient else -self.s_total

    @property
    def relation_dict(self) -> dict:
        return dict(self.relation) if self.relation else {}

    @property
    def relation_lead(self) -> tuple[int, ...] | None:
        if not self.relation:
            return None
        return max(e for e, _ in self.relation)

    def ambient(self) -> "RingDescriptor":
        """The polynomial ring B this ring is a quotient of."""
        return RingDescriptor(self.weights, None, self.n_param)

    def degree(self, exps: tuple[int, ...]) -> int:
        return weighted_degree(exps, self.weights)

    def variable(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.num_vars))

    def fingerprint(self) -> str:
        payload = {
            "weights": list(self.weights),
            "relation": None
            if self.relation is None
            else [[list(e), str(c)] for e, c in self.relation],
        }
        raw = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(raw).hexdigest()[:16]

    def __str__(self) -> str:
        name = "A" if self.is_quotient else "B"
        extra = f", n={self.n_param}" if self.n_param else ""
        return f"{name}{self.weights}{extra}"


def _relation_tuple(terms: Mapping) -> tuple:
    return tuple(sorted((tuple(e), QQ(c)) for e, c in terms.items() if c))


def make_ring(n: int, quotient: bool = True) -> RingDescriptor:
    """B = Q[x0,x1,x2,x3] with weights (1, 2, 2n-1, 4n-3), or A = B/(f)."""
    if not isinstance(n, int) or n < 2:
        raise InvalidParameter(f"n must be an integer >= 2, got {n!r}")
    weights = (1, 2, 2 * n - 1, 4 * n - 3)
    if not quotient:
        return RingDescriptor(weights, None, n)
    f = {(1, 0, 0, 1): 1, (0, 2 * n - 1, 0, 0): 1, (0, 0, 2, 0): 1}
    return RingDescriptor(weights, _relation_tuple(f), n)


def custom_ring(weights: Iterable[int], relation: Mapping | None = None) -> RingDescriptor:
    rel = None if relation is None else _relation_tuple(relation)
    return RingDescriptor(tuple(weights), rel)


# ---------------------------------------------------------------------------
# normal forms


@lru_cache(maxsize=None)
def _mono_nf(ring: RingDescriptor, exps: tuple[int, ...]) -> tuple:
    """Normal form of a single monomial as a tuple of (exps, coeff) pairs."""
    lead = ring.relation_lead
    if lead is None or not _divides(lead, exps):
        return ((exps, QQ(1)),)
    rel = ring.relation_dict
    lc = rel[lead]
    # m * lead  ->  -(m / lc) * (f - lc * lead)
    m = tuple(x - y for x, y in zip(exps, lead))
    out: dict = {}
    for e, c in rel.items():
        if e == lead:
            continue
        for e2, c2 in _mono_nf(ring, _mono_mul(m, e)):
            v = out.get(e2, 0) - c * c2 / lc
            if v:
                out[e2] = v
            else:
                out.pop(e2, None)
    return tuple(sorted(out.items()))


def nf_dict(p: Mapping, ring: RingDescriptor) -> dict:
    """Normal form of a polynomial given as a dict (engine-level helper)."""
    if ring.relation is None:
        return {e: c for e, c in p.items() if c}
    out: dict = {}
    for e, c in p.items():
        for e2, c2 in _mono_nf(ring, e):
            v = out.get(e2, 0) + c * c2
            if v:
                out[e2] = v
            else:
                out.pop(e2, None)
    return out


def is_reduced_monomial(exps: tuple[int, ...], ring: RingDescriptor) -> bool:
    lead = ring.relation_lead
    return lead is None or not _divides(lead, exps)


# ---------------------------------------------------------------------------
# monomial enumeration and Hilbert functions


@lru_cache(maxsize=None)
def _all_monomials(weights: tuple[int, ...], k: int) -> tuple[tuple[int, ...], ...]:
    if k < 0:
        return ()
    out: list[tuple[int, ...]] = []

    def rec(i: int, rest: int, prefix: tuple[int, ...]):
        if i == len(weights) - 1:
            if rest % weights[i] == 0:
                out.append(prefix + (rest // weights[i],))
            return
        for e in range(rest // weights[i], -1, -1):
            rec(i + 1, rest - e * weights[i], prefix + (e,))

    rec(0, k, ())
    out.sort(reverse=True)
    return tuple(out)


def monomials_of_degree(weights: tuple[int, ...], k: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of weighted degree k, largest first."""
    return _all_monomials(tuple(weights), k)


@lru_cache(maxsize=None)
def _basis(ring: RingDescriptor, k: int) -> tuple[tuple[int, ...], ...]:
    mons = _all_monomials(ring.weights, k)
    if ring.relation is None:
        return mons
    return tuple(e for e in mons if is_reduced_monomial(e, ring))


def monomial_basis(ring: RingDescriptor, k: int) -> list[tuple[int, ...]]:
    """Normal-form monomial basis of the degree-k piece, largest first."""
    return list(_basis(ring, k))


def hilbert_dim(ring: RingDescriptor, k: int) -> int:
    return len(_basis(ring, k))


def hilbert_series_coefficients(ring: RingDescriptor, kmax: int) -> list[int]:
    """Coefficients of (1 - t^d) / prod(1 - t^a_i) up to t^kmax.

    Computed by power-series arithmetic, independently of enumeration.
    """
    coeffs = [1] + [0] * kmax
    for a in ring.weights:
        for k in range(a, kmax + 1):
            coeffs[k] += coeffs[k - a]
    if ring.relation is not None:
        d = ring.degree_d
        coeffs = [coeffs[k] - (coeffs[k - d] if k >= d else 0) for k in range(kmax + 1)]
    return coeffs


# ---------------------------------------------------------------------------
# public polynomial type


class Poly:
    """Homogeneous polynomial with exact rational coefficients."""

    __slots__ = ("terms", "weights", "_degree")

    def __init__(self, terms: Mapping, weights: tuple[int, ...]):
        self.terms = {tuple(e): QQ(c) for e, c in terms.items() if c}
        self.weights = tuple(weights)
        degs = {weighted_degree(e, self.weights) for e in self.terms}
        if len(degs) > 1:
            raise InvalidParameter(f"inhomogeneous polynomial: degrees {sorted(degs)}")
        self._degree = degs.pop() if degs else None

    @classmethod
    def monomial(cls, exps, weights, coeff=1) -> "Poly":
        return cls({tuple(exps): coeff}, weights)

    @property
    def degree(self) -> int | None:
        """Weighted degree, ``None`` for the zero polynomial."""
        return self._degree

    def is_zero(self) -> bool:
        return not self.terms

    def lead(self) -> tuple[int, ...]:
        return max(self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], mpq]]:
        return sorted(self.terms.items(), reverse=True)

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(poly_add(self.terms, other.terms), self.weights)

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(poly_add(self.terms, other.terms, -1), self.weights)

    def __neg__(self) -> "Poly":
        return Poly({e: -c for e, c in self.terms.items()}, self.weights)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return Poly(poly_mul(self.terms, other.terms), self.weights)
        return Poly({e: c * other for e, c in self.terms.items()}, self.weights)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.sorted_terms()))

    def __repr__(self) -> str:
        return f"Poly({format_poly(self.terms)!r})"

    def __str__(self) -> str:
        return format_poly(self.terms)


def normal_form(p: Poly, ring: RingDescriptor) -> Poly:
    """Reduce modulo the ring relation; identity for polynomial rings."""
    return Poly(nf_dict(p.terms, ring), ring.weights)


def relation_poly(ring: RingDescriptor) -> Poly | None:
    return None if ring.relation is None else Poly(ring.relation_dict, ring.weights)


# ---------------------------------------------------------------------------
# text grammar:  3*x0^2*x3 - x1^3 + 1/2*x2^2


def _format_coeff(c: mpq) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(exps: tuple[int, ...]) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts) if parts else "1"


def format_poly(terms: Mapping) -> str:
    if not terms:
        return "0"
    out = []
    for e, c in sorted(terms.items(), reverse=True):
        mono = format_monomial(e)
        neg = c < 0
        a = -c if neg else c
        if mono == "1":
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_FACTOR = re.compile(r"^(?:x(\d+)(?:\^(\d+))?|(\d+)(?:/(\d+))?)$")


class PolyParseError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


def parse_poly(text: str, ring: RingDescriptor | int) -> Poly:
    """Parse ``'3*x0^2*x3 - x1^3'`` into a :class:`Poly` over ``ring``.

    ``ring`` may also be a plain variable count, in which case all weights
    are taken to be 1 (used only for syntax checks).
    """
    if isinstance(ring, int):
        weights = (1,) * ring
    else:
        weights = ring.weights
    nvars = len(weights)
    s = text.strip()
    if not s:
        raise PolyParseError(text, 0, "empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    pieces = _TERM_SPLIT.split(s)
    terms: dict = {}
    pos = 0
    # pieces: ['', sign, term, sign, term, ...]
    if pieces[0] != "":
        raise PolyParseError(text, 0, "unexpected leading text")
    for i in range(1, len(pieces), 2):
        sign = -1 if pieces[i] == "-" else 1
        term = pieces[i + 1]
        start = text.find(term, pos) if term else pos
        pos = max(start, pos)
        if not term:
            raise PolyParseError(text, pos, "missing term")
        coeff = QQ(sign)
        exps = [0] * nvars
        for factor in term.split("*"):
            factor = factor.strip()
            m = _FACTOR.match(factor)
            if not m:
                raise PolyParseError(text, pos, f"bad factor {factor!r}")
            var, pw, num, den = m.groups()
            if var is not None:
                v = int(var)
                if v >= nvars:
                    raise PolyParseError(text, pos, f"unknown variable x{v}")
                exps[v] += int(pw) if pw else 1
            else:
                if den is not None and int(den) == 0:
                    raise PolyParseError(text, pos, "zero denominator")
                coeff *= QQ(int(num), int(den) if den else 1)
        key = tuple(exps)
        v = terms.get(key, 0) + coeff
        if v:
            terms[key] = v
        else:
            terms.pop(key, None)
        pos += len(term)
    return Poly(terms, weights)
