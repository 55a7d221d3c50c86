"""Packed monomial keys for module terms.

A term ``x^e * g_c`` of a free module is encoded as one Python integer::

    key = e0 << s0 | e1 << s1 | ... | em << sm | c

with ``e0`` in the most significant field.  Integer comparison of keys is
then lexicographic on ``(e0, ..., em, c)``, multiplication by a monomial is
integer addition, and divisibility is a single subtraction against a mask of
guard bits.  Every field is ``BITS`` wide with the top bit reserved as guard.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

from .rings import RingDescriptor, weighted_degree

BITS = 20
FIELD = 1 << BITS
HALF = 1 << (BITS - 1)
MASK = FIELD - 1


class ExponentOverflow(OverflowError):
    pass


class RingContext:
    """Packing plus ring arithmetic (normal forms mod the relation) for one ring."""

    def __init__(self, ring: RingDescriptor):
        self.ring = ring
        nv = ring.num_vars
        self.nvars = nv
        self.weights = ring.weights
        self.shifts = tuple(BITS * (nv - i) for i in range(nv))
        self.guard = sum(HALF << s for s in self.shifts) | HALF
        self.var = tuple(1 << s for s in self.shifts)
        self.comp_mask = MASK
        self._deg: dict[int, int] = {}
        self._nf: dict[int, tuple] = {}
        if ring.relation is not None:
            lead = ring.relation_lead
            rel = ring.relation_dict
            lc = rel[lead]
            self.rel_lead = self.pack(lead)
            self.rel_terms = {self.pack(e): c for e, c in rel.items()}
            self.rel_tail = tuple((self.pack(e), -c / lc) for e, c in rel.items() if e != lead)
            self.rel_degree = ring.degree_d
        else:
            self.rel_lead = None
            self.rel_terms = None
            self.rel_tail = ()
            self.rel_degree = None

    # -- packing ---------------------------------------------------------
    def pack(self, exps, comp: int = 0) -> int:
        key = comp
        if comp >= HALF or comp < 0:
            raise ExponentOverflow(f"component index {comp} out of range")
        for e, s in zip(exps, self.shifts):
            if e >= HALF or e < 0:
                raise ExponentOverflow(f"exponent {e} out of range")
            key |= e << s
        return key

    def unpack(self, key: int) -> tuple[tuple[int, ...], int]:
        return tuple((key >> s) & MASK for s in self.shifts), key & MASK

    def exps(self, key: int) -> tuple[int, ...]:
        return tuple((key >> s) & MASK for s in self.shifts)

    def comp(self, key: int) -> int:
        return key & MASK

    def mono_degree(self, key: int) -> int:
        """Weighted degree of the monomial part of ``key``."""
        mono = key & ~MASK
        d = self._deg.get(mono)
        if d is None:
            d = weighted_degree(self.exps(mono), self.weights)
            self._deg[mono] = d
        return d

    def divides(self, lead: int, key: int) -> bool:
        """Does the term ``lead`` divide ``key`` (same component)?"""
        if (lead ^ key) & MASK:
            return False
        return ((key | self.guard) - lead) & self.guard == self.guard

    def lcm(self, a: int, b: int) -> int:
        out = a & MASK
        for s in self.shifts:
            x = (a >> s) & MASK
            y = (b >> s) & MASK
            out |= (x if x > y else y) << s
        return out

    def coprime(self, a: int, b: int) -> bool:
        for s in self.shifts:
            if (a >> s) & MASK and (b >> s) & MASK:
                return False
        return True

    def with_comp(self, key: int, comp: int) -> int:
        return (key & ~MASK) | comp

    # -- ring arithmetic ------------------------------------------------
    def nf_key(self, key: int) -> tuple:
        """Normal form of a single term modulo the relation, as ((key, coeff), ...)."""
        lead = self.rel_lead
        if lead is None or not (((key | self.guard) - lead) & self.guard == self.guard):
            return ((key, mpq(1)),)
        hit = self._nf.get(key)
        if hit is not None:
            return hit
        m = key - lead
        out: dict = {}
        for t, c in self.rel_tail:
            for k2, c2 in self.nf_key(m + t):
                v = out.get(k2, 0) + c * c2
                if v:
                    out[k2] = v
                else:
                    out.pop(k2, None)
        res = tuple(out.items())
        self._nf[key] = res
        return res

    def nf(self, vec: dict) -> dict:
        if self.rel_lead is None:
            return vec
        lead = self.rel_lead
        guard = self.guard
        if all(((k | guard) - lead) & guard != guard for k in vec):
            return vec
        out: dict = {}
        for k, c in vec.items():
            for k2, c2 in self.nf_key(k):
                v = out.get(k2)
                if v is None:
                    out[k2] = c * c2
                else:
                    v += c * c2
                    if v:
                        out[k2] = v
                    else:
                        del out[k2]
        return out

    def is_standard(self, key: int) -> bool:
        lead = self.rel_lead
        return lead is None or ((key | self.guard) - lead) & self.guard != self.guard

    def monomials(self, k: int, reduced: bool = False) -> list[int]:
        """Packed monomials of weighted degree ``k`` (descending order)."""
        return list(_monomial_keys(self, k, reduced))

    def poly_to_keys(self, terms: dict) -> dict:
        return {self.pack(e): mpq(c) for e, c in terms.items()}

    def keys_to_poly(self, vec: dict) -> dict:
        return {self.exps(k): c for k, c in vec.items()}


@lru_cache(maxsize=None)
def _ctx_cached(ring: RingDescriptor) -> RingContext:
    return RingContext(ring)


def context(ring: RingDescriptor) -> RingContext:
    return _ctx_cached(ring)


_MONO_CACHE: dict = {}


def _monomial_keys(ctx: RingContext, k: int, reduced: bool) -> tuple:
    ck = (ctx.ring, k, reduced)
    hit = _MONO_CACHE.get(ck)
    if hit is not None:
        return hit
    from .rings import monomials_of_degree

    keys = [ctx.pack(e) for e in monomials_of_degree(ctx.weights, k)]
    if reduced:
        keys = [x for x in keys if ctx.is_standard(x)]
    keys.sort(reverse=True)
    res = tuple(keys)
    _MONO_CACHE[ck] = res
    return res


def mul_term(vec: dict, mono: int, coeff=1) -> dict:
    """``coeff * mono * vec`` for a packed monomial ``mono`` (component 0)."""
    if coeff == 1:
        return {k + mono: c for k, c in vec.items()}
    return {k + mono: c * coeff for k, c in vec.items()}


def add_into(y: dict, x: dict, a=1) -> None:
    for k, c in x.items():
        v = y.get(k)
        if v is None:
            y[k] = a * c if a != 1 else c
        else:
            v += a * c
            if v:
                y[k] = v
            else:
                del y[k]


def poly_times_vec(p: dict, vec: dict) -> dict:
    """Product of a ring element ``p`` (component-0 keys) with a module vector."""
    out: dict = {}
    for mk, mc in p.items():
        for k, c in vec.items():
            kk = k + mk
            v = out.get(kk)
            if v is None:
                out[kk] = mc * c
            else:
                v += mc * c
                if v:
                    out[kk] = v
                else:
                    del out[kk]
    return out
