"""Module Groebner bases, division, syzygies and graded free resolutions.

All computations are homogeneous and run degree by degree.  Inside one
degree the S-pairs are handled first, then the untracked ("aux") inputs,
then the tracked ("main") inputs.  A main input that reduces to zero is
redundant, so the surviving main inputs are a minimal generating set of the
submodule they span modulo the aux span.  Over A = B/(f) the aux inputs
always include f times every basis vector, which is how the quotient ring is
handled with plain polynomial reductions.

Vectors are dicts of packed keys (see :mod:`qgrkit.terms`) to ``mpq``.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import os
import pickle
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from gmpy2 import mpq

from .rings import InvalidParameter, Poly, RingDescriptor
from .terms import MASK, RingContext, context

__all__ = [
    "FreeModule",
    "FreeElement",
    "GradedMatrix",
    "ChainComplexSegment",
    "GroebnerBasis",
    "buchberger",
    "divide",
    "syzygies",
    "resolve_submodule",
    "free_resolution",
    "InvalidInput",
]

CACHE_VERSION = 1


class InvalidInput(ValueError):
    pass


# ---------------------------------------------------------------------------
# free modules, elements, matrices


@dataclass(frozen=True)
class FreeModule:
    """``R(-b_1) + ... + R(-b_r)``; generator j lives in degree ``b_j``."""

    ring: RingDescriptor
    degrees: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def graded_rank(self, k: int) -> int:
        from .rings import hilbert_dim

        return sum(hilbert_dim(self.ring, k - b) for b in self.degrees)

    def twist(self, k: int) -> "FreeModule":
        return FreeModule(self.ring, tuple(b - k for b in self.degrees))

    def basis_vector(self, j: int) -> dict:
        return {j: mpq(1)}

    def vec_degree(self, vec: dict) -> int | None:
        if not vec:
            return None
        ctx = context(self.ring)
        k = next(iter(vec))
        return ctx.mono_degree(k) + self.degrees[k & MASK]


class FreeElement:
    """Homogeneous element of a :class:`FreeModule`."""

    __slots__ = ("module", "terms", "degree")

    def __init__(self, module: FreeModule, terms: dict, degree: int | None = None):
        self.module = module
        self.terms = {k: mpq(c) for k, c in terms.items() if c}
        ctx = context(module.ring)
        degs = {ctx.mono_degree(k) + module.degrees[k & MASK] for k in self.terms}
        if len(degs) > 1:
            raise InvalidInput(f"inhomogeneous element: degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise InvalidInput(f"declared degree {degree} but terms have degree {d}")
            degree = d
        self.degree = degree

    @classmethod
    def from_polys(cls, module: FreeModule, comps: Sequence) -> "FreeElement":
        """Build from one polynomial per generator (``Poly``, dict or None)."""
        ctx = context(module.ring)
        terms: dict = {}
        for j, p in enumerate(comps):
            if p is None:
                continue
            tm = p.terms if isinstance(p, Poly) else p
            for e, c in tm.items():
                if c:
                    terms[ctx.pack(e, j)] = mpq(c)
        return cls(module, terms)

    def components(self) -> list[Poly]:
        ctx = context(self.module.ring)
        out = [dict() for _ in self.module.degrees]
        for k, c in self.terms.items():
            out[k & MASK][ctx.exps(k)] = c
        return [Poly(t, self.module.ring.weights) for t in out]

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeElement) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"FreeElement(deg={self.degree}, {[str(p) for p in self.components()]})"


class GradedMatrix:
    """Homogeneous map of free modules, stored column by column.

    Column j is the image of source generator j, a vector in ``target``.
    """

    def __init__(self, source: FreeModule, target: FreeModule, columns: list[dict]):
        if len(columns) != source.rank:
            raise InvalidInput("column count does not match source rank")
        self.source = source
        self.target = target
        self.columns = columns

    def check_homogeneous(self) -> None:
        ctx = context(self.target.ring)
        for j, col in enumerate(self.columns):
            for k in col:
                if ctx.mono_degree(k) + self.target.degrees[k & MASK] != self.source.degrees[j]:
                    raise InvalidInput(f"column {j} is not homogeneous of degree {self.source.degrees[j]}")

    def entry(self, i: int, j: int) -> Poly:
        ctx = context(self.target.ring)
        t = {ctx.exps(k): c for k, c in self.columns[j].items() if k & MASK == i}
        return Poly(t, self.target.ring.weights)

    def apply(self, vec: dict) -> dict:
        """Image of a source vector (packed keys over source components)."""
        out: dict = {}
        for k, c in vec.items():
            col = self.columns[k & MASK]
            mono = k & ~MASK
            for kk, cc in col.items():
                key = kk + mono
                v = out.get(key)
                if v is None:
                    out[key] = c * cc
                else:
                    v += c * cc
                    if v:
                        out[key] = v
                    else:
                        del out[key]
        return context(self.target.ring).nf(out)

    def compose(self, other: "GradedMatrix") -> "GradedMatrix":
        """``self o other``."""
        return GradedMatrix(other.source, self.target, [self.apply(c) for c in other.columns])

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)


# ---------------------------------------------------------------------------
# the Buchberger core


class GroebnerBasis:
    """Result of one homogeneous Buchberger run.

    ``kept`` lists the indices of main inputs that survived (a minimal
    generating set), ``reps`` expresses every basis element in those kept
    generators (modulo the aux span) when tracking was on, and ``syz``
    holds generators of the module of relations among the kept inputs.
    """

    def __init__(self, ctx: RingContext, degrees: Sequence[int]):
        self.ctx = ctx
        self.degrees = tuple(degrees)
        self.elems: list[dict] = []
        self.leads: list[int] = []
        self.lcs: list = []
        self.edeg: list[int] = []
        self.reps: list[dict] | None = None
        self.by_comp: dict[int, list[int]] = defaultdict(list)
        self.kept: list[int] = []
        self.kept_degrees: list[int] = []
        self.redundant: dict[int, dict] = {}
        self.syz: list[tuple[dict, int]] = []
        self.complete = True
        self.max_degree: int | None = None
        self._hit: dict[int, int] = {}

    # reducer lookup
    def find_reducer(self, key: int) -> int:
        hit = self._hit.get(key)
        if hit is not None:
            return hit
        guard = self.ctx.guard
        kg = key | guard
        leads = self.leads
        for i in self.by_comp.get(key & MASK, ()):
            if (kg - leads[i]) & guard == guard:
                self._hit[key] = i
                return i
        return -1

    def _insert(self, vec: dict, rep: dict | None, deg: int) -> int:
        lead = max(vec)
        idx = len(self.elems)
        self.elems.append(vec)
        self.leads.append(lead)
        self.lcs.append(vec[lead])
        self.edeg.append(deg)
        if self.reps is not None:
            self.reps.append(rep if rep is not None else {})
        self.by_comp[lead & MASK].append(idx)
        return idx

    def reduce(self, vec: dict, rep: dict | None = None, full: bool = True, quot: bool = False):
        """Reduce ``vec``; returns ``(remainder, rep)``.

        ``rep`` accumulates ``-sum q_i * reps[i]``; with ``quot=True`` it
        instead accumulates ``sum q_i * e_i`` over basis element indices.
        """
        vec = dict(vec)
        if not vec:
            return vec, rep
        reps = self.reps
        elems = self.elems
        lcs = self.lcs
        leads = self.leads
        rem: dict = {}
        heap = [-k for k in vec]
        heapq.heapify(heap)
        queued = set(vec)
        while heap:
            k = -heapq.heappop(heap)
            queued.discard(k)
            c = vec.pop(k, None)
            if c is None:
                continue
            i = self.find_reducer(k)
            if i < 0:
                if not full:
                    vec[k] = c
                    # put back the rest untouched
                    vec.update(rem)
                    return vec, rep
                rem[k] = c
                continue
            q = c / lcs[i]
            m = k - leads[i]
            for kk, cc in elems[i].items():
                key = kk + m
                if key == k:
                    continue
                v = vec.get(key)
                if v is None:
                    vec[key] = -q * cc
                    if key not in queued:
                        queued.add(key)
                        heapq.heappush(heap, -key)
                else:
                    v -= q * cc
                    if v:
                        vec[key] = v
                    else:
                        del vec[key]
            if rep is not None:
                if quot:
                    kk = m | i
                    # quotient bookkeeping: element index lives in the comp field
                    v = rep.get(kk, 0) + q
                    if v:
                        rep[kk] = v
                    else:
                        rep.pop(kk, None)
                elif reps is not None:
                    for kk, cc in reps[i].items():
                        key = kk + m
                        v = rep.get(key)
                        if v is None:
                            rep[key] = -q * cc
                        else:
                            v -= q * cc
                            if v:
                                rep[key] = v
                            else:
                                del rep[key]
        return rem, rep

    def normal_form(self, vec: dict) -> dict:
        return self.reduce(vec)[0]

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec, full=False)[0]

    def lift(self, vec: dict) -> dict | None:
        """Coordinates of ``vec`` in the kept inputs (mod aux), or None."""
        if self.reps is None:
            raise ValueError("lift needs a tracked basis")
        rem, rep = self.reduce(vec, {})
        if rem:
            return None
        return {k: -c for k, c in rep.items()}

    def is_standard(self, key: int) -> bool:
        return self.find_reducer(key) < 0

    def standard_monomials(self, k: int) -> list[int]:
        """Packed terms of degree k not divisible by any lead, descending."""
        ctx = self.ctx
        out = []
        for c, b in enumerate(self.degrees):
            for mono in ctx.monomials(k - b):
                key = mono | c
                if self.find_reducer(key) < 0:
                    out.append(key)
        out.sort(reverse=True)
        return out


def _lcm(ctx: RingContext, a: int, b: int) -> int:
    out = a & MASK
    for s in ctx.shifts:
        x = (a >> s) & MASK
        y = (b >> s) & MASK
        out |= (x if x > y else y) << s
    return out


def _vec_degree(ctx: RingContext, degrees: Sequence[int], vec: dict) -> int:
    k = next(iter(vec))
    return ctx.mono_degree(k) + degrees[k & MASK]


def ring_aux(ctx: RingContext, degrees: Sequence[int]) -> list[dict]:
    """f times each basis vector (empty over a polynomial ring)."""
    if ctx.rel_lead is None:
        return []
    return [{k | c: v for k, v in ctx.rel_terms.items()} for c in range(len(degrees))]


def _run(
    ctx: RingContext,
    degrees: Sequence[int],
    main: Sequence[dict],
    aux: Sequence[dict],
    track: bool = True,
    cap: int | None = None,
    ring_aux_flags: Sequence[bool] | None = None,
) -> GroebnerBasis:
    gb = GroebnerBasis(ctx, degrees)
    if track:
        gb.reps = []
    degrees = tuple(degrees)
    inputs: dict[int, tuple[list, list]] = defaultdict(lambda: ([], []))
    for i, v in enumerate(aux):
        if v:
            inputs[_vec_degree(ctx, degrees, v)][0].append(i)
    for i, v in enumerate(main):
        if v:
            inputs[_vec_degree(ctx, degrees, v)][1].append(i)
        else:
            gb.redundant[i] = {}
    pairs: dict[int, dict[tuple[int, int], int]] = defaultdict(dict)
    pair_deg: dict[tuple[int, int], int] = {}
    plain_relation: list[bool] = []  # element is literally f*e_c
    guard = ctx.guard
    rel_lead = ctx.rel_lead

    def divides(a: int, b: int) -> bool:
        return ((b | guard) - a) & guard == guard

    def update(h: int) -> None:
        lh = gb.leads[h]
        comp = lh & MASK
        others = [g for g in gb.by_comp[comp] if g != h]
        if not others:
            return
        lcms = {g: _lcm(ctx, lh, gb.leads[g]) for g in others}

        def prod(g: int) -> bool:
            if plain_relation[g]:
                return ctx.coprime(lh & ~MASK, gb.leads[g] & ~MASK)
            if plain_relation[h]:
                return ctx.coprime(gb.leads[g] & ~MASK, lh & ~MASK)
            return False

        # Gebauer-Moeller UPDATE
        cand = list(others)
        keep: list[int] = []
        while cand:
            g1 = cand.pop(0)
            l1 = lcms[g1]
            if prod(g1):
                keep.append(g1)
                continue
            dominated = False
            for g2 in cand:
                if divides(lcms[g2], l1):
                    dominated = True
                    break
            if not dominated:
                for g2 in keep:
                    if divides(lcms[g2], l1):
                        dominated = True
                        break
            if not dominated:
                keep.append(g1)
        new = [g for g in keep if not prod(g)]
        # B criterion on pending pairs of this component
        for d, plist in pairs.items():
            dead = []
            for (a, b), l in plist.items():
                if l & MASK != comp:
                    continue
                if divides(lh, l) and _lcm(ctx, gb.leads[a], lh) != l and _lcm(ctx, gb.leads[b], lh) != l:
                    dead.append((a, b))
            for p in dead:
                del plist[p]
        for g in new:
            l = lcms[g]
            d = ctx.mono_degree(l) + degrees[comp]
            pairs[d][(g, h)] = l

    def add(vec: dict, rep: dict | None, deg: int, plain: bool) -> None:
        h = gb._insert(vec, rep, deg)
        plain_relation.append(plain)
        update(h)

    while True:
        pending = [d for d, p in pairs.items() if p]
        cands = pending + [d for d in inputs]
        if not cands:
            break
        D = min(cands)
        if cap is not None and D > cap:
            gb.complete = False
            break
        plist = pairs.pop(D, {})
        for (a, b) in sorted(plist, key=lambda p: (plist[p], p)):
            l = plist[(a, b)]
            ma = l - gb.leads[a]
            mb = l - gb.leads[b]
            ca = 1 / gb.lcs[a]
            cb = 1 / gb.lcs[b]
            s: dict = {}
            for k, c in gb.elems[a].items():
                s[k + ma] = c * ca
            for k, c in gb.elems[b].items():
                kk = k + mb
                v = s.get(kk, 0) - c * cb
                if v:
                    s[kk] = v
                else:
                    s.pop(kk, None)
            rep = None
            if track:
                rep = {}
                for k, c in gb.reps[a].items():
                    rep[k + ma] = c * ca
                for k, c in gb.reps[b].items():
                    kk = k + mb
                    v = rep.get(kk, 0) - c * cb
                    if v:
                        rep[kk] = v
                    else:
                        rep.pop(kk, None)
            s, rep = gb.reduce(s, rep, full=False)
            if s:
                add(s, rep, D, False)
            elif track and rep:
                gb.syz.append((rep, D))
        todo = inputs.pop(D, None)
        if todo is None:
            continue
        aux_idx, main_idx = todo
        for i in aux_idx:
            v = dict(aux[i])
            s, rep = gb.reduce(v, {} if track else None, full=False)
            if s:
                plain = rel_lead is not None and s == aux[i] and (
                    ring_aux_flags is not None and ring_aux_flags[i]
                )
                add(s, rep, D, plain)
            elif track and rep:
                gb.syz.append((rep, D))
        for i in main_idx:
            v = dict(main[i])
            s, rep = gb.reduce(v, {} if track else None, full=False)
            if s:
                kidx = len(gb.kept)
                gb.kept.append(i)
                gb.kept_degrees.append(D)
                if track:
                    rep[kidx] = rep.get(kidx, 0) + 1
                add(s, rep, D, False)
            else:
                gb.redundant[i] = {k: -c for k, c in rep.items()} if track else {}
        gb.max_degree = D
    return gb


# syzygy signs: for a zero-reduced S-pair the accumulated rep r satisfies
# sum r_k * kept_k == 0 modulo aux, so r itself is the relation.


# ---------------------------------------------------------------------------
# public wrappers


def _check_same_module(gens: Sequence[FreeElement]) -> FreeModule:
    if not gens:
        raise InvalidInput("no generators")
    mod = gens[0].module
    for g in gens:
        if g.module != mod:
            raise InvalidInput("generators live in different free modules")
    return mod


def buchberger(generators: Sequence[FreeElement], ring: RingDescriptor | None = None, track: bool = False) -> GroebnerBasis:
    """Groebner basis of the submodule spanned by ``generators``.

    Over a quotient ring the relation multiples f*g_j are adjoined.  The
    returned basis is minimal (no lead divides another) and deterministic
    in the input order.
    """
    mod = _check_same_module(generators)
    ring = ring or mod.ring
    ctx = context(ring)
    aux = ring_aux(ctx, mod.degrees)
    gb = _run(ctx, mod.degrees, [g.terms for g in generators], aux, track=track,
              ring_aux_flags=[True] * len(aux))
    gb.module = mod
    return gb


def divide(elem: FreeElement, gb: GroebnerBasis):
    """Division with remainder: ``elem = sum q_i * gb_i + remainder``.

    Returns ``(quotients, remainder)`` with quotients a dict from basis
    index to ring element (packed monomial keys).
    """
    rem, quot = gb.reduce(elem.terms, {}, full=True, quot=True)
    q: dict[int, dict] = defaultdict(dict)
    for k, c in quot.items():
        q[k & MASK][k & ~MASK] = c
    return dict(q), rem


def syzygies(gb: GroebnerBasis) -> GradedMatrix:
    """Relations among the kept generators of a tracked basis, as columns."""
    if gb.reps is None:
        raise InvalidInput("syzygies need a tracked Groebner basis")
    ctx = gb.ctx
    src_deg = [d for _, d in gb.syz]
    kept = FreeModule(ctx.ring, tuple(gb.kept_degrees))
    cols = [ctx.nf(dict(r)) for r, _ in gb.syz]
    keep = [i for i, c in enumerate(cols) if c]
    return GradedMatrix(FreeModule(ctx.ring, tuple(src_deg[i] for i in keep)), kept, [cols[i] for i in keep])


# ---------------------------------------------------------------------------
# resolutions


class ChainComplexSegment:
    """Free modules F_0..F_L with differentials d_k: F_k -> F_{k-1}.

    ``maps[k-1]`` is d_k.  For resolutions the augmentation records the
    images of the F_0 generators in the ambient free module of the resolved
    module, and ``gbs[k]`` is the tracked basis of im(d_k) in F_{k-1}
    (``gbs[0]`` spans the resolved submodule in the ambient module) used
    for lifting.
    """

    def __init__(self, modules: list[FreeModule], maps: list[GradedMatrix], augmentation=None):
        self.modules = modules
        self.maps = maps
        self.augmentation = augmentation
        self.gbs: list[GroebnerBasis | None] = []
        self.ambient: FreeModule | None = None
        self.ambient_aux: list[dict] = []

    @property
    def length(self) -> int:
        return len(self.modules) - 1

    def d(self, k: int) -> GradedMatrix:
        return self.maps[k - 1]

    def betti(self) -> list[int]:
        return [m.rank for m in self.modules]

    def check_dd(self) -> bool:
        for k in range(2, len(self.modules)):
            if not self.d(k - 1).compose(self.d(k)).is_zero():
                return False
        return True

    def twist(self, k: int) -> "ChainComplexSegment":
        out = ChainComplexSegment(
            [m.twist(k) for m in self.modules],
            [GradedMatrix(m.source.twist(k), m.target.twist(k), m.columns) for m in self.maps],
            self.augmentation,
        )
        out.gbs = self.gbs
        out.ambient = self.ambient.twist(k) if self.ambient is not None else None
        out.ambient_aux = self.ambient_aux
        return out

    def graded_ranks(self, k: int) -> list[int]:
        return [m.graded_rank(k) for m in self.modules]


def _canon(vecs: Iterable[dict]) -> list:
    return [sorted((k, str(c)) for k, c in v.items()) for v in vecs]


def _spec_key(ring: RingDescriptor, degrees, aux, main, length) -> str:
    payload = json.dumps(
        {"v": CACHE_VERSION, "ring": ring.fingerprint(), "deg": list(degrees),
         "aux": _canon(aux), "main": _canon(main), "L": length},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


_MEMO: dict[str, ChainComplexSegment] = {}
_DISK_DIR: str | None = None


def set_cache_dir(path: str | None) -> None:
    """Enable (or with None disable) the on-disk resolution cache."""
    global _DISK_DIR
    _DISK_DIR = path
    if path:
        os.makedirs(path, exist_ok=True)


def clear_memory_cache() -> None:
    _MEMO.clear()


def _disk_load(key: str):
    if not _DISK_DIR:
        return None
    p = os.path.join(_DISK_DIR, key + ".pkl")
    if not os.path.exists(p):
        return None
    try:
        with open(p, "rb") as fh:
            return pickle.load(fh)
    except Exception:
        return None


def _disk_store(key: str, value) -> None:
    if not _DISK_DIR:
        return
    p = os.path.join(_DISK_DIR, key + ".pkl")
    tmp = p + f".{os.getpid()}.tmp"
    with open(tmp, "wb") as fh:
        pickle.dump(value, fh, protocol=pickle.HIGHEST_PROTOCOL)
    os.replace(tmp, p)  # last writer wins; values are canonical


def resolve_submodule(
    ring: RingDescriptor,
    ambient_degrees: Sequence[int],
    generators: Sequence[dict],
    relations: Sequence[dict] = (),
    length: int = 3,
    use_cache: bool = True,
) -> ChainComplexSegment:
    """Minimal free resolution of the submodule of ``F/relations`` spanned by
    ``generators`` (F free with the given degrees), through F_length.

    Results are cached under a twist-normalized key: shifting all ambient
    degrees by a constant gives the shifted resolution.
    """
    if length < 0:
        raise InvalidParameter("length must be >= 0")
    degrees = tuple(ambient_degrees)
    if not degrees:
        res = ChainComplexSegment([FreeModule(ring, ())], [], [])
        res.gbs = [None]
        res.ambient = FreeModule(ring, ())
        return res
    shift = min(degrees)
    norm = tuple(b - shift for b in degrees)
    key = _spec_key(ring, norm, relations, generators, length)
    res = _MEMO.get(key) if use_cache else None
    if res is None and use_cache:
        res = _disk_load(key)
        if res is not None:
            _MEMO[key] = res
    if res is None:
        res = _resolve(ring, norm, list(generators), list(relations), length)
        if use_cache:
            _MEMO[key] = res
            _disk_store(key, res)
    return res.twist(-shift) if shift else res


def _resolve(ring, degrees, generators, relations, length) -> ChainComplexSegment:
    ctx = context(ring)
    amb = FreeModule(ring, tuple(degrees))
    aux = list(relations) + ring_aux(ctx, degrees)
    flags = [False] * len(relations) + [True] * (len(aux) - len(relations))
    last = length == 0
    gb = _run(ctx, degrees, generators, aux, track=not last,
              cap=max((_vec_degree(ctx, degrees, g) for g in generators if g), default=None) if last else None,
              ring_aux_flags=flags)
    f0 = FreeModule(ring, tuple(gb.kept_degrees))
    modules = [f0]
    maps: list[GradedMatrix] = []
    augmentation = [generators[i] for i in gb.kept]
    gbs = [gb]
    prev = gb
    for p in range(1, length + 1):
        if not modules[-1].rank:
            modules.append(FreeModule(ring, ()))
            maps.append(GradedMatrix(modules[-1], modules[-2], []))
            gbs.append(None)
            continue
        syz = syzygies(prev)
        tgt = modules[-1]
        cols = syz.columns
        last = p == length
        aux_p = ring_aux(ctx, tgt.degrees)
        cap = max((_vec_degree(ctx, tgt.degrees, c) for c in cols), default=None) if last else None
        gbp = _run(ctx, tgt.degrees, cols, aux_p, track=not last, cap=cap,
                   ring_aux_flags=[True] * len(aux_p))
        fp = FreeModule(ring, tuple(gbp.kept_degrees))
        maps.append(GradedMatrix(fp, tgt, [cols[i] for i in gbp.kept]))
        modules.append(fp)
        gbs.append(gbp)
        prev = gbp
    res = ChainComplexSegment(modules, maps, augmentation)
    res.gbs = gbs
    res.ambient = amb
    res.ambient_aux = list(relations)
    return res


def free_resolution(M, length: int = 3, use_cache: bool = True) -> ChainComplexSegment:
    """Minimal graded free resolution of a presented module through F_length."""
    gens = [{j: mpq(1)} for j in range(M.generators.rank)]
    return resolve_submodule(M.ring, M.generators.degrees, gens, M.relation_columns, length, use_cache)
