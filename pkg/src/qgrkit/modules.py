"""Finitely presented graded modules and maps between them.

A :class:`PresentedModule` is ``F / (relations)`` with ``F`` free; its graded
pieces are read off from the standard monomials of a Groebner basis of the
relations (plus f-multiples over A).  The named modules used throughout the
package (A(k), chi_j, Q, G, H, A/(x0,x1)) have constructors here.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from .groebner import (
    ChainComplexSegment,
    FreeModule,
    GradedMatrix,
    GroebnerBasis,
    InvalidInput,
    _run,
    resolve_submodule,
    ring_aux,
)
from .linalg import Echelon
from .rings import InvalidParameter, RingDescriptor, hilbert_dim
from .terms import MASK, context

__all__ = [
    "PresentedModule",
    "ModuleMap",
    "ModuleComplex",
    "IsoVerdict",
    "InvalidMap",
    "make_A_twist",
    "make_chi",
    "make_Q",
    "make_Q_top",
    "ideal_module",
    "direct_sum",
    "zero_module",
    "minimal_presentation",
    "kernel_vectors",
    "truncation_generators",
    "truncation_window",
    "subquotient",
    "make_G",
    "make_H",
    "make_Aq01",
    "twist",
    "truncate",
    "kernel",
    "cokernel",
    "image",
    "is_isomorphic",
    "qgr_isomorphic",
    "homology_is_zero",
    "filtration_report",
    "is_torsion",
    "hom_basis",
    "is_exact",
    "sequence_qqq",
    "sequence_xqx",
    "koszul_complex",
]


class InvalidMap(ValueError):
    def __init__(self, msg: str, relation_index: int | None = None):
        super().__init__(msg)
        self.relation_index = relation_index


# ---------------------------------------------------------------------------
# presented modules


class PresentedModule:
    """Graded module ``F/R``: generator degrees plus relation columns.

    ``relation_columns`` are vectors in ``F`` (packed keys, component =
    generator index).  ``tag`` is an optional canonical name such as
    ``"chi(3)"``; it is only used for display and for oracle dispatch.
    """

    def __init__(self, ring: RingDescriptor, degrees: Sequence[int], relations: Sequence[dict] = (), tag: str | None = None):
        self.ring = ring
        self.generators = FreeModule(ring, tuple(degrees))
        ctx = context(ring)
        rels = []
        for r in relations:
            r = ctx.nf({k: mpq(c) for k, c in r.items() if c})
            if r:
                rels.append(r)
        self.relation_columns: list[dict] = rels
        self.tag = tag
        for i, r in enumerate(rels):
            degs = {ctx.mono_degree(k) + self.generators.degrees[k & MASK] for k in r}
            if len(degs) != 1:
                raise InvalidInput(f"relation {i} is not homogeneous")

    # -- basic data -------------------------------------------------------
    @property
    def degrees(self) -> tuple[int, ...]:
        return self.generators.degrees

    @property
    def rank(self) -> int:
        return self.generators.rank

    @property
    def relations(self) -> GradedMatrix:
        ctx = context(self.ring)
        src = FreeModule(self.ring, tuple(self.generators.vec_degree(r) for r in self.relation_columns))
        return GradedMatrix(src, self.generators, self.relation_columns)

    def is_zero_module(self) -> bool:
        return self.rank == 0 or all(self.gb.contains({j: mpq(1)}) for j in range(self.rank))

    @cached_property
    def gb(self) -> GroebnerBasis:
        ctx = context(self.ring)
        aux = list(self.relation_columns) + ring_aux(ctx, self.degrees)
        flags = [False] * len(self.relation_columns) + [True] * (len(aux) - len(self.relation_columns))
        return _run(ctx, self.degrees, [], aux, track=False, ring_aux_flags=flags)

    def graded_piece(self, k: int) -> list[int]:
        """Standard-monomial basis (packed keys) of the degree-k piece."""
        if not self.rank:
            return []
        cache = self.__dict__.setdefault("_pieces", {})
        hit = cache.get(k)
        if hit is None:
            hit = self.gb.standard_monomials(k)
            cache[k] = hit
        return hit

    def dim(self, k: int) -> int:
        return len(self.graded_piece(k))

    def hilbert(self, lo: int, hi: int) -> list[int]:
        return [self.dim(k) for k in range(lo, hi + 1)]

    def normal_form(self, vec: dict) -> dict:
        """Reduced representative of a vector of F in M."""
        if not vec:
            return {}
        return self.gb.reduce(vec)[0]

    def min_degree(self) -> int | None:
        return min(self.degrees) if self.degrees else None

    def max_degree(self) -> int | None:
        return max(self.degrees) if self.degrees else None

    def fingerprint(self) -> tuple:
        return (
            self.ring.fingerprint(),
            self.degrees,
            tuple(tuple(sorted((k, str(c)) for k, c in r.items())) for r in self.relation_columns),
        )

    def canonical(self) -> tuple["PresentedModule", int]:
        """Untwisted form (minimal generator degree 0) and the twist to undo."""
        if not self.degrees:
            return self, 0
        s = min(self.degrees)
        if s == 0:
            return self, 0
        return twist(self, s), -s

    def element(self, comps: Sequence) -> dict:
        """Vector in F from one polynomial (``Poly`` or text) per generator."""
        from .rings import Poly, parse_poly

        ctx = context(self.ring)
        out: dict = {}
        for j, p in enumerate(comps):
            if p is None:
                continue
            if isinstance(p, str):
                p = parse_poly(p, self.ring)
            tm = p.terms if isinstance(p, Poly) else p
            for e, c in tm.items():
                if c:
                    out[ctx.pack(e, j)] = mpq(c)
        return ctx.nf(out)

    def __repr__(self) -> str:
        name = self.tag or "M"
        return f"<{name}: gens {list(self.degrees)}, {len(self.relation_columns)} relations>"


# ---------------------------------------------------------------------------
# maps


class ModuleMap:
    """Degree-preserving map (up to ``twist_degree``) between presented modules.

    ``images[j]`` is a vector in the target's free module, the image of
    source generator j; it must sit in degree ``b_j + twist_degree``.
    """

    def __init__(self, source: PresentedModule, target: PresentedModule, images: Sequence[dict], twist_degree: int = 0, check: bool = True):
        if len(images) != source.rank:
            raise InvalidMap("image count does not match source generators")
        ctx = context(target.ring)
        self.source = source
        self.target = target
        self.twist_degree = twist_degree
        self.images = [target.normal_form(ctx.nf(dict(v))) for v in images]
        for j, v in enumerate(self.images):
            if v:
                d = target.generators.vec_degree(v)
                if d != source.degrees[j] + twist_degree:
                    raise InvalidMap(f"image of generator {j} has degree {d}, expected {source.degrees[j] + twist_degree}")
        if check:
            bad = self.failing_relation()
            if bad is not None:
                raise InvalidMap(f"relation {bad} of the source does not map to zero", bad)

    def apply(self, vec: dict) -> dict:
        """Image of a source-free-module vector, in normal form in the target."""
        out: dict = {}
        imgs = self.images
        for k, c in vec.items():
            mono = k & ~MASK
            for kk, cc in imgs[k & MASK].items():
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
        return self.target.normal_form(context(self.target.ring).nf(out))

    def failing_relation(self) -> int | None:
        for i, r in enumerate(self.source.relation_columns):
            if self.apply(r):
                return i
        return None

    def is_well_defined(self) -> bool:
        return self.failing_relation() is None

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self o other``."""
        return ModuleMap(other.source, self.target, [self.apply(v) for v in other.images],
                         self.twist_degree + other.twist_degree, check=False)

    def is_zero(self) -> bool:
        return all(not v for v in self.images)

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [{k: v * c for k, v in im.items()} for im in self.images],
                         self.twist_degree, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        from .terms import add_into

        imgs = []
        for a, b in zip(self.images, other.images):
            s = dict(a)
            add_into(s, b)
            imgs.append(s)
        return ModuleMap(self.source, self.target, imgs, self.twist_degree, check=False)

    def is_surjective(self) -> bool:
        N = self.target
        ctx = context(N.ring)
        aux = list(N.relation_columns) + list(self.images) + ring_aux(ctx, N.degrees)
        gb = _run(ctx, N.degrees, [], aux, track=False)
        return all(gb.contains({j: mpq(1)}) for j in range(N.rank))

    def piece_matrix(self, k: int) -> list[dict]:
        """Images of the degree-k basis of the source (as NF vectors)."""
        return [self.apply({key: mpq(1)}) for key in self.source.graded_piece(k)]

    @classmethod
    def identity(cls, M: PresentedModule) -> "ModuleMap":
        return cls(M, M, [{j: mpq(1)} for j in range(M.rank)], check=False)

    @classmethod
    def multiplication(cls, source: PresentedModule, target: PresentedModule, poly, check: bool = True) -> "ModuleMap":
        """Multiplication by a ring element; generator j goes to poly * g_j."""
        from .rings import Poly, parse_poly

        if source.rank != target.rank:
            raise InvalidMap("multiplication needs matching generator counts")
        if isinstance(poly, str):
            poly = parse_poly(poly, source.ring)
        ctx = context(source.ring)
        p = ctx.poly_to_keys(poly.terms if isinstance(poly, Poly) else poly)
        imgs = [{k | j: c for k, c in p.items()} for j in range(source.rank)]
        if not isinstance(poly, Poly):
            poly = Poly(poly, source.ring.weights)
        tw = poly.degree + target.degrees[0] - source.degrees[0] if source.rank else 0
        return cls(source, target, imgs, tw, check=check)


def hom_basis(M: PresentedModule, N: PresentedModule, degree: int = 0) -> list[ModuleMap]:
    """Basis of the graded Hom(M, N) in the given degree, by exact linear algebra."""
    if not M.rank:
        return []
    ctx = context(N.ring)
    unknowns = []
    for j, b in enumerate(M.degrees):
        for key in N.graded_piece(b + degree):
            unknowns.append((j, key))
    if not unknowns:
        return []
    rels = M.relation_columns
    rows = []
    for j, key in unknowns:
        row = {}
        mono_key = key
        for ri, r in enumerate(rels):
            # coefficient polynomial r_j times the basis element
            part = {}
            for k, c in r.items():
                if k & MASK == j:
                    part[(k & ~MASK) + mono_key] = c
            if not part:
                continue
            nfv = N.normal_form(ctx.nf(part))
            for kk, cc in nfv.items():
                row[(ri, kk)] = cc
        rows.append(row)
    ech = Echelon(track=True)
    deps = []
    for r in rows:
        d = ech.add(r)
        if d is not None:
            deps.append(d)
    out = []
    for d in deps:
        imgs = [dict() for _ in range(M.rank)]
        for idx, c in d.items():
            j, key = unknowns[idx]
            imgs[j][key] = c
        out.append(ModuleMap(M, N, imgs, degree, check=False))
    return out


# ---------------------------------------------------------------------------
# constructors


def _unit(ctx, exps, comp=0) -> dict:
    return {ctx.pack(exps, comp): mpq(1)}


def _require_A(ring: RingDescriptor):
    if ring.relation is None or ring.n_param is None:
        raise InvalidParameter("this constructor needs the hypersurface ring A")


def make_A_twist(ring: RingDescriptor, k: int) -> PresentedModule:
    return PresentedModule(ring, (-k,), (), tag=f"A({k})")


def make_Aq01(ring: RingDescriptor, k: int) -> PresentedModule:
    """(A/(x0, x1))(k)."""
    ctx = context(ring)
    return PresentedModule(ring, (-k,), [_unit(ctx, (1, 0, 0, 0)), _unit(ctx, (0, 1, 0, 0))], tag=f"Aq01({k})")


def make_chi(ring: RingDescriptor, j: int) -> PresentedModule:
    """chi_j = (A/(x0, x1, x2))(j)."""
    _require_A(ring)
    ctx = context(ring)
    rels = [_unit(ctx, (1, 0, 0, 0)), _unit(ctx, (0, 1, 0, 0)), _unit(ctx, (0, 0, 1, 0))]
    return PresentedModule(ring, (-j,), rels, tag=f"chi({j})")


def make_Q(ring: RingDescriptor, j: int, r: int) -> PresentedModule:
    """Q_{j+2r, j} = (A/(x0, x1^(r+1), x2))(j+2r), for 0 <= r < 2n-1."""
    _require_A(ring)
    n = ring.n_param
    if not (0 <= r < 2 * n - 1):
        raise InvalidParameter(f"r must satisfy 0 <= r < {2 * n - 1}, got {r}")
    ctx = context(ring)
    rels = [_unit(ctx, (1, 0, 0, 0)), _unit(ctx, (0, r + 1, 0, 0)), _unit(ctx, (0, 0, 1, 0))]
    return PresentedModule(ring, (-(j + 2 * r),), rels, tag=f"Q({j + 2 * r},{j})")


def make_Q_top(ring: RingDescriptor, top: int, bottom: int) -> PresentedModule:
    if (top - bottom) % 2:
        raise InvalidParameter("Q(top, bottom) needs top - bottom even")
    return make_Q(ring, bottom, (top - bottom) // 2)


def ideal_module(ring: RingDescriptor, gens_exps: Sequence[tuple], j: int, tag: str | None = None) -> tuple[PresentedModule, ModuleMap]:
    """The ideal generated by monomials, twisted by j, with its embedding into A(j)."""
    ctx = context(ring)
    gens = [_unit(ctx, e) for e in gens_exps]
    res = resolve_submodule(ring, (-j,), gens, (), 1)
    M = PresentedModule(ring, res.modules[0].degrees, res.maps[0].columns if res.maps else (), tag=tag)
    emb = ModuleMap(M, make_A_twist(ring, j), res.augmentation, check=False)
    return M, emb


def make_G(ring: RingDescriptor, j: int) -> PresentedModule:
    """G_j = (x0, x1^(n-1), x2)(j)."""
    _require_A(ring)
    n = ring.n_param
    M, emb = ideal_module(ring, [(1, 0, 0, 0), (0, n - 1, 0, 0), (0, 0, 1, 0)], j, tag=f"G({j})")
    M.embedding = emb
    return M


def make_H(ring: RingDescriptor, j: int) -> PresentedModule:
    """H_j = (x0, x1, x2)(j)."""
    _require_A(ring)
    M, emb = ideal_module(ring, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)], j, tag=f"H({j})")
    M.embedding = emb
    return M


_TAG = re.compile(r"^(A|chi|G|H|Aq01)\((-?\d+)\)$|^Q\((-?\d+),(-?\d+)\)$")


def retag(tag: str | None, k: int) -> str | None:
    """Name of the k-twist of a tagged module."""
    if not tag:
        return None
    m = _TAG.match(tag)
    if not m:
        return None
    if m.group(1):
        return f"{m.group(1)}({int(m.group(2)) + k})"
    return f"Q({int(m.group(3)) + k},{int(m.group(4)) + k})"


def twist(M: PresentedModule, k: int) -> PresentedModule:
    """M(k): same generators and relations, degrees shifted by -k."""
    if k == 0:
        return M
    out = PresentedModule(M.ring, tuple(b - k for b in M.degrees), M.relation_columns, tag=retag(M.tag, k))
    if getattr(M, "embedding", None) is not None:
        e = M.embedding
        tgt = twist(e.target, k)
        out.embedding = ModuleMap(out, tgt, e.images, e.twist_degree, check=False)
    return out


def zero_module(ring: RingDescriptor) -> PresentedModule:
    return PresentedModule(ring, (), (), tag="0")


def direct_sum(mods: Sequence[PresentedModule]) -> PresentedModule:
    if not mods:
        raise InvalidInput("empty direct sum")
    degs = []
    rels = []
    off = 0
    for M in mods:
        degs.extend(M.degrees)
        for r in M.relation_columns:
            rels.append({(k & ~MASK) | ((k & MASK) + off): c for k, c in r.items()})
        off += M.rank
    return PresentedModule(mods[0].ring, degs, rels)


# ---------------------------------------------------------------------------
# kernels, cokernels, images, truncations


def _submodule(N: PresentedModule, gens: Sequence[dict], tag=None) -> tuple[PresentedModule, ModuleMap]:
    """Presentation of the submodule of N spanned by gens, with its inclusion."""
    gens = [g for g in gens if g]
    if not gens:
        Z = zero_module(N.ring)
        return Z, ModuleMap(Z, N, [], check=False)
    res = resolve_submodule(N.ring, N.degrees, gens, N.relation_columns, 1)
    M = PresentedModule(N.ring, res.modules[0].degrees, res.maps[0].columns if res.maps else (), tag=tag)
    inc = ModuleMap(M, N, res.augmentation, check=False)
    return M, inc


def minimal_presentation(M: PresentedModule) -> tuple[PresentedModule, ModuleMap]:
    """Minimal presentation of M with an isomorphism onto M."""
    M2, inc = _submodule(M, [{j: mpq(1)} for j in range(M.rank)], tag=M.tag)
    return M2, inc


def image(phi: ModuleMap) -> PresentedModule:
    M, inc = _submodule(phi.target, phi.images)
    M.inclusion = inc
    return M


def cokernel(phi: ModuleMap) -> PresentedModule:
    N = phi.target
    C = PresentedModule(N.ring, N.degrees, list(N.relation_columns) + [v for v in phi.images if v])
    C2, iso = minimal_presentation(C)
    # projection N -> C2: generator j of N goes to e_j in C, pulled back along iso
    C2.projection_from_target = _pullback_projection(N, C, C2, iso)
    return C2


def _pullback_projection(N, C, C2, iso):
    """Express each generator of N (= generator of C) in C2's generators."""
    ctx = context(N.ring)
    # iso: C2 -> C sends C2's generators to vectors of C; invert by lifting
    gb = _run(ctx, C.degrees, iso.images, list(C.relation_columns) + ring_aux(ctx, C.degrees), track=True)
    imgs = []
    for j in range(N.rank):
        lifted = gb.lift({j: mpq(1)})
        if lifted is None:
            raise RuntimeError("minimal presentation is not surjective")
        # lifted is over kept inputs; map kept index -> C2 generator index
        vec = {}
        for k, c in lifted.items():
            src = gb.kept[k & MASK]
            vec[(k & ~MASK) | src] = c
        imgs.append(vec)
    return ModuleMap(N, C2, imgs, check=False)


def kernel_vectors(phi: ModuleMap) -> list[dict]:
    """Generators of ker(F_M -> N) as vectors in the source's free module."""
    M, N = phi.source, phi.target
    ctx = context(N.ring)
    aux = list(N.relation_columns) + ring_aux(ctx, N.degrees)
    flags = [False] * len(N.relation_columns) + [True] * (len(aux) - len(N.relation_columns))
    gb = _run(ctx, N.degrees, phi.images, aux, track=True, ring_aux_flags=flags)
    out = []
    for r, _ in gb.syz:
        v = {}
        for k, c in ctx.nf(dict(r)).items():
            v[(k & ~MASK) | gb.kept[k & MASK]] = c
        if v:
            out.append(v)
    for i, expr in gb.redundant.items():
        v = {i: mpq(1)}
        for k, c in expr.items():
            key = (k & ~MASK) | gb.kept[k & MASK]
            v[key] = v.get(key, 0) - c
            if not v[key]:
                del v[key]
        v = ctx.nf(v)
        if v:
            out.append(v)
    return out


def kernel(phi: ModuleMap) -> PresentedModule:
    K, inc = _submodule(phi.source, kernel_vectors(phi))
    K.inclusion = inc
    return K


def truncation_window(M: PresentedModule, t: int) -> tuple[int, int]:
    """Degrees whose pieces generate M_{>=t}."""
    a_max = M.ring.a_max
    top = max(t, M.max_degree()) + a_max - 1
    return t, top


def truncation_generators(M: PresentedModule, t: int) -> list[dict]:
    if not M.rank:
        return []
    if t <= M.min_degree():
        return [{j: mpq(1)} for j in range(M.rank)]
    lo, hi = truncation_window(M, t)
    gens = []
    for D in range(lo, hi + 1):
        for key in M.graded_piece(D):
            gens.append({key: mpq(1)})
    return gens


def truncate(M: PresentedModule, t: int) -> PresentedModule:
    """M_{>=t}, with its inclusion into M attached as ``.inclusion``."""
    if M.rank and t <= M.min_degree():
        T = PresentedModule(M.ring, M.degrees, M.relation_columns, M.tag)
        T.inclusion = ModuleMap(T, M, [{j: mpq(1)} for j in range(M.rank)], check=False)
        return T
    T, inc = _submodule(M, truncation_generators(M, t))
    T.inclusion = inc
    return T


# ---------------------------------------------------------------------------
# torsion and isomorphism


def is_torsion(M: PresentedModule) -> bool:
    """Finite length test: every component's lead ideal has pure powers of all variables."""
    if not M.rank:
        return True
    gb = M.gb
    ctx = gb.ctx
    nv = ctx.nvars
    have = [set() for _ in range(M.rank)]
    for lead in gb.leads:
        e = ctx.exps(lead)
        nz = [i for i, x in enumerate(e) if x]
        if len(nz) == 1:
            have[lead & MASK].add(nz[0])
        elif not nz:
            have[lead & MASK].update(range(nv))
    return all(len(h) == nv for h in have)


@dataclass
class IsoVerdict:
    verdict: str  # "isomorphic", "not-isomorphic", "undetermined"
    forward: ModuleMap | None = None
    backward: ModuleMap | None = None
    mismatch_degree: int | None = None
    note: str = ""

    def __bool__(self) -> bool:
        return self.verdict == "isomorphic"


def _hilbert_window(M: PresentedModule, N: PresentedModule) -> tuple[int, int]:
    degs = list(M.degrees) + list(N.degrees)
    if not degs:
        return 0, 0
    lo = min(degs)
    hi = max(degs) + 3 * M.ring.a_max + 2 * (M.ring.degree_d or 0)
    return lo, hi


def _combos(dim: int, height: int, limit: int):
    """Integer coefficient vectors, small support and height first."""
    vals = [v for h in range(1, height + 1) for v in (h, -h)]
    count = 0
    for support in range(1, dim + 1):
        for idx in itertools.combinations(range(dim), support):
            for cs in itertools.product(vals, repeat=support):
                if cs[0] < 0:
                    continue
                vec = [0] * dim
                for i, c in zip(idx, cs):
                    vec[i] = c
                yield vec
                count += 1
                if count >= limit:
                    return


def _combine(basis: list[ModuleMap], coeffs) -> ModuleMap:
    out = None
    for b, c in zip(basis, coeffs):
        if not c:
            continue
        term = b.scale(mpq(c))
        out = term if out is None else out + term
    return out


def _solve_inverse(phi: ModuleMap, back_basis: list[ModuleMap]) -> ModuleMap | None:
    """Find psi in span(back_basis) with psi o phi = id_M (exact linear solve)."""
    M = phi.source
    if not back_basis:
        return None
    rows = []
    for b in back_basis:
        comp = b.compose(phi)
        row = {}
        for j, v in enumerate(comp.images):
            for k, c in M.normal_form(v).items():
                row[(j, k)] = c
        rows.append(row)
    target = {}
    for j in range(M.rank):
        for k, c in M.normal_form({j: mpq(1)}).items():
            target[(j, k)] = c
    ech = Echelon(track=True)
    for r in rows:
        ech.add(r)
    sol = ech.solve(target)
    if sol is None:
        return None
    psi = None
    for i, c in sol.items():
        t = back_basis[i].scale(c)
        psi = t if psi is None else psi + t
    return psi


def _is_identity(phi: ModuleMap) -> bool:
    M = phi.source
    for j, v in enumerate(phi.images):
        d = dict(v)
        d[j] = d.get(j, 0) - 1
        if not d[j]:
            del d[j]
        if M.normal_form({k: c for k, c in d.items() if c}):
            return False
    return True


def is_isomorphic(M: PresentedModule, N: PresentedModule, height: int = 2, limit: int = 2000) -> IsoVerdict:
    """Graded isomorphism test with witnesses.

    Never returns a false negative: without a Hilbert-function mismatch the
    verdict is either "isomorphic" (both witnesses checked) or
    "undetermined".
    """
    lo, hi = _hilbert_window(M, N)
    for k in range(lo, hi + 1):
        if M.dim(k) != N.dim(k):
            return IsoVerdict("not-isomorphic", mismatch_degree=k, note=f"dim differs in degree {k}: {M.dim(k)} vs {N.dim(k)}")
    fwd = hom_basis(M, N)
    back = hom_basis(N, M)
    if not fwd or not back:
        if M.is_zero_module() and N.is_zero_module():
            Z = ModuleMap(M, N, [{} for _ in range(M.rank)], check=False)
            return IsoVerdict("isomorphic", Z, ModuleMap(N, M, [{} for _ in range(N.rank)], check=False))
        return IsoVerdict("undetermined", note="no nonzero degree-0 maps in one direction")
    for coeffs in _combos(len(fwd), height, limit):
        phi = _combine(fwd, coeffs)
        if phi is None or not phi.is_surjective():
            continue
        psi = _solve_inverse(phi, back)
        if psi is None:
            continue
        if _is_identity(psi.compose(phi)) and _is_identity(phi.compose(psi)):
            return IsoVerdict("isomorphic", phi, psi)
    return IsoVerdict("undetermined", note=f"no unit pair found with coefficient height <= {height}")


def qgr_isomorphic(M: PresentedModule, N: PresentedModule, t: int | None = None, height: int = 2, limit: int = 2000) -> IsoVerdict:
    """Isomorphism in qgr: a degree-0 map M_{>=t} -> N with torsion kernel and cokernel."""
    if t is None:
        from .ext import stabilization_bound

        t = max(stabilization_bound(N, 1), stabilization_bound(M, 1))
    Mt = truncate(M, t)
    fwd = hom_basis(Mt, N)
    if not fwd:
        if is_torsion(M) and is_torsion(N):
            return IsoVerdict("isomorphic", note="both torsion")
        return IsoVerdict("undetermined", note="no degree-0 maps")
    for coeffs in _combos(len(fwd), height, limit):
        phi = _combine(fwd, coeffs)
        if phi is None:
            continue
        if not is_torsion(cokernel(phi)):
            continue
        if not is_torsion(kernel(phi)):
            continue
        return IsoVerdict("isomorphic", phi, None, note=f"map from truncation at {t}")
    return IsoVerdict("undetermined", note=f"no map with torsion kernel and cokernel (height <= {height})")


# ---------------------------------------------------------------------------
# complexes of presented modules


@dataclass
class ModuleComplex:
    """``modules[0] -> modules[1] -> ... `` with ``maps[i]: modules[i] -> modules[i+1]``.

    Written left to right as in a short exact sequence; zero ends are
    implicit.  Positions index ``modules``.
    """

    modules: list[PresentedModule]
    maps: list[ModuleMap]
    label: str = ""

    def check_dd(self) -> bool:
        for a, b in zip(self.maps, self.maps[1:]):
            if not b.compose(a).is_zero():
                return False
        return True

    @classmethod
    def from_segment(cls, seg: ChainComplexSegment, augment: PresentedModule | None = None) -> "ModuleComplex":
        """Left-to-right complex F_L -> ... -> F_0 (-> augment)."""
        mods = [PresentedModule(m.ring, m.degrees) for m in seg.modules]
        maps = []
        for k in range(len(seg.modules) - 1, 0, -1):
            d = seg.d(k)
            maps.append(ModuleMap(mods[k], mods[k - 1], d.columns, check=False))
        ordered = list(reversed(mods))
        if augment is not None:
            ordered.append(augment)
            maps.append(ModuleMap(mods[0], augment, seg.augmentation, check=False))
        return cls(ordered, maps)


def homology_is_zero(cx, position: int) -> bool:
    """Exactness of a complex at ``position`` (with zero modules at both ends).

    Accepts a :class:`ModuleComplex` or a :class:`ChainComplexSegment`
    (positions then count homological degree, F_0 being position 0).
    """
    if isinstance(cx, ChainComplexSegment):
        L = len(cx.modules) - 1
        mc = ModuleComplex.from_segment(cx)
        return homology_is_zero(mc, L - position)
    mods = cx.modules
    M = mods[position]
    out_map = cx.maps[position] if position < len(cx.maps) else None
    in_map = cx.maps[position - 1] if position >= 1 else None
    if out_map is None:
        kvecs = [{j: mpq(1)} for j in range(M.rank)]
    else:
        kvecs = kernel_vectors(out_map)
    kvecs = [M.normal_form(v) for v in kvecs]
    kvecs = [v for v in kvecs if v]
    if not kvecs:
        return True
    ctx = context(M.ring)
    aux = list(M.relation_columns) + (list(in_map.images) if in_map else []) + ring_aux(ctx, M.degrees)
    gb = _run(ctx, M.degrees, [], aux, track=False)
    return all(gb.contains(v) for v in kvecs)


# ---------------------------------------------------------------------------
# the Q filtration


@dataclass
class FiltrationStep:
    index: int
    expected: str
    verdict: IsoVerdict
    subquotient: PresentedModule


def subquotient(N: PresentedModule, big: Sequence[dict], small: Sequence[dict]) -> PresentedModule:
    """(span(big) + span(small)) / span(small) inside N."""
    res = resolve_submodule(N.ring, N.degrees, [g for g in big if g], list(N.relation_columns) + [s for s in small if s], 1)
    return PresentedModule(N.ring, res.modules[0].degrees, res.maps[0].columns if res.maps else ())


def filtration_report(Q: PresentedModule) -> list[FiltrationStep]:
    """Subquotients of 0 c Q_{j,j} c Q_{j+2,j} c ... c Q_{j+2k,j}, each compared with chi."""
    m = _TAG.match(Q.tag or "")
    if not m or m.group(1) is not None:
        raise InvalidParameter("filtration_report needs a module built by make_Q")
    top, bottom = int(m.group(3)), int(m.group(4))
    k = (top - bottom) // 2
    ctx = context(Q.ring)
    # the copy of Q_{j+2i,j} inside Q_{j+2k,j} is generated by x1^(k-i)
    gens = [{ctx.pack((0, k - i, 0, 0), 0): mpq(1)} for i in range(k + 1)]
    out = []
    for i in range(k + 1):
        small = [gens[i - 1]] if i > 0 else []
        sq = subquotient(Q, [gens[i]], small)
        expected = make_chi(Q.ring, bottom + 2 * i)
        out.append(FiltrationStep(i, expected.tag, is_isomorphic(sq, expected), sq))
    return out


# ---------------------------------------------------------------------------
# the standard short exact sequences


def is_exact(cx: ModuleComplex) -> bool:
    """d^2 = 0 and zero homology at every position (zero ends implied)."""
    return cx.check_dd() and all(homology_is_zero(cx, p) for p in range(len(cx.modules)))


def _generator_map(src: PresentedModule, dst: PresentedModule) -> ModuleMap:
    """The factorization map sending the cyclic generator to the generator."""
    return ModuleMap(src, dst, [{0: mpq(1)}])


def sequence_qqq(ring: RingDescriptor, j: int, r: int, s: int) -> ModuleComplex:
    """0 -> Q_{j+2r,j} -x1^s-> Q_{j+2r+2s,j} -> Q_{j+2r+2s,j+2r+2} -> 0.

    s = 1 with r replaced by r - 1 gives the surjection onto chi_{j+2r};
    r = 0 gives the injection of chi_j.
    """
    A1 = make_Q(ring, j, r)
    A2 = make_Q(ring, j, r + s)
    A3 = make_Q_top(ring, j + 2 * r + 2 * s, j + 2 * r + 2)
    m = ModuleMap.multiplication(A1, A2, {(0, s, 0, 0): 1})
    return ModuleComplex([A1, A2, A3], [m, _generator_map(A2, A3)], f"qqq(j={j},r={r},s={s})")


def sequence_xqx(ring: RingDescriptor, j: int) -> ModuleComplex:
    """0 -> chi_j -x2-> (A/(x0,x1))(j+2n-1) -> chi_{j+2n-1} -> 0."""
    n = ring.n_param
    X1, X2, X3 = make_chi(ring, j), make_Aq01(ring, j + 2 * n - 1), make_chi(ring, j + 2 * n - 1)
    m = ModuleMap.multiplication(X1, X2, {(0, 0, 1, 0): 1})
    return ModuleComplex([X1, X2, X3], [m, _generator_map(X2, X3)], f"xqx(j={j})")


def koszul_complex(ring: RingDescriptor, pair: str = "x0,x1") -> ModuleComplex:
    """0 -> A(-a-b) -> A(-a) + A(-b) -> A -> A/(u, v) -> 0 for u, v in {x0,x1}, {x0,x2}."""
    gens = {"x0,x1": [(1, 0, 0, 0), (0, 1, 0, 0)], "x0,x2": [(1, 0, 0, 0), (0, 0, 1, 0)]}[pair]
    ctx = context(ring)
    a, b = (ctx.pack(g) for g in gens)
    w = [ring.degree(g) for g in gens]
    A0 = make_A_twist(ring, 0)
    F2 = make_A_twist(ring, -sum(w))
    F1 = direct_sum([make_A_twist(ring, -w[0]), make_A_twist(ring, -w[1])])
    quot = PresentedModule(ring, (0,), [{a: mpq(1)}, {b: mpq(1)}])
    d2 = ModuleMap(F2, F1, [{b: mpq(1), a | 1: mpq(-1)}])
    d1 = ModuleMap(F1, A0, [{a: mpq(1)}, {b: mpq(1)}])
    return ModuleComplex([F2, F1, A0, quot], [d2, d1, _generator_map(A0, quot)], f"koszul({pair})")
