"""Ext groups in qgr(R) via truncation colimits, and Yoneda products.

For finitely generated M,

    Ext^i_qgr(M, N) = colim_t Ext^i_gr(M_{>=t}, N)_0 .

Because ``M_{>=t} / M_{>=t+1}`` is a sum of copies of ``k(-t)``, the terms
of the colimit are constant from t on as soon as ``Ext^j_gr(k, N)_e = 0``
for every ``e >= t`` and ``j <= i + 1``.  :func:`stabilization_bound`
computes the least such level ``T_N`` (local duality bounds the scan from
above), so a value read at ``t >= T_N`` is exact.  The engine still reads a
window of consecutive levels and refuses to answer if they disagree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .groebner import ChainComplexSegment, FreeModule, resolve_submodule, free_resolution
from .linalg import Echelon
from .modules import ModuleMap, PresentedModule, truncation_generators
from .rings import InvalidParameter, RingDescriptor
from .terms import MASK, context

__all__ = [
    "ExtResult",
    "ExtClass",
    "StabilizationError",
    "OracleDisagreement",
    "InvalidIndex",
    "ExtOptions",
    "ext_qgr",
    "ext_dims",
    "stabilization_bound",
    "ext_class",
    "ext_basis",
    "yoneda_compose",
    "is_nonzero",
    "class_from_map",
    "class_coordinates",
    "class_equal",
    "restrict",
    "HomComplex",
    "truncation_resolution",
]


class StabilizationError(RuntimeError):
    def __init__(self, msg: str, trace):
        super().__init__(msg)
        self.trace = trace


class OracleDisagreement(RuntimeError):
    def __init__(self, msg: str, engine, oracle):
        super().__init__(msg)
        self.engine = engine
        self.oracle = oracle


class InvalidIndex(ValueError):
    pass


@dataclass
class ExtOptions:
    t_start: int | None = None
    window: int = 3
    cap_factor: int = 10
    cap: int | None = None
    check_oracles: bool = True


@dataclass
class ExtResult:
    source: str
    target: str
    dims: dict[int, int]
    truncation_trace: list[tuple[int, dict[int, int]]]
    certified_by: list[str] = field(default_factory=list)
    bound: int | None = None
    t_used: int | None = None
    method: str = "truncation-colimit"

    def __getitem__(self, i: int) -> int:
        return self.dims.get(i, 0)

    def as_list(self, i_max: int | None = None) -> list[int]:
        top = max(self.dims) if i_max is None else i_max
        return [self.dims.get(i, 0) for i in range(top + 1)]

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "dims": {str(i): d for i, d in sorted(self.dims.items())},
            "method": self.method,
            "bound": self.bound,
            "t_used": self.t_used,
            "truncation_trace": [[t, [d[i] for i in sorted(d)]] for t, d in self.truncation_trace],
            "certified_by": list(self.certified_by),
        }


def _name(M: PresentedModule) -> str:
    return M.tag or f"M{list(M.degrees)}"


# ---------------------------------------------------------------------------
# Hom complexes


def _nf_term(N: PresentedModule, key: int) -> dict:
    cache = N.__dict__.setdefault("_nf_terms", {})
    hit = cache.get(key)
    if hit is None:
        hit = N.normal_form(context(N.ring).nf({key: mpq(1)}))
        cache[key] = hit
    return hit


def _column_entries(d) -> list[list[tuple[int, dict]]]:
    """For each target row j, the list of (column k, ring element) with d_jk != 0."""
    rows: list[list[tuple[int, dict]]] = [[] for _ in range(d.target.rank)]
    for k, col in enumerate(d.columns):
        parts: dict[int, dict] = {}
        for key, c in col.items():
            parts.setdefault(key & MASK, {})[key & ~MASK] = c
        for j, p in parts.items():
            rows[j].append((k, p))
    return rows


class HomComplex:
    """Degree-e part of Hom(F_., N) for a free complex F.

    Cochains of degree p are dicts keyed by ``(j, key)`` with j a generator
    of F_p and key a standard monomial of N in degree ``b_j + e``.
    """

    def __init__(self, F: ChainComplexSegment, N: PresentedModule, e: int = 0):
        self.F = F
        self.N = N
        self.e = e
        self._rows: dict[int, list] = {}
        self._images: dict[tuple[int, tuple], dict] = {}

    def basis(self, p: int) -> list[tuple[int, int]]:
        if p < 0 or p >= len(self.F.modules):
            return []
        out = []
        for j, b in enumerate(self.F.modules[p].degrees):
            for key in self.N.graded_piece(b + self.e):
                out.append((j, key))
        return out

    def dim(self, p: int) -> int:
        return len(self.basis(p))

    def _entries(self, p: int):
        if p not in self._rows:
            self._rows[p] = _column_entries(self.F.d(p + 1))
        return self._rows[p]

    def image(self, p: int, cochain: dict) -> dict:
        """d^p applied to a p-cochain (needs F_{p+1})."""
        if p + 1 >= len(self.F.modules):
            raise InvalidParameter(f"resolution too short for d^{p}")
        rows = self._entries(p)
        out: dict = {}
        N = self.N
        for (j, key), c in cochain.items():
            for k, poly in rows[j]:
                for m, pc in poly.items():
                    for kk, cc in _nf_term(N, key + m).items():
                        idx = (k, kk)
                        v = out.get(idx, 0) + c * pc * cc
                        if v:
                            out[idx] = v
                        else:
                            out.pop(idx, None)
        return out

    def differential_rows(self, p: int) -> list[dict]:
        return [self.image(p, {b: mpq(1)}) for b in self.basis(p)]

    def rank(self, p: int) -> int:
        if p < 0:
            return 0
        e = Echelon()
        for r in self.differential_rows(p):
            e.add(r)
        return e.rank

    def cohomology_dims(self, i_max: int) -> dict[int, int]:
        ranks = {p: self.rank(p) for p in range(0, i_max + 1)}
        return {i: self.dim(i) - ranks[i] - ranks.get(i - 1, 0) for i in range(i_max + 1)}

    def cocycles(self, p: int) -> list[dict]:
        basis = self.basis(p)
        e = Echelon(track=True)
        out = []
        for b in basis:
            dep = e.add(self.image(p, {b: mpq(1)}))
            if dep is not None:
                out.append({basis[i]: c for i, c in dep.items()})
        return out

    def coboundary_echelon(self, p: int) -> Echelon:
        e = Echelon()
        if p >= 1:
            for r in self.differential_rows(p - 1):
                e.add(r)
        return e

    def cohomology_basis(self, p: int) -> list[dict]:
        e = self.coboundary_echelon(p)
        out = []
        for z in self.cocycles(p):
            if e.add(z) is None:
                out.append(z)
        return out


# ---------------------------------------------------------------------------
# stabilization certificate


def _residue_field(ring: RingDescriptor) -> PresentedModule:
    ctx = context(ring)
    rels = [{ctx.var[i]: mpq(1)} for i in range(ring.num_vars)]
    return PresentedModule(ring, (0,), rels, tag="k")


def _lowest_degree(N: PresentedModule) -> int | None:
    return N.min_degree()


def stabilization_bound(N: PresentedModule, i_max: int) -> int:
    """Least T with Ext^j_gr(k, N)_e = 0 for all e >= T and j <= i_max + 1."""
    ring = N.ring
    if not N.rank or N.is_zero_module():
        return -(10**9)
    cache = N.__dict__.setdefault("_stab", {})
    if i_max in cache:
        return cache[i_max]
    dim = ring.krull_dim
    a = ring.a_invariant
    resN = free_resolution(N, dim)
    top = max((max(m.degrees) for m in resN.modules if m.rank), default=0)
    e_hi = a + top
    jmax = i_max + 1
    resk = free_resolution(_residue_field(ring), jmax + 1)
    max_b = max(max(m.degrees) for m in resk.modules if m.rank)
    e_lo = N.min_degree() - max_b - 1
    T = e_lo
    for e in range(e_hi, e_lo - 1, -1):
        hc = HomComplex(resk, N, e)
        if any(hc.dim(p) for p in range(jmax + 1)):
            dims = hc.cohomology_dims(jmax)
            if any(dims.values()):
                T = e + 1
                break
    cache[i_max] = T
    return T


# ---------------------------------------------------------------------------
# truncation resolutions


def truncation_resolution(M: PresentedModule, t: int, length: int) -> ChainComplexSegment:
    if M.rank:
        t = max(t, min(M.degrees))
    gens = truncation_generators(M, t)
    return resolve_submodule(M.ring, M.degrees, gens, M.relation_columns, length)


def _dims_at(M: PresentedModule, N: PresentedModule, t: int, i_max: int) -> dict[int, int]:
    F = truncation_resolution(M, t, i_max + 1)
    return HomComplex(F, N, 0).cohomology_dims(i_max)


def _check_imax(ring: RingDescriptor, i_max: int) -> None:
    ceiling = ring.krull_dim - 1
    if i_max < 0 or i_max > ceiling:
        raise InvalidParameter(f"i_max must be in 0..{ceiling} for {ring}")


def _t_range(M: PresentedModule, N: PresentedModule, i_max: int, opts: ExtOptions):
    bound = stabilization_bound(N, i_max)
    if opts.t_start is not None:
        t0 = opts.t_start
    else:
        # below the lowest generator every truncation is M itself
        t0 = max(bound, min(M.degrees))
    cap = opts.cap if opts.cap is not None else t0 + opts.cap_factor * M.ring.a_max
    return bound, t0, cap


def ext_dims(M: PresentedModule, N: PresentedModule, i_max: int = 2, options: ExtOptions | None = None) -> ExtResult:
    """Dimension-only Ext computation (no oracle cross-check)."""
    opts = options or ExtOptions()
    _check_imax(M.ring, i_max)
    if M.ring != N.ring:
        raise InvalidParameter("modules over different rings")
    if not M.rank or M.is_zero_module() or not N.rank or N.is_zero_module():
        return ExtResult(_name(M), _name(N), {i: 0 for i in range(i_max + 1)}, [], ["zero-module"])
    bound, t0, cap = _t_range(M, N, i_max, opts)
    trace: list[tuple[int, dict[int, int]]] = []
    t = t0
    while True:
        if t > cap:
            raise StabilizationError(
                f"Ext({_name(M)}, {_name(N)}) did not stabilize by t={cap}", trace)
        dims = _dims_at(M, N, t, i_max)
        trace.append((t, dims))
        if len(trace) >= opts.window and all(d == dims for _, d in trace[-opts.window:]):
            break
        if len(trace) >= 2 and trace[-2][1] != dims and trace[-2][0] >= bound:
            raise StabilizationError(
                f"non-monotone trace above the certified bound {bound}", trace)
        t += 1
    t_used = trace[-opts.window][0]
    certified = ["window"]
    if t_used >= bound:
        certified.append("local-duality-bound")
    return ExtResult(_name(M), _name(N), dict(dims), trace, certified, bound, t_used)


def ext_qgr(M: PresentedModule, N: PresentedModule, i_max: int = 2, options: ExtOptions | None = None) -> ExtResult:
    """Ext^i_qgr(M, N) for i <= i_max, cross-checked by every applicable oracle."""
    opts = options or ExtOptions()
    res = ext_dims(M, N, i_max, opts)
    if opts.check_oracles:
        from .oracles import applicable_oracles

        for tag, fn in applicable_oracles(M, N):
            val = fn(M, N, i_max)
            if val is None:
                continue
            mine = [res.dims.get(i, 0) for i in range(i_max + 1)]
            if list(val[: i_max + 1]) != mine:
                raise OracleDisagreement(
                    f"{tag} disagrees on Ext({_name(M)}, {_name(N)}): engine {mine}, oracle {list(val)}",
                    mine, list(val))
            res.certified_by.append(tag)
    return res


# ---------------------------------------------------------------------------
# classes and Yoneda products


@dataclass
class ExtClass:
    """A cocycle F_p(M_{>=t}) -> N of degree 0 representing an Ext^p class."""

    source: PresentedModule
    target: PresentedModule
    p: int
    t: int
    cocycle: dict
    resolution: ChainComplexSegment
    scale: mpq = mpq(1)
    comparison: dict | None = None

    def hom_complex(self) -> HomComplex:
        return HomComplex(self.resolution, self.target, 0)

    def is_cocycle(self) -> bool:
        if self.p + 1 >= len(self.resolution.modules):
            return True
        return not self.hom_complex().image(self.p, self.cocycle)


def _resolution_length(p: int) -> int:
    return max(3, p + 2)


def _class_level(M, N, p, t=None):
    bound = stabilization_bound(N, max(p, 1))
    lo = min(M.degrees) if M.rank else 0
    level = max(bound, lo)
    if t is not None:
        level = max(level, t)
    return level


def ext_basis(M: PresentedModule, N: PresentedModule, p: int, t: int | None = None) -> list[ExtClass]:
    """Cocycle representatives of a basis of Ext^p_qgr(M, N)."""
    level = _class_level(M, N, p, t)
    F = truncation_resolution(M, level, _resolution_length(p))
    hc = HomComplex(F, N, 0)
    out = []
    for z in hc.cohomology_basis(p):
        out.append(ExtClass(M, N, p, level, z, F))
    return out


def ext_class(M: PresentedModule, N: PresentedModule, i: int, index: int = 0, t: int | None = None) -> ExtClass:
    basis = ext_basis(M, N, i, t)
    if index < 0 or index >= len(basis):
        raise InvalidIndex(f"Ext^{i}({_name(M)}, {_name(N)}) has dimension {len(basis)}; index {index} invalid")
    cls = basis[index]
    cls.comparison = restrict(cls, cls.t + 1).cocycle
    return cls


def class_from_map(phi: ModuleMap, t: int | None = None) -> ExtClass:
    """The Ext^0 class of a degree-0 module map."""
    M, N = phi.source, phi.target
    level = _class_level(M, N, 0, t)
    F = truncation_resolution(M, level, 3)
    co = {}
    for j, h in enumerate(F.augmentation):
        img = phi.apply(h)
        for key, c in img.items():
            co[(j, key)] = c
    return ExtClass(M, N, 0, level, co, F)


def _lift_through(gb, vec: dict) -> dict:
    lifted = gb.lift(vec)
    if lifted is None:
        raise RuntimeError("lift failure: vector not in the image")
    return lifted


def comparison_map(src: ChainComplexSegment, dst: ChainComplexSegment, top: int, start: list[dict]) -> list[list[dict]]:
    """Lift a map on F_0 level to a chain map src_k -> dst_k for k <= top.

    ``start[j]`` is the image in dst_0 of generator j of src_0.  Returns
    ``maps[k][j]`` = image of generator j of src_k in dst_k.
    """
    maps = [start]
    for k in range(1, top + 1):
        d_src = src.d(k)
        d_dst_gb = dst.gbs[k]
        if d_dst_gb is None or d_dst_gb.reps is None:
            raise RuntimeError(f"target resolution lacks a tracked basis at step {k}")
        prev = maps[k - 1]
        cur = []
        ctx = context(src.modules[0].ring)
        for col in d_src.columns:
            # image of d(e) under the previous component
            v: dict = {}
            for key, c in col.items():
                mono = key & ~MASK
                for kk, cc in prev[key & MASK].items():
                    kk2 = kk + mono
                    x = v.get(kk2, 0) + c * cc
                    if x:
                        v[kk2] = x
                    else:
                        v.pop(kk2, None)
            v = ctx.nf(v)
            cur.append(ctx.nf(_lift_through(d_dst_gb, v)) if v else {})
        maps.append(cur)
    return maps


def _pull_cocycle(cocycle: dict, chain_k: list[dict], N: PresentedModule) -> dict:
    """Precompose a cocycle on dst_k with a chain-map component src_k -> dst_k."""
    by_gen: dict[int, dict] = {}
    for (j, key), c in cocycle.items():
        by_gen.setdefault(j, {})[key] = c
    out: dict = {}
    for i, img in enumerate(chain_k):
        acc: dict = {}
        for key, c in img.items():
            j = key & MASK
            phi = by_gen.get(j)
            if not phi:
                continue
            mono = key & ~MASK
            for nk, nc in phi.items():
                for kk, cc in _nf_term(N, nk + mono).items():
                    x = acc.get(kk, 0) + c * nc * cc
                    if x:
                        acc[kk] = x
                    else:
                        acc.pop(kk, None)
        for kk, cc in acc.items():
            out[(i, kk)] = cc
    return out


def restrict(cls: ExtClass, t_new: int) -> ExtClass:
    """Transport a class to a higher truncation level along M_{>=t_new} c M_{>=t}."""
    if t_new == cls.t:
        return cls
    if t_new < cls.t:
        raise InvalidParameter("can only raise the truncation level")
    M = cls.source
    Fn = truncation_resolution(M, t_new, len(cls.resolution.modules) - 1)
    F = cls.resolution
    start = [ _lift_through(F.gbs[0], h) for h in Fn.augmentation ]
    chain = comparison_map(Fn, F, cls.p, start)
    co = _pull_cocycle(cls.cocycle, chain[cls.p], cls.target)
    return ExtClass(M, cls.target, cls.p, t_new, co, Fn, cls.scale)


def yoneda_compose(beta: ExtClass, alpha: ExtClass) -> ExtClass:
    """beta o alpha in Ext^{p+q}(M, K) for alpha in Ext^p(M,N), beta in Ext^q(N,K)."""
    N = alpha.target
    if beta.source.fingerprint() != N.fingerprint():
        raise InvalidParameter("classes are not composable: middle modules differ")
    p, q = alpha.p, beta.p
    K = beta.target
    u = beta.t
    need = max(alpha.t, u, stabilization_bound(K, max(p + q, 1)))
    need_len = max(p + q + 1, len(alpha.resolution.modules) - 1)
    a = alpha
    if len(a.resolution.modules) - 1 < need_len:
        F = truncation_resolution(alpha.source, alpha.t, need_len)
        a = ExtClass(alpha.source, N, p, alpha.t, alpha.cocycle, F, alpha.scale)
    if a.t < need:
        a = restrict(a, need)
    F = a.resolution
    G = beta.resolution
    # a: F_p -> N lands in N_{>=u}; lift to G_0 along the augmentation
    by_gen: dict[int, dict] = {}
    for (j, key), c in a.cocycle.items():
        by_gen.setdefault(j, {})[key] = c
    start = []
    for j in range(F.modules[p].rank):
        v = by_gen.get(j, {})
        start.append(_lift_through(G.gbs[0], v) if v else {})
    # shift F so that F_p plays the role of position 0
    shifted = ChainComplexSegment(F.modules[p:], F.maps[p:], None)
    chain = comparison_map(shifted, G, q, start)
    co = _pull_cocycle(beta.cocycle, chain[q], K)
    return ExtClass(alpha.source, K, p + q, a.t, co, F, alpha.scale * beta.scale)


def is_nonzero(cls: ExtClass, confirm: bool = True) -> bool:
    """Is the class nonzero in Ext_qgr?  Decided at level t and, with
    ``confirm``, again after transport to t+1."""
    level = max(cls.t, stabilization_bound(cls.target, max(cls.p, 1)))
    c = restrict(cls, level) if level > cls.t else cls
    ech = c.hom_complex().coboundary_echelon(c.p)
    verdict = bool(ech.reduce(c.cocycle))
    if confirm:
        c2 = restrict(c, c.t + 1)
        ech2 = c2.hom_complex().coboundary_echelon(c2.p)
        v2 = bool(ech2.reduce(c2.cocycle))
        if v2 != verdict:
            raise StabilizationError("class verdict changed between consecutive truncation levels",
                                     [(c.t, verdict), (c2.t, v2)])
    return verdict


def class_coordinates(cls: ExtClass) -> list:
    """Coordinates of a class in the basis returned by :func:`ext_basis` at its level."""
    hc = cls.hom_complex()
    basis = hc.cohomology_basis(cls.p)
    e = Echelon(track=True)
    nb = 0
    if cls.p >= 1:
        for r in hc.differential_rows(cls.p - 1):
            e.add(r)
            nb += 1
    for z in basis:
        e.add(z)
    sol = e.solve(cls.cocycle)
    if sol is None:
        raise RuntimeError("cocycle not in the span of cocycles")
    return [sol.get(nb + i, mpq(0)) for i in range(len(basis))]


def _aligned(x: ExtClass, y: ExtClass) -> tuple[ExtClass, ExtClass]:
    L = max(len(x.resolution.modules), len(y.resolution.modules)) - 1
    t = max(x.t, y.t)
    out = []
    for c in (x, y):
        if len(c.resolution.modules) - 1 < L:
            c = ExtClass(c.source, c.target, c.p, c.t, c.cocycle,
                         truncation_resolution(c.source, c.t, L), c.scale)
        out.append(restrict(c, t))
    return out[0], out[1]


def class_equal(x: ExtClass, y: ExtClass) -> bool:
    """Do two classes in the same Ext group coincide?"""
    if x.p != y.p or x.source.fingerprint() != y.source.fingerprint() or x.target.fingerprint() != y.target.fingerprint():
        raise InvalidParameter("classes live in different Ext groups")
    a, b = _aligned(x, y)
    diff = dict(a.cocycle)
    for k, c in b.cocycle.items():
        v = diff.get(k, 0) - c
        if v:
            diff[k] = v
        else:
            diff.pop(k, None)
    return not a.hom_complex().coboundary_echelon(a.p).reduce(diff)
