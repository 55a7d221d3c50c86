"""Left and right mutations realized by explicit modules.

Only pairs whose graded Hom complex sits in a single cohomological degree
are mutated, and only in degrees 0 and 1, where the result is a kernel, a
cokernel or a universal extension.  Every outcome carries the short exact
sequence that defines it.

Shifts follow ``Hom^i(M[a], N[b]) = Ext^{i+b-a}(M, N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .ext import ext_basis, ext_dims, stabilization_bound, truncation_resolution
from .modules import (
    IsoVerdict,
    ModuleComplex,
    ModuleMap,
    PresentedModule,
    cokernel,
    direct_sum,
    hom_basis,
    homology_is_zero,
    is_isomorphic,
    is_torsion,
    kernel,
    make_A_twist,
    make_Aq01,
    make_chi,
    make_G,
    make_H,
    make_Q_top,
    minimal_presentation,
    truncate,
)
from .terms import MASK

__all__ = [
    "ShiftedObject",
    "MutationOutcome",
    "NotModuleRepresentable",
    "left_mutation",
    "right_mutation",
    "iterated_left_mutation",
    "iterated_right_mutation",
    "identify",
    "chain_aboutQ",
    "chain_G",
    "chain_H",
    "chain_G_prime",
]


class NotModuleRepresentable(ValueError):
    def __init__(self, msg: str, position: int | None = None):
        super().__init__(msg)
        self.position = position


@dataclass
class ShiftedObject:
    module: PresentedModule
    shift: int = 0

    @property
    def name(self) -> str:
        base = self.module.tag or f"M{list(self.module.degrees)}"
        return base if not self.shift else f"{base}[{self.shift}]"

    def __repr__(self) -> str:
        return f"<{self.name}>"


@dataclass
class MutationOutcome:
    result: ShiftedObject
    mechanism: str  # hom-kernel, hom-cokernel, ext1-universal-extension, orthogonal
    witness: ModuleComplex | None
    hom_dims: list[int] = field(default_factory=list)
    steps: list["MutationOutcome"] = field(default_factory=list)

    def witness_exact(self) -> bool:
        if self.witness is None:
            return True
        cx = self.witness
        return cx.check_dd() and all(homology_is_zero(cx, p) for p in range(len(cx.modules)))


def _as_shifted(x) -> ShiftedObject:
    return x if isinstance(x, ShiftedObject) else ShiftedObject(x, 0)


def _concentration(dims: list[int]) -> int | None:
    nz = [i for i, d in enumerate(dims) if d]
    if not nz:
        return None
    if len(nz) > 1:
        raise NotModuleRepresentable(f"Hom complex spread over degrees {nz}: {dims}")
    return nz[0]


def _level(X: PresentedModule, Y: PresentedModule) -> int:
    return max(stabilization_bound(Y, 2), min(X.degrees))


def _presentation_of(res) -> PresentedModule:
    F0 = res.modules[0]
    cols = res.maps[0].columns if res.maps else []
    return PresentedModule(F0.ring, F0.degrees, cols)


def _copies(vec: dict, offset: int) -> dict:
    return {(k & ~MASK) | ((k & MASK) + offset): c for k, c in vec.items()}


def _name(M: PresentedModule) -> PresentedModule:
    """Attach a library name when the module is isomorphic to a named one."""
    hit = identify(M)
    if hit is not None:
        M.tag = hit.tag
    return M


def identify(M: PresentedModule, height: int = 2) -> PresentedModule | None:
    """Match M against chi, Q, A, G, H, A/(x0,x1) by graded isomorphism."""
    if not M.rank or M.ring.relation is None:
        return None
    ring = M.ring
    n = ring.n_param
    b = min(M.degrees)
    cands = [make_A_twist(ring, -b), make_chi(ring, -b), make_Aq01(ring, -b),
             make_G(ring, 1 - b), make_H(ring, 1 - b)]
    cands += [make_Q_top(ring, -b, -b - 2 * r) for r in range(1, 2 * n - 1)]
    for C in cands:
        if C.rank > 6 * M.rank + 6:
            continue
        v = is_isomorphic(M, C, height)
        if v:
            M.iso_witness = v
            return C
    return None


def _universal_extension(X: PresentedModule, Y: PresentedModule, t: int, reverse: bool):
    """Middle term E of 0 -> Y -> E -> X_{>=t}^h -> 0 (``reverse`` False) built
    from a basis of Ext^1(X, Y); for ``reverse`` True the roles are
    0 -> Y^h -> E -> X_{>=t} -> 0.  Returns (E, witness complex)."""
    basis = ext_basis(X, Y, 1, t)
    h = len(basis)
    F = basis[0].resolution
    Xt = _presentation_of(F)
    d1 = F.d(1)
    ring = X.ring
    if not reverse:
        # generators: Y, then h copies of F_0
        degs = list(Y.degrees) + list(F.modules[0].degrees) * h
        rels = [dict(r) for r in Y.relation_columns]
        for i, cls in enumerate(basis):
            off = Y.rank + i * F.modules[0].rank
            by_gen: dict[int, dict] = {}
            for (z, key), c in cls.cocycle.items():
                by_gen.setdefault(z, {})[key] = c
            for z, col in enumerate(d1.columns):
                v = _copies(col, off)
                for key, c in by_gen.get(z, {}).items():
                    v[key] = v.get(key, 0) - c
                rels.append({k: c for k, c in v.items() if c})
        E = PresentedModule(ring, degs, rels)
        Xh = direct_sum([Xt] * h)
        inc = ModuleMap(Y, E, [{j: mpq(1)} for j in range(Y.rank)], check=False)
        proj = ModuleMap(E, Xh, [{} for _ in range(Y.rank)] + [{j: mpq(1)} for j in range(Xh.rank)], check=False)
        return E, ModuleComplex([Y, E, Xh], [inc, proj], "universal extension")
    # Y^h -> E -> X_{>=t}: one copy of F_0, h copies of Y
    r0 = F.modules[0].rank
    degs = list(F.modules[0].degrees) + list(Y.degrees) * h
    rels = []
    for i in range(h):
        off = r0 + i * Y.rank
        rels += [_copies(r, off) for r in Y.relation_columns]
    for z, col in enumerate(d1.columns):
        v = dict(col)
        for i, cls in enumerate(basis):
            off = r0 + i * Y.rank
            for (zz, key), c in cls.cocycle.items():
                if zz == z:
                    kk = (key & ~MASK) | ((key & MASK) + off)
                    v[kk] = v.get(kk, 0) - c
        rels.append({k: c for k, c in v.items() if c})
    E = PresentedModule(ring, degs, rels)
    Yh = direct_sum([Y] * h)
    inc = ModuleMap(Yh, E, [{j + r0: mpq(1)} for j in range(Yh.rank)], check=False)
    proj = ModuleMap(E, Xt, [{j: mpq(1)} for j in range(r0)] + [{} for _ in range(Yh.rank)], check=False)
    return E, ModuleComplex([Yh, E, Xt], [inc, proj], "universal extension")


def _minimal(E: PresentedModule, cx: ModuleComplex, position: int) -> tuple[PresentedModule, ModuleComplex]:
    """Replace cx.modules[position] = E by a minimal presentation."""
    E2, iso = minimal_presentation(E)
    from .modules import _pullback_projection

    back = _pullback_projection(E, E, E2, iso)
    mods = list(cx.modules)
    maps = list(cx.maps)
    mods[position] = E2
    if position >= 1:
        m = maps[position - 1]
        maps[position - 1] = ModuleMap(m.source, E2, [back.apply(v) if v else {} for v in m.images], check=False)
    if position < len(maps):
        m = maps[position]
        maps[position] = m.compose(iso)
    return E2, ModuleComplex(mods, maps, cx.label)


def left_mutation(X, Y) -> MutationOutcome:
    """L_X(Y) for module objects with a one-degree Hom complex."""
    X, Y = _as_shifted(X), _as_shifted(Y)
    Xm, Ym = X.module, Y.module
    a, b = X.shift, Y.shift
    dims = ext_dims(Xm, Ym, 2).as_list(2)
    i = _concentration(dims)
    if i is None:
        return MutationOutcome(Y, "orthogonal", None, dims)
    t = _level(Xm, Ym)
    if i == 0:
        Xt = truncate(Xm, t) if t > min(Xm.degrees) else Xm
        maps = hom_basis(Xt, Ym)
        if len(maps) != dims[0]:
            raise NotModuleRepresentable("graded Hom does not match Hom in qgr at the chosen level")
        Xh = direct_sum([Xt] * len(maps))
        imgs = [img for phi in maps for img in phi.images]
        ev = ModuleMap(Xh, Ym, imgs, check=False)
        if _epi(ev):
            K = kernel(ev)
            cx = ModuleComplex([K, Xh, Ym], [K.inclusion, ev], "evaluation kernel")
            return MutationOutcome(ShiftedObject(_name(K), b), "hom-kernel", cx, dims)
        if not _mono(ev):
            raise NotModuleRepresentable("evaluation map neither injective nor surjective")
        C = cokernel(ev)
        cx = ModuleComplex([Xh, Ym, C], [ev, C.projection_from_target], "evaluation cokernel")
        return MutationOutcome(ShiftedObject(_name(C), b - 1), "hom-cokernel", cx, dims)
    if i == 1:
        E, cx = _universal_extension(Xm, Ym, t, reverse=False)
        E, cx = _minimal(E, cx, 1)
        return MutationOutcome(ShiftedObject(_name(E), b - 1), "ext1-universal-extension", cx, dims)
    raise NotModuleRepresentable(f"Hom complex concentrated in degree {i}")


def right_mutation(Y, X) -> MutationOutcome:
    """R_Y(X) for module objects with a one-degree Hom complex Hom(X, Y)."""
    X, Y = _as_shifted(X), _as_shifted(Y)
    Xm, Ym = X.module, Y.module
    a, b = X.shift, Y.shift
    dims = ext_dims(Xm, Ym, 2).as_list(2)
    i = _concentration(dims)
    if i is None:
        return MutationOutcome(X, "orthogonal", None, dims)
    t = _level(Xm, Ym)
    if i == 0:
        Xt = truncate(Xm, t) if t > min(Xm.degrees) else Xm
        maps = hom_basis(Xt, Ym)
        if len(maps) != dims[0]:
            raise NotModuleRepresentable("graded Hom does not match Hom in qgr at the chosen level")
        h = len(maps)
        Yh = direct_sum([Ym] * h)
        imgs = []
        for j in range(Xt.rank):
            v: dict = {}
            for c, phi in enumerate(maps):
                v.update(_copies(phi.images[j], c * Ym.rank))
            imgs.append(v)
        coev = ModuleMap(Xt, Yh, imgs, check=False)
        if _mono(coev):
            C = cokernel(coev)
            cx = ModuleComplex([Xt, Yh, C], [coev, C.projection_from_target], "coevaluation cokernel")
            return MutationOutcome(ShiftedObject(_name(C), a), "hom-cokernel", cx, dims)
        if _epi(coev):
            K = kernel(coev)
            cx = ModuleComplex([K, Xt, Yh], [K.inclusion, coev], "coevaluation kernel")
            return MutationOutcome(ShiftedObject(_name(K), a + 1), "hom-kernel", cx, dims)
        raise NotModuleRepresentable("coevaluation map neither injective nor surjective")
    if i == 1:
        E, cx = _universal_extension(Xm, Ym, t, reverse=True)
        E, cx = _minimal(E, cx, 1)
        return MutationOutcome(ShiftedObject(_name(E), a + 1), "ext1-universal-extension", cx, dims)
    raise NotModuleRepresentable(f"Hom complex concentrated in degree {i}")


def kernel_is_zero(phi: ModuleMap) -> bool:
    from .modules import kernel_vectors

    return all(not phi.source.normal_form(v) for v in kernel_vectors(phi))


# mono/epi are meant in qgr: a torsion kernel or cokernel does not count
def _mono(phi: ModuleMap) -> bool:
    return kernel_is_zero(phi) or is_torsion(kernel(phi))


def _epi(phi: ModuleMap) -> bool:
    return phi.is_surjective() or is_torsion(cokernel(phi))


def iterated_left_mutation(prefix: Sequence, Y) -> MutationOutcome:
    """L_<E_1..E_r>(Y) = L_E1(L_<E_2..E_r>(Y)), folded right to left."""
    cur = _as_shifted(Y)
    steps = []
    for pos in range(len(prefix) - 1, -1, -1):
        try:
            out = left_mutation(prefix[pos], cur)
        except NotModuleRepresentable as exc:
            raise NotModuleRepresentable(str(exc), pos) from exc
        steps.append(out)
        cur = out.result
    last = steps[-1] if steps else MutationOutcome(cur, "orthogonal", None)
    return MutationOutcome(cur, last.mechanism, last.witness, last.hom_dims, steps)


def iterated_right_mutation(suffix: Sequence, X) -> MutationOutcome:
    """R_<E_1..E_r>(X) = R_Er(R_<E_1..E_{r-1}>(X)), folded left to right."""
    cur = _as_shifted(X)
    steps = []
    for pos, Y in enumerate(suffix):
        try:
            out = right_mutation(Y, cur)
        except NotModuleRepresentable as exc:
            raise NotModuleRepresentable(str(exc), pos) from exc
        steps.append(out)
        cur = out.result
    last = steps[-1] if steps else MutationOutcome(cur, "orthogonal", None)
    return MutationOutcome(cur, last.mechanism, last.witness, last.hom_dims, steps)


# ---------------------------------------------------------------------------
# the chains used for the collections


def chain_aboutQ(ring, j: int, k: int) -> tuple[MutationOutcome, PresentedModule]:
    """L_<chi_{j+2k}, ..., chi_{j+2}>(chi_j) with the expected Q_{j+2k,j}."""
    prefix = [make_chi(ring, j + 2 * i) for i in range(k, 0, -1)]
    return iterated_left_mutation(prefix, make_chi(ring, j)), make_Q_top(ring, j + 2 * k, j)


def chain_G(ring, top: int) -> tuple[MutationOutcome, PresentedModule]:
    """L_<A(top), chi_top, chi_{top-2}, ..., chi_{b+2}>(chi_b) with b = 4 or 3."""
    n = ring.n_param
    b = top - 2 * (n - 2)
    prefix = [make_A_twist(ring, top)] + [make_chi(ring, top - 2 * i) for i in range(n - 2)]
    return iterated_left_mutation(prefix, make_chi(ring, b)), make_G(ring, top)


def chain_H(ring) -> tuple[MutationOutcome, PresentedModule]:
    n = ring.n_param
    top = 2 * n + 1
    return iterated_left_mutation([make_A_twist(ring, top)], make_chi(ring, top)), make_H(ring, top)


def chain_G_prime(ring) -> MutationOutcome:
    """L_<A(2n-1), G_2n, A(2n)>(H_{2n+1}); the shift is observed, not assumed."""
    n = ring.n_param
    prefix = [make_A_twist(ring, 2 * n - 1), make_G(ring, 2 * n), make_A_twist(ring, 2 * n)]
    return iterated_left_mutation(prefix, make_H(ring, 2 * n + 1))
