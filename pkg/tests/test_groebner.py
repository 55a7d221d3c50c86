import os

import pytest
from gmpy2 import mpq

from qgrkit import groebner
from qgrkit.groebner import (
    FreeElement,
    FreeModule,
    InvalidInput,
    buchberger,
    divide,
    free_resolution,
    resolve_submodule,
    syzygies,
)
from qgrkit.modules import PresentedModule, make_chi, make_G, make_Q_top
from qgrkit.rings import make_ring, parse_poly
from qgrkit.terms import context


def elems(ring, polys, degrees=(0,)):
    F = FreeModule(ring, tuple(degrees))
    return [FreeElement.from_polys(F, [parse_poly(p, ring)]) for p in polys]


def test_koszul_syzygy_over_B():
    B = make_ring(2, quotient=False)
    gb = buchberger(elems(B, ["x0", "x1"]), track=True)
    S = syzygies(gb)
    assert S.source.degrees == (3,)
    col = S.columns[0]
    ctx = context(B)
    got = {(ctx.exps(k), ctx.comp(k)): c for k, c in col.items()}
    assert got in ({((0, 1, 0, 0), 0): 1, ((1, 0, 0, 0), 1): -1}, {((0, 1, 0, 0), 0): -1, ((1, 0, 0, 0), 1): 1})


def test_x0_x2_over_A_gives_Q():
    # A/(x0, x2) is Q_{0,-4n+4}; checked for n = 2 by Hilbert function
    A = make_ring(2)
    ctx = context(A)
    M = PresentedModule(A, (0,), [{ctx.pack((1, 0, 0, 0)): mpq(1)}, {ctx.pack((0, 0, 1, 0)): mpq(1)}])
    Q = make_Q_top(A, 0, -4)
    assert M.hilbert(-2, 30) == Q.hilbert(-2, 30)


def test_resolution_of_A_mod_x0_x1():
    A = make_ring(3)
    ctx = context(A)
    M = PresentedModule(A, (0,), [{ctx.pack((1, 0, 0, 0)): mpq(1)}, {ctx.pack((0, 1, 0, 0)): mpq(1)}])
    F = free_resolution(M, 3)
    assert [m.degrees for m in F.modules] == [(0,), (1, 2), (3,), ()]
    assert F.check_dd()


def euler_ok(M, L=4):
    F = free_resolution(M, L)
    assert F.check_dd()
    top = min(F.modules[L].degrees) if F.modules[L].rank else M.min_degree() + 40
    for k in range(M.min_degree() - 3, top + 1):
        alt = sum((-1) ** p * r for p, r in enumerate(F.graded_ranks(k)))
        if alt != M.dim(k):
            return False
    return True


@pytest.mark.parametrize("n", [2, 3])
def test_euler_characteristic(n):
    A = make_ring(n)
    for M in (make_chi(A, 0), make_Q_top(A, 4, 0), make_G(A, 2 * n)):
        assert euler_ok(M)


def test_chi_resolution_is_periodic():
    A = make_ring(2)
    F = free_resolution(make_chi(A, 0), 4)
    assert F.betti() == [1, 3, 4, 4, 4]
    # periodic with period deg f after the first step
    assert tuple(d + A.degree_d for d in F.modules[2].degrees) == F.modules[4].degrees


def test_division_remainder():
    B = make_ring(2, quotient=False)
    gb = buchberger(elems(B, ["x0", "x1"]))
    (f,) = elems(B, ["x0*x3 + x1^3 + x2^2"])
    q, rem = divide(f, gb)
    ctx = context(B)
    assert {ctx.exps(k): c for k, c in rem.items()} == {(0, 0, 2, 0): 1}


def test_mixed_modules_rejected():
    B = make_ring(2, quotient=False)
    a = elems(B, ["x0"], (0,))[0]
    b = elems(B, ["x1"], (1,))[0]
    with pytest.raises(InvalidInput):
        buchberger([a, b])


def test_disk_cache_roundtrip(tmp_path):
    A = make_ring(2)
    ctx = context(A)
    rels = [{ctx.pack((1, 0, 0, 0)): mpq(1)}, {ctx.pack((0, 0, 1, 0)): mpq(1)}]
    old = groebner._DISK_DIR
    try:
        groebner.set_cache_dir(str(tmp_path))
        groebner.clear_memory_cache()
        r1 = resolve_submodule(A, (0,), [{0: mpq(1)}], rels, 2)
        assert any(p.suffix == ".pkl" for p in tmp_path.iterdir())
        groebner.clear_memory_cache()
        r2 = resolve_submodule(A, (0,), [{0: mpq(1)}], rels, 2)
        assert [m.degrees for m in r1.modules] == [m.degrees for m in r2.modules]
        # twisted request reuses the same entry
        r3 = resolve_submodule(A, (5,), [{0: mpq(1)}], rels, 2)
        assert [tuple(d - 5 for d in m.degrees) for m in r3.modules] == [m.degrees for m in r1.modules]
        assert len(os.listdir(tmp_path)) == 1
    finally:
        groebner.set_cache_dir(old)
