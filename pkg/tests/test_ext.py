import pytest

from qgrkit.ext import (
    ExtOptions,
    InvalidIndex,
    OracleDisagreement,
    StabilizationError,
    class_equal,
    class_from_map,
    ext_basis,
    ext_class,
    ext_dims,
    ext_qgr,
    is_nonzero,
    restrict,
    stabilization_bound,
    yoneda_compose,
)
from qgrkit.modules import ModuleMap, PresentedModule, hom_basis, make_A_twist, make_chi, make_G, make_Q_top
from qgrkit.oracles import oracle_basechange, oracle_chart, oracle_forpolinoms, duality_check, prop_ext
from qgrkit.rings import InvalidParameter, hilbert_dim, make_ring


def test_A_to_A():
    A = make_ring(2)
    for l in (-8, -5, 0, 3):
        r = ext_qgr(make_A_twist(A, 0), make_A_twist(A, l))
        expect = [hilbert_dim(A, l), 0, hilbert_dim(A, -l - 5)]
        assert r.as_list(2) == expect
        assert "basechange" in r.certified_by


def test_A_to_chi():
    A = make_ring(3)
    for j in range(-4, 14):
        assert ext_qgr(make_A_twist(A, 2), make_chi(A, j)).as_list(2) == [int((2 - j) % 9 == 0), 0, 0]


def test_chi_to_chi_examples():
    A = make_ring(3)
    assert ext_qgr(make_chi(A, 7), make_chi(A, 5)).as_list(2) == [0, 1, 0]
    assert ext_qgr(make_chi(A, 7), make_chi(A, 2)).as_list(2) == [0, 1, 0]
    assert ext_qgr(make_chi(A, 7), make_chi(A, 0)).as_list(2) == [0, 0, 1]
    assert ext_qgr(make_chi(A, 7), make_chi(A, 7)).as_list(2) == [1, 0, 0]


def test_chi_to_A():
    A = make_ring(2)
    # Ext^2 = 1 iff j = k - (2n+1) mod 4n-3
    for j in range(-6, 6):
        r = ext_qgr(make_chi(A, 3), make_A_twist(A, j))
        assert r.as_list(2) == [0, 0, int((j - (3 - 5)) % 5 == 0)]


def test_residue_periodicity_and_twist():
    A = make_ring(2)
    base = ext_dims(make_chi(A, 0), make_chi(A, 3)).as_list(2)
    assert ext_dims(make_chi(A, 5), make_chi(A, 8)).as_list(2) == base
    assert ext_dims(make_chi(A, 4), make_chi(A, 7)).as_list(2) == base
    G = make_G(A, 4)
    assert ext_dims(G, make_A_twist(A, 4)).as_list(2) == ext_dims(make_G(A, 6), make_A_twist(A, 6)).as_list(2)


def test_self_hom_nonzero():
    A = make_ring(3)
    for M in (make_Q_top(A, 6, 4), make_G(A, 6), make_chi(A, 1)):
        assert ext_dims(M, M)[0] >= 1


def test_B_forpolinoms():
    B = make_ring(2, quotient=False)
    assert oracle_forpolinoms(B, 0, 3, 0) == 3
    assert oracle_forpolinoms(B, 0, -11, 3) == 1
    assert oracle_forpolinoms(B, 0, 5, 1) == 0 and oracle_forpolinoms(B, 0, 5, 2) == 0
    r = ext_qgr(PresentedModule(B, (0,), []), PresentedModule(B, (11,), []), 3)
    assert r.as_list(3) == [0, 0, 0, 1]
    assert "forpolinoms" in r.certified_by


def test_oracles_direct():
    A = make_ring(3)
    assert oracle_basechange(make_chi(A, 4), 4) == [1, 0, 0]
    assert oracle_chart(make_chi(A, 0), make_chi(A, -2)) == [0, 1, 0]
    assert oracle_chart(make_chi(A, 0), make_chi(A, -5)) == [0, 1, 0]
    assert oracle_chart(make_chi(A, 0), make_chi(A, -7)) == [0, 0, 1]
    # chart over all residues for Ext^2(chi_k, chi_{k-(2n+1)})
    for k in range(9):
        assert oracle_chart(make_chi(A, k), make_chi(A, k - 7))[2] == 1


def test_duality():
    A = make_ring(3)
    for M in (make_chi(A, 0), make_chi(A, 9), make_A_twist(A, 2), make_Q_top(A, 6, 4)):
        assert duality_check(M)["ok"]


def test_prop_ext_table_consistency():
    # the closed form itself is periodic and twist invariant
    for n in (2, 3):
        e = 4 * n - 3
        for d in range(-10, 10):
            assert prop_ext(n, ("chi", 0), ("chi", d)) == prop_ext(n, ("chi", e), ("chi", d + e))


def test_stabilization_failure():
    A = make_ring(2)
    with pytest.raises(StabilizationError) as exc:
        ext_dims(make_chi(A, 0), make_chi(A, 0), 2, ExtOptions(t_start=0, cap=1))
    assert len(exc.value.trace) == 2


def test_imax_ceiling():
    A = make_ring(2)
    with pytest.raises(InvalidParameter):
        ext_dims(make_A_twist(A, 0), make_A_twist(A, 0), 3)


def test_oracle_disagreement_is_loud(monkeypatch):
    import qgrkit.oracles as orc

    A = make_ring(2)
    monkeypatch.setattr(orc, "applicable_oracles", lambda M, N: [("fake", lambda M, N, i: [7, 0, 0])])
    with pytest.raises(OracleDisagreement):
        ext_qgr(make_A_twist(A, 0), make_A_twist(A, 0))


def test_trace_and_bound():
    A = make_ring(3)
    N = make_chi(A, 5)
    r = ext_dims(make_chi(A, 7), N)
    assert r.bound == stabilization_bound(N, 2)
    assert len(r.truncation_trace) >= 3
    assert r.to_json()["dims"] == {"0": 0, "1": 1, "2": 0}


def test_invalid_index():
    A = make_ring(2)
    with pytest.raises(InvalidIndex):
        ext_class(make_chi(A, 0), make_chi(A, 1), 1)


def test_compos_lemma():
    n = 2
    A = make_ring(n)
    for j in range(4 * n - 3):
        Aj, chij = make_A_twist(A, j), make_chi(A, j)
        chiJ, AJ = make_chi(A, j + 2 * n + 1), make_A_twist(A, j + 2 * n + 1)
        a = class_from_map(hom_basis(Aj, chij)[0])
        b = ext_class(chiJ, Aj, 2)
        assert is_nonzero(yoneda_compose(a, b))
        c = class_from_map(hom_basis(AJ, chiJ)[0])
        assert is_nonzero(yoneda_compose(b, c))


def test_identity_composition():
    A = make_ring(3)
    M, N = make_chi(A, 7), make_chi(A, 5)
    alpha = ext_class(M, N, 1)
    left = yoneda_compose(class_from_map(ModuleMap.identity(N)), alpha)
    right = yoneda_compose(alpha, class_from_map(ModuleMap.identity(M)))
    assert class_equal(left, alpha) and class_equal(right, alpha)


def test_restrict_keeps_class():
    A = make_ring(3)
    alpha = ext_class(make_chi(A, 7), make_chi(A, 0), 2)
    beta = restrict(alpha, alpha.t + 2)
    assert is_nonzero(beta) and class_equal(alpha, beta)
    assert alpha.comparison is not None


def test_basis_size_matches_dims():
    A = make_ring(3)
    Q, G = make_Q_top(A, 6, 4), make_G(A, 6)
    for p in range(3):
        assert len(ext_basis(Q, G, p)) == ext_dims(Q, G)[p]


def test_bilinearity():
    A = make_ring(3)
    M, N = make_A_twist(A, 0), make_A_twist(A, 4)
    phis = hom_basis(M, N)
    assert len(phis) >= 2
    K = make_chi(A, 4)
    psi = hom_basis(N, K)[0]
    s = class_from_map(phis[0] + phis[1])
    lhs = yoneda_compose(class_from_map(psi), s)
    a = yoneda_compose(class_from_map(psi), class_from_map(phis[0]))
    b = yoneda_compose(class_from_map(psi), class_from_map(phis[1]))
    from qgrkit.ext import class_coordinates

    ca, cb, cl = class_coordinates(a), class_coordinates(b), class_coordinates(lhs)
    assert [x + y for x, y in zip(ca, cb)] == cl


def test_associativity():
    A = make_ring(3)
    alpha = class_from_map(hom_basis(make_A_twist(A, 7), make_chi(A, 7))[0])
    beta = ext_class(make_chi(A, 7), make_chi(A, 5), 1)
    gamma = ext_class(make_chi(A, 5), make_chi(A, 0), 1)
    left = yoneda_compose(gamma, yoneda_compose(beta, alpha))
    right = yoneda_compose(yoneda_compose(gamma, beta), alpha)
    assert class_equal(left, right)
    assert is_nonzero(yoneda_compose(gamma, beta))
