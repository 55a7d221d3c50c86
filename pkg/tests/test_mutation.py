import pytest

from qgrkit.modules import is_isomorphic, make_A_twist, make_chi, make_G, make_H, make_Q_top
from qgrkit.mutation import (
    NotModuleRepresentable,
    ShiftedObject,
    chain_aboutQ,
    chain_G,
    chain_G_prime,
    chain_H,
    identify,
    iterated_left_mutation,
    left_mutation,
    right_mutation,
)
from qgrkit.rings import make_ring


def test_left_mutation_Q_step():
    A = make_ring(3)
    out = left_mutation(make_chi(A, 6), make_Q_top(A, 4, 2))
    assert out.mechanism == "ext1-universal-extension"
    assert out.result.shift == -1
    assert is_isomorphic(out.result.module, make_Q_top(A, 6, 2))
    assert out.witness_exact()


def test_H_is_left_mutation():
    A = make_ring(3)
    out = left_mutation(make_A_twist(A, 7), make_chi(A, 7))
    assert out.mechanism == "hom-kernel"
    assert out.result.shift == 0
    assert is_isomorphic(out.result.module, make_H(A, 7))
    assert out.witness_exact()


def test_right_mutation():
    A = make_ring(3)
    out = right_mutation(make_chi(A, 6), make_chi(A, 8))
    assert out.result.name == "Q(8,6)[1]"
    assert out.witness_exact()


def test_orthogonal_pair_is_unchanged():
    A = make_ring(3)
    Y = ShiftedObject(make_chi(A, 1), 2)
    out = left_mutation(make_chi(A, 4), Y)
    assert out.mechanism == "orthogonal" and out.result is Y


def test_spread_hom_rejected():
    A = make_ring(2)
    # Hom and Ext^2 both nonzero between A(0) and A(-6)
    with pytest.raises(NotModuleRepresentable):
        left_mutation(make_A_twist(A, 0), make_A_twist(A, -6))


@pytest.mark.parametrize("n", [2, 3])
def test_aboutQ(n):
    A = make_ring(n)
    for k in range(n - 1):
        out, expected = chain_aboutQ(A, 5, k)
        assert is_isomorphic(out.result.module, expected)
        assert out.result.shift == -k
        assert all(s.witness_exact() for s in out.steps)


@pytest.mark.parametrize("n", [2, 3])
def test_G_chain(n):
    A = make_ring(n)
    out, expected = chain_G(A, 2 * n)
    assert is_isomorphic(out.result.module, expected)
    assert out.result.shift == -(n - 2)


def test_H_chain():
    A = make_ring(3)
    out, expected = chain_H(A)
    assert is_isomorphic(out.result.module, expected)


def test_identify():
    A = make_ring(3)
    assert identify(make_Q_top(A, 8, 6)).tag == "Q(8,6)"
    assert identify(make_G(A, 6)).tag == "G(6)"


def test_G_prime_not_representable():
    # the third step of this chain has a Hom that is neither mono nor epi in qgr
    A = make_ring(3)
    with pytest.raises(NotModuleRepresentable) as exc:
        chain_G_prime(A)
    assert exc.value.position == 1


def test_iterated_records_steps():
    A = make_ring(3)
    out = iterated_left_mutation([make_A_twist(A, 6), make_chi(A, 6)], make_chi(A, 4))
    assert [s.mechanism for s in out.steps] == ["ext1-universal-extension", "hom-kernel"]
    assert out.result.name == "G(6)[-1]"
