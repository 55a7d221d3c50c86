from fractions import Fraction

from gmpy2 import mpq
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from qgrkit.linalg import Echelon, kernel, rank, solve


def dense_rank(rows, ncols):
    m = [[Fraction(r.get(j, 0)) for j in range(ncols)] for r in rows]
    rk = 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(len(m)):
            if i != rk and m[i][c]:
                f = m[i][c] / m[rk][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rk])]
        rk += 1
    return rk


matrices = st.lists(
    st.dictionaries(st.integers(0, 5), st.integers(-3, 3).filter(bool), max_size=4),
    min_size=1,
    max_size=6,
)


@seed(7)
@settings(max_examples=80, deadline=None)
@given(matrices)
def test_rank_matches_dense(rows):
    rows = [{k: mpq(v) for k, v in r.items()} for r in rows]
    assert rank(rows) == dense_rank(rows, 6)


@seed(8)
@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_vectors_annihilate(rows):
    rows = [{k: mpq(v) for k, v in r.items()} for r in rows]
    ker = kernel(rows)
    assert len(ker) == len(rows) - rank(rows)
    for v in ker:
        total: dict = {}
        for i, c in v.items():
            for k, x in rows[i].items():
                total[k] = total.get(k, 0) + c * x
        assert all(x == 0 for x in total.values())


def test_solve():
    rows = [{0: mpq(1), 1: mpq(1)}, {1: mpq(2)}]
    coeffs = solve(rows, {0: mpq(1), 1: mpq(3)})
    assert coeffs == {0: 1, 1: 1}
    assert solve(rows, {2: mpq(1)}) is None


def test_echelon_contains():
    ech = Echelon()
    ech.add({0: mpq(1), 2: mpq(1)})
    ech.add({1: mpq(1)})
    assert ech.contains({0: mpq(2), 1: mpq(5), 2: mpq(2)})
    assert not ech.contains({2: mpq(1)})
    assert ech.rank == 2
