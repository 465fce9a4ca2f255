import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckecubic import linalg as L

small = st.integers(-9, 9)


def matrices(r, c):
    return st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)


def is_unimodular(m):
    return abs(L.int_det(m)) == 1


@given(matrices(4, 3))
def test_hnf_shape_and_lattice(rows):
    h = L.hnf(rows)
    pivots = [next(j for j, x in enumerate(r) if x) for r in h]
    assert pivots == sorted(set(pivots))
    for i, r in enumerate(h):
        c = pivots[i]
        assert r[c] > 0
        assert all(0 <= h[k][c] < r[c] for k in range(i))
    # same lattice: HNF of the union equals the HNF
    assert L.hnf(rows + h) == h


@given(matrices(3, 4))
def test_snf_identity(a):
    diag, u, v = L.snf(a)
    d = L.matmul(L.matmul(u, a), v)
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            assert x == (diag[i] if i == j else 0)
    assert all(x >= 0 for x in diag)
    for x, y in zip(diag, diag[1:]):
        assert y % x == 0 if x else y == 0
    assert is_unimodular(u) and is_unimodular(v)


def test_snf_against_sympy():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form
    rng = random.Random(3)
    for _ in range(40):
        a = [[rng.randint(-20, 20) for _ in range(3)] for _ in range(3)]
        ours = L.snf(a)[0]
        theirs = smith_normal_form(sympy.Matrix(a), domain=sympy.ZZ)
        assert ours == [abs(int(theirs[i, i])) for i in range(3)]


@given(matrices(4, 3))
def test_integer_kernel(a):
    for c in L.integer_kernel(a):
        assert all(x == 0 for x in L.vecmat(c, a))
    rank = len(L.hnf(a))
    assert len(L.integer_kernel(a)) == 4 - rank


def test_det_and_inverse():
    a = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    assert L.int_det(a) == L.det3(a) == 18
    inv = L.rat_inverse(a)
    assert L.matmul(a, inv) == [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]


@given(st.sampled_from([2, 3, 5]), matrices(3, 4))
def test_mod_p_kernels(p, a):
    for k in L.left_kernel_mod_p(a, p):
        assert all(x % p == 0 for x in L.vecmat(k, a))
    for k in L.right_kernel_mod_p(a, p):
        assert all(sum(x * y for x, y in zip(row, k)) % p == 0 for row in a)
    assert L.rank_mod_p(a, p) + len(L.right_kernel_mod_p(a, p)) == 4


@given(st.lists(st.integers(0, 2**10 - 1), max_size=12))
def test_f2_rank_and_kernel(vs):
    r = L.f2_rank(vs)
    ker = L.f2_kernel(vs)
    assert r + len(ker) == len(vs)
    for mask in ker:
        assert L.f2_combine(mask, vs) == 0
    b = L.F2Basis()
    for v in vs:
        b.add(v)
    for v in vs:
        w = b.witness(v)
        assert w is not None and L.f2_combine(w, vs) == v
    assert L.f2_pack(L.f2_unpack(0b1011, 4)) == 0b1011


def test_lll_gram_reduces():
    basis = [[1, 0, 0], [17, 1, 0], [123, 45, 1]]
    gram = [[Fraction(sum(x * y for x, y in zip(a, b))) for b in basis] for a in basis]
    t = L.lll_gram(gram)
    assert is_unimodular(t)
    new = L.matmul(t, basis)
    assert sorted(sum(x * x for x in r) for r in new) == [1, 1, 1]
