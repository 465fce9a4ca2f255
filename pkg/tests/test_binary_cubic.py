import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckecubic.binary_cubic import (
    BinaryCubicPair,
    _int_pairs_on_quadric,
    a1_invariant,
    a3_invariant,
    act,
    covariant_quartic,
    distinguished_vector,
    enumerate_quadric,
    invariants,
    j_invariant,
    write_buckets_csv,
)

ZERO = BinaryCubicPair((0,) * 8)
coef = st.integers(-6, 6)
pairs = st.lists(coef, min_size=8, max_size=8).map(lambda r: BinaryCubicPair(tuple(r)))


def random_sl2(rng, steps=6):
    g = ((1, 0), (0, 1))
    gens = [((1, 1), (0, 1)), ((1, -1), (0, 1)), ((0, -1), (1, 0)), ((1, 0), (1, 1))]
    for _ in range(steps):
        a = rng.choice(gens)
        g = ((g[0][0] * a[0][0] + g[0][1] * a[1][0], g[0][0] * a[0][1] + g[0][1] * a[1][1]),
             (g[1][0] * a[0][0] + g[1][1] * a[1][0], g[1][0] * a[0][1] + g[1][1] * a[1][1]))
    return g


sl2 = st.integers(0, 10**6).map(lambda s: random_sl2(random.Random(s)))


def test_a1_examples():
    assert a1_invariant(distinguished_vector(3)) == 0
    assert a1_invariant(ZERO) == 0
    assert a1_invariant(BinaryCubicPair((1, 0, 0, 0, 0, 0, 0, 1))) == 1


def test_covariant_of_distinguished_vector():
    for n in (1, 2, -5):
        g = covariant_quartic(distinguished_vector(n))
        assert g.coeffs() == (0, -18, 0, 0, 18 * n)


def test_covariant_symbolic_oracle():
    sympy = pytest.importorskip("sympy")
    x, y, n = sympy.symbols("x y n")
    f1 = 3 * x * y**2
    f2 = x**3 + 2 * n * y**3
    g = sympy.expand(sympy.diff(f1, x) * sympy.diff(f2, y) - sympy.diff(f1, y) * sympy.diff(f2, x))
    assert sympy.simplify(g - (18 * n * y**4 - 18 * x**3 * y)) == 0


def test_covariant_antisymmetric_and_bilinear():
    rng = random.Random(0)
    for _ in range(50):
        a = [rng.randint(-5, 5) for _ in range(4)]
        b = [rng.randint(-5, 5) for _ in range(4)]
        c = [rng.randint(-5, 5) for _ in range(4)]
        assert covariant_quartic(BinaryCubicPair.from_forms(a, a)).coeffs() == (0,) * 5
        lhs = covariant_quartic(BinaryCubicPair.from_forms([x + y for x, y in zip(a, b)], c)).coeffs()
        r1 = covariant_quartic(BinaryCubicPair.from_forms(a, c)).coeffs()
        r2 = covariant_quartic(BinaryCubicPair.from_forms(b, c)).coeffs()
        assert lhs == tuple(x + y for x, y in zip(r1, r2))


def test_a3_examples():
    for n in (1, 2, -5):
        assert a3_invariant(distinguished_vector(n)) == n
    assert a3_invariant(ZERO) == 0
    assert j_invariant(covariant_quartic(distinguished_vector(1))) == 108


def test_distinguished_vector():
    v = distinguished_vector(1)
    assert v.forms() == ([0, 0, 3, 0], [1, 0, 0, 2])
    for n in range(-100, 101):
        if n:
            assert invariants(distinguished_vector(n)) == (0, n)
    with pytest.raises(ValueError):
        distinguished_vector(0)


def test_action_basics():
    v = distinguished_vector(4)
    ident = ((1, 0), (0, 1))
    minus = ((-1, 0), (0, -1))
    assert act(ident, ident, v) == v
    assert act(minus, minus, v) == v
    with pytest.raises(ValueError):
        act(((2, 0), (0, 1)), ident, v)


@given(pairs, sl2, sl2)
def test_invariance(v, g1, g2):
    w = act(g1, g2, v)
    assert a1_invariant(w) == a1_invariant(v)
    assert a3_invariant(w) == a3_invariant(v)


@given(pairs, sl2, sl2, sl2, sl2)
def test_action_composes(v, g1, g2, h1, h2):
    def mul(a, b):
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    # a left action of SL2 x SL2
    assert act(h1, h2, act(g1, g2, v)) == act(mul(h1, g1), mul(h2, g2), v)


def test_enumeration(tmp_path):
    buckets = enumerate_quadric(3, box=1)
    assert buckets
    for b in buckets:
        assert 0 < abs(b.a3) <= 3
        assert b.orbits <= b.vectors
        for r in b.representatives:
            v = BinaryCubicPair(r)
            assert a1_invariant(v) == 0 and a3_invariant(v) == b.a3
    write_buckets_csv(tmp_path / "b.csv", buckets)
    assert (tmp_path / "b.csv").read_text().startswith("A3,vectors")


def test_distinguished_vectors_found_in_box():
    for n in range(-5, 6):
        if not n:
            continue
        buckets = enumerate_quadric(abs(n), box=2 * abs(n), fixed={1: 0, 2: 0, 4: 0, 6: 0, 7: 0})
        found = {b.a3: b for b in buckets}
        assert Fraction(n) in found
        v = tuple(int(x) for x in distinguished_vector(n).r)
        fixed = {1: 0, 2: 0, 4: 0, 6: 0, 7: 0}
        assert v in set(_int_pairs_on_quadric(2 * abs(n), fixed))
        assert found[Fraction(n)].orbits >= 1


def test_box_limit():
    with pytest.raises(ValueError):
        enumerate_quadric(1, box=13)
