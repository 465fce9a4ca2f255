import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckecubic.arith import is_cubefree, squarefree_part
from heckecubic.orders import (
    ReducibleError,
    hecke_primes,
    maximal_order,
    prime_ideal_as_ideal,
    resolvent_field,
)


def pure(n):
    return maximal_order((-n, 0, 0, 1))


def pari_poly(f):
    c0, c1, c2, _ = f
    return f"x^3 + ({c2})*x^2 + ({c1})*x + ({c0})"


def classical_pure_disc(n):
    """-27 a^2 b^2, or -3 a^2 b^2 when n = +-1 mod 9, for cubefree n = a b^2."""
    a = b = 1
    m = n
    p = 2
    while p * p <= m or m > 1:
        if p * p > m:
            p = m
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e == 1:
            a *= p
        elif e == 2:
            b *= p
        p += 1
    return (-3 if n % 9 in (1, 8) else -27) * a * a * b * b


class TestMaximalOrder:
    def test_examples(self):
        O = pure(2)
        assert O.index == 1 and O.disc == -108
        assert pure(10).disc == -300
        O = maximal_order((-1, -1, 0, 1))
        assert O.index == 1 and O.disc == -23
        assert O.signature == (1, 1)

    def test_reducible_rejected_with_witness(self):
        with pytest.raises(ReducibleError) as info:
            maximal_order((5, 9, 5, 1))
        assert "-1" in str(info.value)

    def test_pure_cubic_discriminants(self):
        for n in range(2, 400):
            if is_cubefree(n):
                O = pure(n)
                assert O.disc == classical_pure_disc(n), n
                assert O.disc * O.index**2 == O.poly_disc

    def test_against_pari(self, pari):
        rng = random.Random(11)
        for _ in range(60):
            f = (rng.randint(-60, 60), rng.randint(-30, 30), rng.randint(-10, 10), 1)
            try:
                O = maximal_order(f)
            except ReducibleError:
                continue
            assert O.disc == int(pari.nfdisc(pari_poly(f))), f


class TestSplitting:
    def test_examples(self):
        assert sorted((P.e, P.f) for P in pure(10).prime_decomposition(3)) == [(1, 1), (2, 1)]
        assert [(P.e, P.f) for P in pure(2).prime_decomposition(3)] == [(3, 1)]
        assert sorted((P.e, P.f) for P in pure(2).prime_decomposition(5)) == [(1, 1), (1, 2)]

    def test_sum_ef(self):
        for n in (2, 3, 10, 12, 28, 30, 91):
            O = pure(n)
            for p in (2, 3, 5, 7, 11, 13):
                assert sum(P.e * P.f for P in O.prime_decomposition(p)) == 3

    def test_against_pari(self, pari):
        rng = random.Random(2)
        for _ in range(40):
            f = (rng.randint(-50, 50), rng.randint(-20, 20), rng.randint(-6, 6), 1)
            try:
                O = maximal_order(f)
            except ReducibleError:
                continue
            nf = pari.nfinit(pari_poly(f))
            for p in (2, 3, 5, 7):
                theirs = sorted((int(P[2]), int(P[3])) for P in pari.idealprimedec(nf, p))
                assert sorted((P.e, P.f) for P in O.prime_decomposition(p)) == theirs, (f, p)

    def test_prime_ideal_product(self):
        for n in (2, 10, 15):
            O = pure(n)
            for p in (2, 3, 5):
                prod = O.unit_ideal()
                for P in O.prime_decomposition(p):
                    prod = prod * prime_ideal_as_ideal(O, P) ** P.e
                assert prod == O.principal(O.from_int(p))


class TestIdeals:
    def test_different_norms(self):
        O = maximal_order((-1, -1, 0, 1))
        assert O.different == O.principal(O.from_power([-1, 0, 3]))
        assert O.different.norm() == 23
        assert pure(2).different.norm() == 108
        assert pure(10).different.norm() == 300

    def test_hecke_ideal(self):
        O = maximal_order((-1, -1, 0, 1))
        assert O.hecke_ideal.norm() == 23**2
        assert pure(2).hecke_ideal.is_square_ideal()
        assert all(k % 2 == 0 for _, k in pure(2).hecke_ideal.factorization())
        H = pure(10).hecke_ideal
        assert not H.is_square_ideal()
        # H = m1 m2 over 3; only the ramified m2 survives as a Hecke prime
        odd = [P for P, k in H.factorization() if k % 2]
        assert sorted((P.p, P.e) for P in odd) == [(3, 1), (3, 2)]
        assert [P.e for P in hecke_primes(pure(10)).hecke_primes] == [2]

    @settings(max_examples=40)
    @given(st.integers(2, 60), st.lists(st.integers(-6, 6), min_size=6, max_size=6))
    def test_norm_multiplicative_and_inverse(self, n, c):
        if not is_cubefree(n):
            return
        O = pure(n)
        a, b = c[:3], c[3:]
        if not any(a) or not any(b):
            return
        I = O.ideal_from_elements([a, [2, 0, 0]])
        J = O.ideal_from_elements([b, [3, 0, 0]])
        assert (I * J).norm() == I.norm() * J.norm()
        assert I * I.inverse() == O.unit_ideal()
        assert (I**2).norm() == I.norm() ** 2


class TestHecke:
    def test_examples(self):
        assert not hecke_primes(pure(2)).is_hecke_ramified
        r = hecke_primes(pure(10))
        assert len(r.hecke_primes) == 1 and r.hecke_primes[0].p == 3

    def test_pure_cubic_criterion(self):
        for n in range(2, 1001):
            if not is_cubefree(n):
                continue
            ramified = hecke_primes(pure(n)).is_hecke_ramified
            assert ramified == (n % 3 != 0 and n % 9 in (1, 8)), n

    def test_dihedral_example_family(self):
        for p in (1, -1):
            for n in range(1, 30):
                try:
                    O = maximal_order((-n * p, -9 * p, n, 1))
                except ReducibleError:
                    continue
                assert not hecke_primes(O).is_hecke_ramified, (n, p)

    def test_unique_hecke_prime_at_simple_discriminant_primes(self):
        rng = random.Random(7)
        seen = 0
        while seen < 40:
            f = (rng.randint(-40, 40), rng.randint(-20, 20), rng.randint(-5, 5), 1)
            try:
                O = maximal_order(f)
            except ReducibleError:
                continue
            rep = hecke_primes(O)
            norm = rep_norm = O.hecke_ideal.norm()
            assert rep_norm.denominator == 1 and math.isqrt(int(norm)) ** 2 == norm
            for p in {P.p for P, _ in rep.factorization}:
                if O.disc % p == 0 and O.disc % (p * p):
                    assert sum(1 for P in rep.hecke_primes if P.p == p) == 1
            seen += 1


def test_resolvent_field():
    assert resolvent_field(maximal_order((7, 9, 7, 1))) == -1
    assert resolvent_field(maximal_order((4, -3, -12, 1))) == 3
    assert resolvent_field(pure(10)) == -3
    # x^3 + 5x^2 + 9x + 5 = (x + 1)(x^2 + 4x + 5); the quadratic factor has field Q(i)
    assert squarefree_part(4**2 - 4 * 5) == -1
