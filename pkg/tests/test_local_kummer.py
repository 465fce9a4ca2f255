import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckecubic import polyfp
from heckecubic.arith import (
    REAL,
    is_power_free,
    primes_up_to,
    squarefree_part,
    valuation,
)
from heckecubic.local_kummer import (
    SplittingData,
    cyclotomic_radicand_class,
    hecke_components,
    is_mth_power_unit,
    is_mth_power_unit_bruteforce,
    kummer_splitting,
    local_density_nu,
    local_hecke_classify,
    local_refinement_obstruction,
    poly_discriminant,
    predicted_average,
)
from heckecubic.orders import maximal_order


def test_splitting_examples():
    assert kummer_splitting(2, 3, 5).components == ((1, 1, 0), (1, 2, 0))
    assert kummer_splitting(10, 3, 3).components == ((1, 1, 0), (2, 1, 1))
    assert kummer_splitting(2, 3, 2).components == ((3, 1, 2),)


def test_rejects_bad_degree():
    for m in (4, 9, 1):
        with pytest.raises(ValueError):
            kummer_splitting(2, m, 5)


def test_classify_examples():
    r = local_hecke_classify(SplittingData(5, ((1, 1, 0), (2, 1, 1))), 3)
    assert r.is_hecke_ramified and r.hecke_components == (1,) and r.local_condition_dim == 1
    for p, comp in ((5, (3, 1, 2)), (3, (1, 3, 0)), (3, (3, 1, 4))):
        assert not local_hecke_classify(SplittingData(p, (comp,))).is_hecke_ramified
    # degree five, type (1^3 2) over Q_3: the unramified component is the Hecke prime
    for d in (3, 5):
        r = local_hecke_classify(SplittingData(3, ((3, 1, d), (1, 2, 0))), 5)
        assert r.hecke_components == (1,)


def test_sympy_oracle_unramified_splitting():
    sympy = pytest.importorskip("sympy")
    x = sympy.symbols("x")
    for m in (3, 5, 7):
        for p in (2, 11, 13, 29, 31, 43):
            if p == m:
                continue
            for n in (2, 3, 5, 6, 10, -7, 17):
                if n % p == 0:
                    continue
                _, fl = sympy.Poly(x**m - n, x, modulus=p).factor_list()
                degrees = sorted(g.degree() for g, _ in fl)
                s = kummer_splitting(n, m, p)
                assert sorted(f for _, f, _ in s.components) == degrees
                assert all(e == 1 and d == 0 for e, _, d in s.components)


def test_cubic_splitting_matches_maximal_order():
    """At p = 3 the (e, f, d) data must agree with the lattice computation."""
    for n in range(2, 80):
        if not is_power_free(n, 3):
            continue
        O = maximal_order((-n, 0, 0, 1))
        assert sorted(kummer_splitting(n, 3, 3).components) == sorted(O.splitting_data(3).components), n


@pytest.mark.parametrize("m", [3, 5, 7])
def test_grid_invariants(m):
    for p in primes_up_to(50):
        for n in range(-60, 61):
            if n == 0 or not is_power_free(abs(n), m):
                continue
            s = kummer_splitting(n, m, p)
            assert s.degree == m
            assert sum(h * f for h, (_, f, _) in zip(s.hecke_exponents, s.components)) % 2 == 0
            r = local_refinement_obstruction(n, m, p)  # raises on disagreement with the classification
            assert (r.status == "obstructed") == local_hecke_classify(s, m).is_hecke_ramified


def test_obstruction_examples():
    assert local_refinement_obstruction(10, 3, 3).status == "obstructed"
    assert local_refinement_obstruction(2, 3, 3).status == "trivial_space"
    assert local_refinement_obstruction(2, 3, 5).status == "kernel"


def test_cube_criterion_at_three():
    for n in range(-200, 201):
        if n == 0 or n % 3 == 0 or not is_power_free(abs(n), 3):
            continue
        obstructed = local_refinement_obstruction(n, 3, 3).status == "obstructed"
        assert obstructed == (n % 9 in (1, 8))


@given(st.integers(1, 10**6), st.sampled_from([(3, 3), (5, 5), (7, 7), (3, 7), (5, 11)]))
def test_mth_power_unit(n, mp):
    m, p = mp
    if n % p == 0:
        return
    assert is_mth_power_unit(n, m, p) == is_mth_power_unit_bruteforce(n, m, p)


def test_densities():
    for p in (2, 5, 7, 11):
        for fam in ("wild_cubic", "tame_cubic", "all_cubic"):
            assert local_density_nu(p, fam) == 1
    assert local_density_nu(3, "tame_cubic") == Fraction(1, 2)
    assert local_density_nu(3, "wild_cubic") == 1
    assert local_density_nu(REAL, "wild_cubic") == Fraction(1, 2)
    assert local_density_nu("real", "tame_cubic", base="imaginary_quadratic") == Fraction(1, 4)


def test_density_depth_stability():
    for p in (2, 3, 5):
        k = 2 * valuation(9, p) + 3
        for fam in ("wild_cubic", "tame_cubic", "all_cubic"):
            assert local_density_nu(p, fam, k) == local_density_nu(p, fam, k + 1)


def test_predicted_average():
    assert predicted_average("Q", "wild") == 2
    assert predicted_average("Q", "tame") == Fraction(3, 2)
    assert predicted_average("imaginary_quadratic", "tame") == Fraction(5, 4)
    with pytest.raises(ValueError):
        predicted_average("Q", "other")


def test_cyclotomic_radicand():
    for p in (3, 5, 7):
        assert cyclotomic_radicand_class(p) == squarefree_part(-p)
    assert poly_discriminant([-2, 0, 0, 1]) == -108


def test_hecke_components_rule():
    # (1^2 1) at an odd prime: ramified component is Hecke, the other is not
    assert hecke_components(((2, 1, 1), (1, 1, 0))) == (0,)
    assert hecke_components(((2, 1, 1),)) == ()


def _partitions_ef(m):
    """All multisets of (e, f) with sum e*f = m."""
    pairs = [(e, f) for e in range(1, m + 1) for f in range(1, m + 1) if e * f <= m]

    def rec(left, start):
        if left == 0:
            yield ()
            return
        for k in range(start, len(pairs)):
            e, f = pairs[k]
            if e * f <= left:
                for rest in rec(left - e * f, k):
                    yield ((e, f),) + rest
    return list(rec(m, 0))


def _nonsquare_norm_is_square(p, f):
    """Is N_{F_q/F_p}(u) a square in F_p for a nonsquare u of F_q, q = p^f?  By explicit arithmetic."""
    rng = random.Random(p * 100 + f)
    g = [0] * f + [1]  # x^f, reducible for f > 1
    while not polyfp.is_irreducible_mod_p(g, p):
        g = [rng.randrange(p) for _ in range(f)] + [1]
    q = p ** f
    for _ in range(1000):
        u = polyfp.trim([rng.randrange(p) for _ in range(f)], p)
        if not any(u):
            continue
        if polyfp.powmod(u, (q - 1) // 2, g, p) != [1]:
            norm = polyfp.powmod(u, (q - 1) // (p - 1), g, p)
            assert len(norm) == 1  # the norm lies in F_p
            return pow(norm[0], (p - 1) // 2, p) == 1
    raise AssertionError("no nonsquare found")


def test_hecke_components_against_local_definition():
    """A component is a Hecke prime iff its exponent is odd and it is inert in some
    unramified quadratic extension of the whole local algebra with square norm.

    At a tame odd prime the unramified classes at component j are 1 and a nonsquare
    unit u_j, and N(u_j) = N_{k_j/F_p}(u_j)^{e_j} modulo squares.
    """
    checked = 0
    for p in (5, 7, 11):
        for m in (3, 5, 7):
            for ef in _partitions_ef(m):
                if any(e % p == 0 for e, _ in ef):
                    continue
                comps = tuple((e, f, e - 1) for e, f in ef)
                s = SplittingData(p, comps)
                nonsquare_norm = [(not _nonsquare_norm_is_square(p, f)) and e % 2 == 1 for e, f in ef]
                expected = []
                for i, h in enumerate(s.hecke_exponents):
                    if h % 2 == 0:
                        continue
                    others = [j for j in range(len(ef)) if j != i]
                    for r in range(len(others) + 1):
                        if any((nonsquare_norm[i] + sum(nonsquare_norm[j] for j in J)) % 2 == 0
                               for J in itertools.combinations(others, r)):
                            expected.append(i)
                            break
                assert hecke_components(comps) == tuple(expected), (p, comps)
                checked += 1
    assert checked > 30
