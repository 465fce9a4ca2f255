import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckecubic.arith import primes_up_to
from heckecubic.heuristics import (
    MOMENT_GROUPS,
    CertifiedValue,
    ModelConfig,
    batch_rank_f2,
    classical_moment,
    corank_distribution,
    count_surjections,
    empirical_surjection_moment,
    euler_product_constants,
    malle_moment,
    malle_probability,
    mean_two_power,
    moment_prediction,
    prediction_table,
    sample_cokernel,
    spin_moment,
    surjections_elementary,
)
from heckecubic.linalg import f2_rank


def exact_corank_distribution(n, u_plus):
    """Enumerate every alternating n x n matrix with u_plus extra rows."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    counts = {}
    total = 0
    for bits in itertools.product((0, 1), repeat=len(pairs) + n * u_plus):
        m = [[0] * n for _ in range(n)]
        for (i, j), b in zip(pairs, bits):
            m[i][j] = m[j][i] = b
        extra = bits[len(pairs):]
        rows = [int("".join(map(str, r)), 2) for r in m]
        rows += [int("".join(map(str, extra[k * n:(k + 1) * n])), 2) for k in range(u_plus)]
        c = n - f2_rank(rows)
        counts[c] = counts.get(c, 0) + 1
        total += 1
    return {c: Fraction(k, total) for c, k in counts.items()}


class TestModel:
    def test_trivial_sizes(self):
        cor = sample_cokernel(ModelConfig(1, 0, 500))
        assert set(cor.tolist()) == {1}
        assert exact_corank_distribution(2, 0) == {0: Fraction(1, 2), 2: Fraction(1, 2)}
        dist = corank_distribution(sample_cokernel(ModelConfig(2, 0, 20000, seed=3)))
        assert abs(dist[0] - 0.5) < 0.02 and abs(dist[2] - 0.5) < 0.02

    @pytest.mark.parametrize("n,u_plus", [(3, 0), (4, 0), (4, 1), (3, 2)])
    def test_against_exhaustive_enumeration(self, n, u_plus):
        exact = exact_corank_distribution(n, u_plus)
        samples = 40000
        dist = corank_distribution(sample_cokernel(ModelConfig(n, u_plus, samples, seed=n + u_plus)))
        for c, p in exact.items():
            sd = math.sqrt(float(p) * (1 - float(p)) / samples)
            assert abs(dist.get(c, 0) - float(p)) < 5 * sd + 1e-9

    def test_reproducible(self):
        cfg = ModelConfig(20, 1, 3000, seed=42, block_size=1000)
        assert np.array_equal(sample_cokernel(cfg), sample_cokernel(cfg))
        assert not np.array_equal(sample_cokernel(cfg), sample_cokernel(ModelConfig(20, 1, 3000, seed=43)))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ModelConfig(64, 0, 10)
        with pytest.raises(ValueError):
            ModelConfig(10, -1, 10)

    @given(st.integers(1, 20), st.integers(1, 25), st.integers(0, 2**32 - 1))
    def test_batch_rank_matches_scalar(self, n, m, seed):
        rng = np.random.default_rng(seed)
        rows = rng.integers(0, 2**n, size=(4, m), dtype=np.uint64)
        ranks = batch_rank_f2(rows, n)
        for b in range(4):
            assert ranks[b] == f2_rank([int(x) for x in rows[b]])

    def test_large_n_means(self):
        cor = sample_cokernel(ModelConfig(30, 2, 30000, seed=7))
        mean, se = mean_two_power(cor)
        assert abs(mean - 1.5) < 5 * se
        rep = empirical_surjection_moment(ModelConfig(30, 2, 30000, seed=7), 1, cor)
        assert rep.predicted == Fraction(1, 2) and abs(rep.z_score) < 5


def test_surjections_elementary():
    # brute force: ordered pairs of vectors in F_2^3 spanning a plane
    vecs = range(8)
    spanning = sum(1 for a in vecs for b in vecs if a and b and a != b)
    assert surjections_elementary(3, 2) == spanning == 42
    assert surjections_elementary(1, 2) == 0
    assert surjections_elementary(5, 0) == 1


def test_moment_predictions():
    assert moment_prediction(1, 1) == Fraction(1, 2)
    assert moment_prediction(1, 0) == 1
    assert moment_prediction(2, 0) == 2


def test_malle_probability():
    p = malle_probability(0, 0).value
    assert abs(p.value - 0.4194) < 5e-5
    for u in (0, 1, 2):
        probs = [malle_probability(d, u).value.value for d in range(30)]
        assert abs(sum(probs) - 1) < 1e-8
        first = sum(2**d * q for d, q in enumerate(probs))
        assert abs(first - (1 + 2.0**-u)) < 1e-8


def test_classical_moment():
    assert classical_moment(1, 1) == Fraction(3, 2)
    assert classical_moment(1, 0) == 2
    assert classical_moment(2, 1) == 3


def independent_euler_constant(bound=200_000):
    """prod over primes q != 3 of prod_{j>=2} (1 + q^-j)^-1, summed in plain floats."""
    log = 0.0
    for q in primes_up_to(bound):
        if q == 3:
            continue
        j = 2
        while True:
            t = float(q) ** -j
            if t < 1e-18:
                break
            log -= math.log1p(t)
            j += 1
    return math.exp(log), 1.0 / bound


def test_euler_constants():
    c = euler_product_constants()
    for key, target in (("tame_h1", 0.5662), ("wild_h1", 0.3775), ("tame_h2", 0.2123), ("wild_h2", 0.2831)):
        assert c[key].rounds_to(target, 4), key
    value, tail = independent_euler_constant()
    assert abs(value - c["C"].value) < tail + c["C"].error


def test_certified_value():
    assert CertifiedValue(0.56619, 1e-6).rounds_to(0.5662, 4)
    assert not CertifiedValue(0.56625, 1e-4).rounds_to(0.5662, 4)


def brute_surjections(g, h):
    """Count surjective homs by enumerating all element tuples and generating subgroups."""
    elements = list(itertools.product(*[range(b) for b in h]))
    count = 0
    images_per_gen = [[e for e in elements if all((a * x) % b == 0 for x, b in zip(e, h))] for a in g]
    for combo in itertools.product(*images_per_gen):
        span = {tuple(0 for _ in h)}
        frontier = list(span)
        while frontier:
            new = []
            for s in frontier:
                for c in combo:
                    t = tuple((x + y) % b for x, y, b in zip(s, c, h))
                    if t not in span:
                        span.add(t)
                        new.append(t)
            frontier = new
        count += len(span) == len(elements)
    return count


@pytest.mark.parametrize("g,h", [((2,), (2,)), ((4,), (2,)), ((2, 2), (2,)), ((4, 2), (2, 2)), ((4, 4), (4,)),
                                 ((8, 2), (4, 2)), ((2, 2, 2), (2, 2)), ((4, 4), (4, 4)), ((2,), (2, 2))])
def test_count_surjections(g, h):
    assert count_surjections(g, h) == brute_surjections(g, h)


def test_moment_tables():
    # rows (H, predicted type I, predicted type II) at unit rank 1
    expected = {"Z/2": (1, Fraction(1, 2)), "Z/4": (Fraction(1, 2), Fraction(1, 4)),
                "Z/2 x Z/2": (2, Fraction(1, 2)), "Z/2 x Z/2 x Z/2": (8, 1)}
    table = {r["moment"]: r for r in prediction_table(1)}
    for name, (p1, p2) in expected.items():
        assert table[name]["predicted_I"] == p1
        assert table[name]["predicted_II"] == p2 == table[name]["malle"]
    assert set(table) == set(MOMENT_GROUPS)
    assert spin_moment((2,), 2) == Fraction(1, 2)
    assert malle_moment((2, 2), 2) == Fraction(1, 8)
