"""Random-matrix model for Cl[2], closed-form moments and Euler-product constants.

The model: a uniform alternating n x n matrix over F_2 with ``u_plus`` extra
uniform rows appended; the class group is modelled by the cokernel, whose
F_2-dimension is the corank.  With u_plus = u + 1 this is the Malle model,
with u_plus = u the Hecke-unramified (spin) variant.

Sampling is vectorized with numpy: each matrix row is packed into a uint64
and Gaussian elimination runs over a whole block of matrices at once.
Blocks get independent streams from ``numpy.random.SeedSequence(seed).spawn``,
so the result depends only on (n, u_plus, samples, seed, block_size).
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import primes_up_to
from .linalg import f2_rank

DEFAULT_BLOCK = 10_000


@dataclass(frozen=True)
class ModelConfig:
    n: int
    u_plus: int
    samples: int
    seed: int = 0
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self):
        if self.n < 1 or self.n > 63:
            raise ValueError("matrix size must be between 1 and 63")
        if self.u_plus < 0 or self.samples < 1:
            raise ValueError("u_plus must be >= 0 and samples >= 1")


def _alternating_block(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    bits = rng.integers(0, 2, size=(count, n, n), dtype=np.uint8)
    upper = np.triu(bits, k=1)
    return upper | upper.transpose(0, 2, 1)


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[-1]
    weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)


def batch_rank_f2(rows: np.ndarray, n: int) -> np.ndarray:
    """F_2 ranks of a batch of matrices, rows packed as uint64 bitmasks (shape (B, m))."""
    rows = rows.copy()
    count, m = rows.shape
    rank = np.zeros(count, dtype=np.int64)
    used = np.zeros((count, m), dtype=bool)
    idx = np.arange(count)
    for col in range(n):
        bit = np.uint64(1) << np.uint64(col)
        has = ((rows & bit) != 0) & ~used
        found = has.any(axis=1)
        if not found.any():
            continue
        piv = np.argmax(has, axis=1)
        sel = idx[found]
        prow = rows[sel, piv[found]]
        used[sel, piv[found]] = True
        rank[sel] += 1
        hit = (rows[sel] & bit) != 0
        hit[np.arange(len(sel)), piv[found]] = False
        rows[sel] ^= np.where(hit, prow[:, None], np.uint64(0))
    return rank


def sample_cokernel(cfg: ModelConfig) -> np.ndarray:
    """Coranks of cfg.samples random alternating matrices with cfg.u_plus extra rows."""
    children = np.random.SeedSequence(cfg.seed).spawn(math.ceil(cfg.samples / cfg.block_size))
    out = []
    left = cfg.samples
    for child in children:
        count = min(cfg.block_size, left)
        left -= count
        rng = np.random.default_rng(child)
        alt = _alternating_block(rng, count, cfg.n)
        extra = rng.integers(0, 2, size=(count, cfg.u_plus, cfg.n), dtype=np.uint8)
        rows = _pack_rows(np.concatenate([alt, extra], axis=1))
        out.append(cfg.n - batch_rank_f2(rows, cfg.n))
    return np.concatenate(out)


def corank_distribution(coranks: np.ndarray) -> dict[int, float]:
    vals, counts = np.unique(coranks, return_counts=True)
    return {int(v): c / len(coranks) for v, c in zip(vals, counts)}


def surjections_elementary(r: int, d: int) -> int:
    """#Surj(F_2^r, F_2^d) = prod_{i<d} (2^r - 2^i)."""
    if r < d:
        return 0
    return math.prod(2**r - 2**i for i in range(d))


@dataclass
class MomentReport:
    d: int
    u: int
    empirical_mean: float
    predicted: Fraction
    standard_error: float
    samples: int

    @property
    def z_score(self) -> float:
        if self.standard_error == 0:
            return 0.0 if self.empirical_mean == float(self.predicted) else math.inf
        return (self.empirical_mean - float(self.predicted)) / self.standard_error


def moment_prediction(d: int, u: int) -> Fraction:
    """|wedge^2 V| / |V|^u for V = F_2^d."""
    return Fraction(2 ** (d * (d - 1) // 2)) / Fraction(2) ** (d * u)


def empirical_surjection_moment(cfg: ModelConfig, d: int, coranks: np.ndarray | None = None) -> MomentReport:
    """Mean of #Surj(coker, F_2^d); the relation model has u = u_plus - 1."""
    if d > 4:
        raise ValueError("d must be at most 4")
    if coranks is None:
        coranks = sample_cokernel(cfg)
    vals = np.array([surjections_elementary(int(r), d) for r in range(cfg.n + 1)], dtype=float)[coranks]
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    u = cfg.u_plus - 1
    return MomentReport(d, u, mean, moment_prediction(d, u), se, len(vals))


def mean_two_power(coranks: np.ndarray) -> tuple[float, float]:
    """(mean, standard error) of 2^corank."""
    vals = np.exp2(coranks.astype(float))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CertifiedValue:
    """value with |true - value| <= error."""

    value: float
    error: float

    def rounds_to(self, target: float, places: int) -> bool:
        lo, hi = self.value - self.error, self.value + self.error
        return round(lo, places) == round(hi, places) == round(target, places)


def classical_moment(k: int, u: int) -> Fraction:
    """E(|V|^k) = prod_{j<k} (1 + 2^{j-u})."""
    if k < 1 or u < 0:
        raise ValueError("need k >= 1 and u >= 0")
    return math.prod((1 + Fraction(2) ** (j - u) for j in range(k)), start=Fraction(1))


def _aut_order(d: int) -> int:
    return math.prod(2**d - 2**i for i in range(d))


def _product_tail(u: int, terms: int) -> tuple[float, float]:
    """prod_{i=1}^{terms} (1 + 2^{-u-i})^{-1} and a bound on the relative tail."""
    log = -sum(math.log1p(2.0 ** (-u - i)) for i in range(1, terms + 1))
    # sum_{i > terms} log(1 + 2^{-u-i}) <= 2^{-u-terms}
    return math.exp(log), 2.0 ** (-u - terms)


@dataclass(frozen=True)
class MalleProbability:
    d: int
    u: int
    prefactor: Fraction
    product: CertifiedValue

    @property
    def value(self) -> CertifiedValue:
        p = float(self.prefactor)
        return CertifiedValue(p * self.product.value, p * self.product.error)


def malle_probability(d: int, u: int, precision: float = 1e-15) -> MalleProbability:
    """P(Cl[2] = F_2^d) = |wedge^2 V| / (|Aut V| |V|^u) prod_{i>=1} (1 + 2^{-u-i})^{-1}."""
    if u < 0 or d < 0:
        raise ValueError("need d, u >= 0")
    pre = Fraction(2 ** (d * (d - 1) // 2), _aut_order(d) * 2 ** (d * u))
    terms = max(1, math.ceil(-math.log2(precision)))
    val, rel = _product_tail(u, terms)
    # dropped factor lies in [exp(-rel), 1]; rounding slack for the float sum
    err = val * (1 - math.exp(-rel)) + 1e-15
    return MalleProbability(d, u, pre, CertifiedValue(val, err))


def _euler_product_constant(bound: int) -> CertifiedValue:
    primes = np.array([q for q in primes_up_to(bound) if q != 3], dtype=float)
    log = 0.0
    for j in range(2, 80):
        t = primes ** (-j)
        if t.max() == 0:
            break
        log -= float(np.log1p(t).sum())
    # sum_{q > bound} sum_{j >= 2} q^{-j} <= sum_{m > bound} 1/(m(m-1)) = 1/bound
    tail = 1.0 / bound
    val = math.exp(log)
    return CertifiedValue(val, val * (1 - math.exp(-tail)) + 1e-12)


@lru_cache(maxsize=4)
def euler_product_constants(bound: int = 2_000_000) -> dict[str, CertifiedValue]:
    """C = prod_{q != 3} prod_{j >= 2} (1 + q^{-j})^{-1} and its multiples 2/3, 3/8, 1/2."""
    c = _euler_product_constant(bound)

    def scaled(f: Fraction) -> CertifiedValue:
        return CertifiedValue(float(f) * c.value, float(f) * c.error)

    return {
        "C": c,
        "tame_h1": c,
        "wild_h1": scaled(Fraction(2, 3)),
        "tame_h2": scaled(Fraction(3, 8)),
        "wild_h2": scaled(Fraction(1, 2)),
    }


# ---------------------------------------------------------------------------
# finite abelian 2-groups
# ---------------------------------------------------------------------------

def two_torsion_rank(h: Sequence[int]) -> int:
    return sum(1 for x in h if x % 2 == 0)


def malle_moment(h: Sequence[int], u: int) -> Fraction:
    """Malle's H-moment |wedge^2 H[2]| / |H|^u for a 2-group H = prod Z/h_i."""
    r = two_torsion_rank(h)
    return Fraction(2 ** (r * (r - 1) // 2)) / Fraction(math.prod(h)) ** u


def spin_moment(h: Sequence[int], u: int) -> Fraction:
    """Hecke-unramified H-moment |H[2]| |wedge^2 H[2]| / |H|^u (over the rationals)."""
    return 2 ** two_torsion_rank(h) * malle_moment(h, u)


@lru_cache(maxsize=4096)
def count_surjections(g: tuple[int, ...], h: tuple[int, ...]) -> int:
    """#Surj(prod Z/g_i, prod Z/h_j) for 2-groups, by enumeration of generator images.

    A homomorphism onto a 2-group is surjective iff it is surjective mod 2H.
    """
    g = tuple(x for x in g if x > 1)
    h = tuple(x for x in h if x > 1)
    if not h:
        return 1
    if len(g) < len(h):
        return 0
    elements = list(itertools.product(*[range(b) for b in h]))
    choices = []
    for a in g:
        choices.append([e for e in elements if all((a * x) % b == 0 for x, b in zip(e, h))])
    target = len(h)
    count = 0
    reduced_cache: dict = {}
    for combo in itertools.product(*choices):
        key = tuple(tuple(x % 2 for x in e) for e in combo)
        if key not in reduced_cache:
            vecs = [int("".join(str(b) for b in e), 2) for e in key]
            reduced_cache[key] = f2_rank(vecs) == target
        count += reduced_cache[key]
    return count


MOMENT_GROUPS: dict[str, tuple[int, ...]] = {
    "Z/2": (2,),
    "Z/4": (4,),
    "Z/8": (8,),
    "Z/2 x Z/2": (2, 2),
    "Z/4 x Z/2": (4, 2),
    "Z/4 x Z/4": (4, 4),
    "Z/2 x Z/2 x Z/2": (2, 2, 2),
}


def prediction_table(u: int) -> list[dict]:
    """Rows (moment, predicted type I, predicted type II, Malle) for the standard groups H."""
    rows = []
    for name, h in MOMENT_GROUPS.items():
        rows.append({
            "moment": name,
            "predicted_I": spin_moment(h, u),
            "predicted_II": malle_moment(h, u),
            "malle": malle_moment(h, u),
        })
    return rows
