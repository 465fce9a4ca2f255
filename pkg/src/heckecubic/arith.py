"""Exact integer and rational arithmetic, local symbols and quadratic form invariants.

Everything here works on Python ints and ``fractions.Fraction``.  Places of
the rationals are small frozen dataclasses; Hilbert symbols use the classical
closed forms (unit/valuation formulas), the brute-force congruence search lives
in the test-suite only.
"""

from __future__ import annotations

import math
import random
import threading
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

Rational = int | Fraction

# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
TRIAL_LIMIT = 10**4
PROVEN_LIMIT = 2**64


# ---------------------------------------------------------------------------
# primes and factorization
# ---------------------------------------------------------------------------

def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


_SMALL_PRIMES = primes_up_to(TRIAL_LIMIT)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic (40 bases) above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        bases: Iterable[int] = _MR_BASES
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(40)]
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def _pollard_brent(n: int, budget: int, seed: int) -> int | None:
    """Return a nontrivial factor of the composite n, or None if the budget runs out."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    spent = 0
    while spent < budget:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            spent += r
            if spent > budget:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


@dataclass(frozen=True)
class FactoredInteger:
    """sign * prod(p**e) * cofactor.

    ``cofactor`` is 1 unless factoring gave up; it is then a composite that
    could not be split within the budget.  ``probable`` lists primes above
    2**64 whose primality rests on random Miller-Rabin bases.
    """

    sign: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1
    probable: tuple[int, ...] = ()

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def proven(self) -> bool:
        return self.cofactor == 1 and not self.probable

    def value(self) -> int:
        out = self.sign * self.cofactor
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


_factor_lock = threading.Lock()


@lru_cache(maxsize=1 << 16)
def _factor_positive(n: int, budget: int) -> tuple[tuple[tuple[int, int], ...], int, tuple[int, ...]]:
    found: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    stuck: list[int] = []
    probable: set[int] = set()
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            if m >= PROVEN_LIMIT and m >= _MR_DETERMINISTIC_LIMIT:
                probable.add(m)
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m, budget, seed=m % 1_000_003)
        if d is None:
            stuck.append(m)
        else:
            stack += [d, m // d]
    cofactor = math.prod(stuck)
    return tuple(sorted(found.items())), cofactor, tuple(sorted(probable))


def factor(n: int, budget: int = 1 << 22) -> FactoredInteger:
    """Prime factorization of a nonzero integer.

    Trial division by the primes below 10**4, then Brent's variant of Pollard
    rho.  A cofactor that resists ``budget`` rho iterations is returned
    unfactored in ``FactoredInteger.cofactor`` instead of being guessed at.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    n = int(n)
    with _factor_lock:
        factors, cofactor, probable = _factor_positive(abs(n), budget)
    return FactoredInteger(1 if n > 0 else -1, factors, cofactor, probable)


def factor_rational(x: Rational) -> dict[int, int]:
    """Prime exponents of a nonzero rational (negative for the denominator)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("cannot factor 0")
    out = dict(factor(x.numerator).factors)
    for p, e in factor(x.denominator).factors:
        out[p] = out.get(p, 0) - e
    return out


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    return _vp(x.numerator, p) - _vp(x.denominator, p)


def _vp(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def split_valuation(x: Rational, p: int) -> tuple[int, Fraction]:
    """Write x = p**v * u with u a p-adic unit; returns (v, u)."""
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, Fraction(num, den)


def squarefree_part(x: Rational) -> int:
    """Canonical representative of the square class of x: a squarefree integer."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("0 has no square class")
    n = x.numerator * x.denominator
    out = 1 if n > 0 else -1
    for p, e in factor(n).factors:
        if e % 2:
            out *= p
    fi = factor(n)
    if fi.cofactor != 1:
        raise ArithmeticError(f"could not factor {n} to normalize its square class")
    return out


def is_square(x: Rational) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    return math.isqrt(x.numerator) ** 2 == x.numerator and math.isqrt(x.denominator) ** 2 == x.denominator


def is_power_free(n: int, k: int) -> bool:
    """True if no prime power p**k divides n (n != 0)."""
    return all(e < k for _, e in factor(n).factors)


def is_cubefree(n: int) -> bool:
    return is_power_free(n, 3)


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        g = math.gcd(m, mi)
        if (r - x) % g:
            raise ValueError("incompatible congruences")
        t = ((r - x) // g) * pow(m // g, -1, mi // g) % (mi // g)
        x += m * t
        m = m // g * mi
        x %= m
    return x


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n), extending the Jacobi and Legendre symbols."""
    if n == 0:
        raise ValueError("kronecker symbol needs n != 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a/n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    return kronecker_symbol(a, p)


@dataclass(frozen=True, order=True)
class Place:
    """A place of the rationals: a prime p, or the real (or complex) place."""

    kind: str  # "finite", "real", "complex"
    p: int = 0

    def __post_init__(self):
        if self.kind == "finite":
            if self.p < 2:
                raise ValueError("finite place needs a prime")
        elif self.kind not in ("real", "complex"):
            raise ValueError(f"unknown place kind {self.kind!r}")

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self) -> str:
        return str(self.p) if self.kind == "finite" else self.kind


REAL = Place("real")
COMPLEX = Place("complex")


def finite(p: int) -> Place:
    return Place("finite", p)


def as_place(v: Place | int | str) -> Place:
    if isinstance(v, Place):
        return v
    if v in ("inf", "real", "oo"):
        return REAL
    return finite(int(v))


def hilbert_symbol(a: Rational, b: Rational, v: Place | int | str) -> int:
    """Hilbert symbol (a, b)_v in {+1, -1}.

    +1 exactly when z^2 = a x^2 + b y^2 has a nontrivial solution in the
    completion at v.
    """
    v = as_place(v)
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of 0")
    if v.kind == "complex":
        return 1
    if v.kind == "real":
        return -1 if (a < 0 and b < 0) else 1
    p = v.p
    alpha, u = split_valuation(a, p)
    beta, w = split_valuation(b, p)
    if p == 2:
        # units mod 8 via numerator * denominator (denominator is an odd unit)
        u8 = (u.numerator * u.denominator) % 8
        w8 = (w.numerator * w.denominator) % 8
        eps_u, eps_w = ((u8 - 1) // 2) % 2, ((w8 - 1) // 2) % 2
        om_u, om_w = ((u8 * u8 - 1) // 8) % 2, ((w8 * w8 - 1) // 8) % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
        return -1 if e % 2 else 1
    us = u.numerator * u.denominator
    ws = w.numerator * w.denominator
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre(us, p)
    if alpha % 2:
        sign *= legendre(ws, p)
    return sign


def relevant_places(*xs: Rational) -> list[Place]:
    """Places where Hilbert symbols of the given rationals can be nontrivial."""
    primes = {2}
    for x in xs:
        x = Fraction(x)
        for n in (x.numerator, x.denominator):
            fi = factor(n)
            if fi.cofactor != 1:
                raise ArithmeticError(f"could not factor {n}")
            primes.update(fi.primes())
    return [REAL] + [finite(p) for p in sorted(primes)]


class HilbertReciprocityError(AssertionError):
    pass


def hilbert_product_check(a: Rational, b: Rational) -> list[Place]:
    """Check the product formula for (a, b); return the places where the symbol is -1."""
    bad = [v for v in relevant_places(a, b) if hilbert_symbol(a, b, v) == -1]
    if len(bad) % 2:
        raise HilbertReciprocityError(f"product formula fails for ({a}, {b}) at {bad}")
    return bad


# ---------------------------------------------------------------------------
# quadratic forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagonalForm:
    """Diagonal rational quadratic form <a_1, ..., a_r>, all a_i nonzero."""

    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(Fraction(a) for a in self.entries))
        if any(a == 0 for a in self.entries):
            raise ValueError("diagonal form with a zero entry")

    @property
    def rank(self) -> int:
        return len(self.entries)

    def det(self) -> Fraction:
        return math.prod(self.entries, start=Fraction(1))

    def signature(self) -> tuple[int, int]:
        pos = sum(1 for a in self.entries if a > 0)
        return pos, self.rank - pos

    def square_classes(self) -> tuple[int, ...]:
        return tuple(squarefree_part(a) for a in self.entries)


class SingularFormError(ValueError):
    def __init__(self, rank: int, size: int):
        super().__init__(f"degenerate Gram matrix: rank {rank} < {size}")
        self.rank = rank
        self.size = size


def diagonalize(gram: Sequence[Sequence[Rational]]) -> DiagonalForm:
    """Diagonalize a nondegenerate symmetric rational matrix by congruence.

    Pivot rule: the first nonzero diagonal entry; if the remaining diagonal
    vanishes, row and column j are added to row and column i for the first
    nonzero off-diagonal entry (i, j).
    """
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("Gram matrix must be square")
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("Gram matrix must be symmetric")
    out: list[Fraction] = []
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in idx for j in idx if j != i and a[i][j] != 0), None)
            if pair is None:
                raise SingularFormError(n - len(idx), n)
            i, j = pair
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        rest = [i for i in idx if i != piv]
        row = a[piv]
        for i in rest:
            c = a[i][piv] / d
            if c:
                ai = a[i]
                for k in rest:
                    ai[k] -= c * row[k]
        for i in rest:
            a[i][piv] = a[piv][i] = Fraction(0)
        out.append(d)
        idx = rest
    return DiagonalForm(tuple(out))


def hasse_witt(f: DiagonalForm, v: Place | int | str) -> int:
    """prod_{i<j} (a_i, a_j)_v."""
    v = as_place(v)
    out = 1
    prefix = Fraction(1)
    for k, a in enumerate(f.entries):
        if k:
            out *= hilbert_symbol(prefix, a, v)
        prefix *= a
    return out


def is_isotropic_rank3(a: Rational, b: Rational, c: Rational, v: Place | int | str) -> bool:
    """a x^2 + b y^2 + c z^2 is isotropic at v iff (-ac, -bc)_v = 1."""
    if Fraction(a) * b * c == 0:
        raise ValueError("degenerate ternary form")
    return hilbert_symbol(-Fraction(a) * c, -Fraction(b) * c, v) == 1


def split_hasse_witt(rank: int, det: Rational, v: Place | int | str) -> int:
    """Hasse-Witt invariant of the split form <(-1)^g d> + g*H of odd rank 2g+1."""
    if rank % 2 == 0:
        raise ValueError("split criterion needs odd rank")
    g = rank // 2
    return hilbert_symbol((-1) ** (g * (g + 1) // 2) * Fraction(det) ** g, -1, v)


def is_split_odd_rank(f: DiagonalForm, norm_class: Rational, disc_class: Rational,
                      v: Place | int | str) -> bool:
    """Whether an odd-rank form is split (has a maximal isotropic subspace) at v.

    ``norm_class * disc_class`` must be the determinant class of f, as for the
    trace forms Tr(t x^2) with norm_class = N(t) and disc_class the
    determinant of Tr(x^2).  At finite places f is split iff its Hasse-Witt
    invariant equals ((-1)^{g(g+1)/2} (N(t) disc)^g, -1)_v; at the real place
    the signature decides.
    """
    v = as_place(v)
    if f.rank % 2 == 0:
        raise ValueError("is_split_odd_rank needs odd rank")
    if v.kind == "complex":
        return True
    if v.kind == "real":
        pos, neg = f.signature()
        return abs(pos - neg) == 1
    return hasse_witt(f, v) == split_hasse_witt(f.rank, Fraction(norm_class) * Fraction(disc_class), v)


def rational_det(m: Sequence[Sequence[Rational]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


__all__ = [
    "COMPLEX",
    "REAL",
    "DiagonalForm",
    "FactoredInteger",
    "HilbertReciprocityError",
    "Place",
    "SingularFormError",
    "as_place",
    "crt",
    "diagonalize",
    "factor",
    "factor_rational",
    "finite",
    "hasse_witt",
    "hilbert_product_check",
    "hilbert_symbol",
    "is_cubefree",
    "is_isotropic_rank3",
    "is_power_free",
    "is_prime",
    "is_split_odd_rank",
    "is_square",
    "kronecker_symbol",
    "legendre",
    "next_prime",
    "primes_up_to",
    "rational_det",
    "relevant_places",
    "split_hasse_witt",
    "split_valuation",
    "squarefree_part",
    "valuation",
]
