"""Pairs of binary cubic forms, their invariants A1 and A3, and the quartic covariant.

A pair is stored as r1..r8 in the binomial normalization

    F1 = r1 x^3 + 3 r2 x^2 y + 3 r3 x y^2 + r4 y^3,
    F2 = r5 x^3 + 3 r6 x^2 y + 3 r7 x y^2 + r8 y^3.

The group SL2 x SL2 acts by substitution in (x, y) through the first factor
and by linear combinations of (F1, F2) through the second.
"""

from __future__ import annotations

import csv
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

_BINOM = (1, 3, 3, 1)

# J_std(G) = 72ace + 9bcd - 27ad^2 - 27eb^2 - 2c^3 is the classical degree-3
# invariant of a x^4 + b x^3 y + c x^2 y^2 + d x y^3 + e y^4.  For the
# distinguished vector the covariant is 18n y^4 - 18 x^3 y, where
# J_std = -27 * 18n * 18^2 = -157464 n, so the rescaling forcing
# J(G(v_n)) = 108 n is c = 108 / -157464 = -1/1458.
J_SCALE = Fraction(-1, 1458)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BinaryCubicPair:
    r: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.r) != 8:
            raise ValueError("a pair of binary cubics has 8 coefficients")
        object.__setattr__(self, "r", tuple(Fraction(x) for x in self.r))

    @staticmethod
    def from_forms(f1: Sequence, f2: Sequence) -> BinaryCubicPair:
        """From plain coefficients (of x^3, x^2y, xy^2, y^3) of each form."""
        r = [Fraction(c) / b for c, b in zip(f1, _BINOM)] + [Fraction(c) / b for c, b in zip(f2, _BINOM)]
        return BinaryCubicPair(tuple(r))

    def forms(self) -> tuple[list[Fraction], list[Fraction]]:
        """Plain coefficients of F1 and F2."""
        f1 = [b * x for b, x in zip(_BINOM, self.r[:4])]
        f2 = [b * x for b, x in zip(_BINOM, self.r[4:])]
        return f1, f2

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.r)

    def __str__(self) -> str:
        f1, f2 = self.forms()
        return f"({_fmt_cubic(f1)}, {_fmt_cubic(f2)})"


@dataclass(frozen=True)
class BinaryQuartic:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction

    def coeffs(self) -> tuple[Fraction, ...]:
        return (self.a, self.b, self.c, self.d, self.e)

    def j_standard(self) -> Fraction:
        a, b, c, d, e = self.coeffs()
        return 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c ** 3

    def i_standard(self) -> Fraction:
        a, b, c, d, e = self.coeffs()
        return 12 * a * e - 3 * b * d + c * c


def _fmt_cubic(f: Sequence[Fraction]) -> str:
    mons = ["x^3", "x^2*y", "x*y^2", "y^3"]
    terms = [f"{c}*{m}" for c, m in zip(f, mons) if c]
    return " + ".join(terms) if terms else "0"


# polynomial helpers on homogeneous forms stored by descending x-degree
def _pmul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _dx(p: Sequence[Fraction]) -> list[Fraction]:
    n = len(p) - 1
    return [(n - i) * p[i] for i in range(n)]


def _dy(p: Sequence[Fraction]) -> list[Fraction]:
    return [i * p[i] for i in range(1, len(p))]


def a1_invariant(v: BinaryCubicPair) -> Fraction:
    r1, r2, r3, r4, r5, r6, r7, r8 = v.r
    return r1 * r8 - 3 * r2 * r7 + 3 * r3 * r6 - r4 * r5


def covariant_quartic(v: BinaryCubicPair) -> BinaryQuartic:
    """G = dF1/dx * dF2/dy - dF1/dy * dF2/dx."""
    f1, f2 = v.forms()
    left = _pmul(_dx(f1), _dy(f2))
    right = _pmul(_dy(f1), _dx(f2))
    return BinaryQuartic(*[a - b for a, b in zip(left, right)])


def j_invariant(q: BinaryQuartic) -> Fraction:
    """Degree-3 quartic invariant, normalized so that J(G(v_n)) = 108 n."""
    return J_SCALE * q.j_standard()


def a3_invariant(v: BinaryCubicPair) -> Fraction:
    return (j_invariant(covariant_quartic(v)) - a1_invariant(v) ** 3) / 108


def invariants(v: BinaryCubicPair) -> tuple[Fraction, Fraction]:
    return a1_invariant(v), a3_invariant(v)


def _substitute(f: Sequence[Fraction], g: Sequence[Sequence[int]]) -> list[Fraction]:
    """f((x, y) g) for a homogeneous form f."""
    (a, b), (c, d) = g
    # (x, y) g = (a x + c y, b x + d y)
    lx = [Fraction(a), Fraction(c)]
    ly = [Fraction(b), Fraction(d)]
    n = len(f) - 1
    out = [Fraction(0)] * (n + 1)
    for i, coef in enumerate(f):
        if not coef:
            continue
        term = [Fraction(1)]
        for _ in range(n - i):
            term = _pmul(term, lx)
        for _ in range(i):
            term = _pmul(term, ly)
        for k, t in enumerate(term):
            out[k] += coef * t
    return out


def substitute_quartic(q: BinaryQuartic, g: Sequence[Sequence[int]]) -> BinaryQuartic:
    return BinaryQuartic(*_substitute(list(q.coeffs()), g))


def _check_unimodular(g: Sequence[Sequence[int]]) -> None:
    (a, b), (c, d) = g
    if a * d - b * c != 1:
        raise ValueError(f"matrix {g} does not have determinant 1")


def act(g1: Sequence[Sequence[int]], g2: Sequence[Sequence[int]], v: BinaryCubicPair) -> BinaryCubicPair:
    """(g1, g2) . v: substitute (x, y) -> (x, y) g1, then (F1, F2) -> (a F1 + b F2, c F1 + d F2)."""
    _check_unimodular(g1)
    _check_unimodular(g2)
    f1, f2 = v.forms()
    f1 = _substitute(f1, g1)
    f2 = _substitute(f2, g1)
    (a, b), (c, d) = g2
    h1 = [a * x + b * y for x, y in zip(f1, f2)]
    h2 = [c * x + d * y for x, y in zip(f1, f2)]
    return BinaryCubicPair.from_forms(h1, h2)


def distinguished_vector(n) -> BinaryCubicPair:
    """v_n = (3 x y^2, x^3 + 2 n y^3), with A1 = 0 and A3 = n."""
    n = Fraction(n)
    if n == 0:
        raise ValueError("n must be nonzero")
    v = BinaryCubicPair.from_forms([0, 0, 3, 0], [1, 0, 0, 2 * n])
    if a1_invariant(v) != 0 or a3_invariant(v) != n:
        raise ArithmeticError("invariant normalization broken")
    return v


# ---------------------------------------------------------------------------
# small-box enumeration on A1 = 0
# ---------------------------------------------------------------------------

_S = ((0, -1), (1, 0))
_T = ((1, 1), (0, 1))
_TI = ((1, -1), (0, 1))
_ID = ((1, 0), (0, 1))
_MOVES = [(g, _ID) for g in (_S, _T, _TI)] + [(_ID, g) for g in (_S, _T, _TI)]


@dataclass
class QuadricBucket:
    a3: Fraction
    vectors: int
    orbits: int
    representatives: list[tuple[int, ...]]


def _int_pairs_on_quadric(box: int, fixed: dict[int, int]) -> Iterable[tuple[int, ...]]:
    full = range(-box, box + 1)
    ranges = [range(fixed[i], fixed[i] + 1) if i in fixed else full for i in range(2, 9)]
    r1_range = range(fixed[1], fixed[1] + 1) if 1 in fixed else full
    for r2, r3, r4, r5, r6, r7, r8 in itertools.product(*ranges):
        num = 3 * r2 * r7 - 3 * r3 * r6 + r4 * r5
        if r8:
            if num % r8 == 0 and num // r8 in r1_range:
                yield (num // r8, r2, r3, r4, r5, r6, r7, r8)
        elif num == 0:
            for r1 in r1_range:
                yield (r1, r2, r3, r4, r5, r6, r7, r8)


def _a3_integral(r: Sequence[int]) -> Fraction:
    """A3 for integral r using integer arithmetic only (same formulas as a3_invariant)."""
    f1 = [b * x for b, x in zip(_BINOM, r[:4])]
    f2 = [b * x for b, x in zip(_BINOM, r[4:])]
    left = _pmul(_dx(f1), _dy(f2))
    right = _pmul(_dy(f1), _dx(f2))
    a, b, c, d, e = [x - y for x, y in zip(left, right)]
    j_std = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c ** 3
    a1 = r[0] * r[7] - 3 * r[1] * r[6] + 3 * r[2] * r[5] - r[3] * r[4]
    return (J_SCALE * j_std - a1 ** 3) / 108


def enumerate_quadric(X: int, box: int = 2, budget: int = 2_000_000,
                      fixed: dict[int, int] | None = None) -> list[QuadricBucket]:
    """Integral pairs with |r_i| <= box, A1 = 0 and 0 < |A3| <= X, bucketed by A3.

    ``fixed`` pins coordinates (1-based index -> value) to enumerate one slice
    of the box.

    Orbits are merged by generator moves (S, T, T^-1 on either factor) that
    stay inside the box.  This is a heuristic: two vectors of one orbit whose
    connecting path leaves the box are counted separately.
    """
    if box > 12:
        raise ValueError("box must be at most 12")
    found: dict[tuple[int, ...], Fraction] = {}
    for r in _int_pairs_on_quadric(box, dict(fixed or {})):
        a3 = _a3_integral(r)
        if a3 != 0 and abs(a3) <= X:
            found[r] = a3
            if len(found) > budget:
                raise BudgetExceeded(f"more than {budget} vectors in the box")
    parent = {r: r for r in found}

    def root(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    for r, a3 in found.items():
        v = BinaryCubicPair(r)
        for g1, g2 in _MOVES:
            w = act(g1, g2, v)
            key = tuple(int(x) for x in w.r) if w.is_integral() else None
            if key in found:
                if found[key] != a3 or a1_invariant(w) != 0:
                    raise ArithmeticError("a move changed the invariants")
                ra, rb = root(r), root(key)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    buckets: dict[Fraction, QuadricBucket] = {}
    for r, a3 in sorted(found.items()):
        b = buckets.setdefault(a3, QuadricBucket(a3, 0, 0, []))
        b.vectors += 1
        if root(r) == r:
            b.orbits += 1
            b.representatives.append(r)
    return [buckets[k] for k in sorted(buckets)]


def write_buckets_csv(path, buckets: Sequence[QuadricBucket]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["A3", "vectors", "orbits_heuristic", "representative"])
        for b in buckets:
            rep = " ".join(str(x) for x in b.representatives[0]) if b.representatives else ""
            w.writerow([str(b.a3), b.vectors, b.orbits, rep])
