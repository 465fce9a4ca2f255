"""Local analysis of Kummer algebras Q_p[x]/(x^m - n) for odd primes m.

Splitting types come from finite data only: factorization over F_p when p does
not divide mn, Eisenstein normalizations when it does, and an m-th power test
in Z_p at p = m.  The quadratic refinement test builds the rational Gram
matrix of (1/m) Tr(t x^2) for a global element t whose localization at p is a
prescribed unramified class, then asks whether that form is split at p.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import polyfp
from .arith import (
    REAL,
    Place,
    as_place,
    diagonalize,
    is_prime,
    is_split_odd_rank,
    legendre,
    rational_det,
    squarefree_part,
    valuation,
)
from .linalg import int_det


class UnsupportedRamification(ValueError):
    """Raised for ramification patterns the local theory here does not cover."""


class LocalObstructionInconsistency(AssertionError):
    """The Hasse-Witt computation disagrees with the ramification classification."""


@dataclass(frozen=True)
class SplittingData:
    """Components (e, f, d) of an etale algebra over Q_p of odd degree.

    ``d`` is the exponent of the different at that component.
    """

    p: int
    components: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(tuple(c) for c in self.components))
        for e, f, d in self.components:
            if e < 1 or f < 1 or d < e - 1:
                raise ValueError(f"invalid component {(e, f, d)}")
            if d == e - 1 and e % self.p == 0:
                raise ValueError("wild component must have d >= e")

    @property
    def degree(self) -> int:
        return sum(e * f for e, f, _ in self.components)

    @property
    def N(self) -> int:
        return len(self.components)

    @property
    def d_total(self) -> int:
        """Exponent of p in the discriminant."""
        return sum(d * f for _, f, d in self.components)

    @property
    def hecke_exponents(self) -> tuple[int, ...]:
        dt = self.d_total
        return tuple(dt * e - d for e, _, d in self.components)

    def is_tame(self, i: int) -> bool:
        e, _, d = self.components[i]
        return d == e - 1

    def ef(self) -> list[tuple[int, int]]:
        return [(e, f) for e, f, _ in self.components]


@dataclass(frozen=True)
class LocalHeckeReport:
    is_hecke_ramified: bool
    hecke_components: tuple[int, ...]
    local_condition_dim: int


def _check_odd_prime(m: int) -> None:
    if m % 2 == 0 or not is_prime(m):
        raise ValueError(f"degree m = {m} must be an odd prime")


def normalize_radicand(n: int, m: int, p: int) -> int:
    """Divide out p^(m k) so that 0 <= v_p(n) < m."""
    if n == 0:
        raise ValueError("radicand must be nonzero")
    v = valuation(n, p)
    return n // p ** (m * (v // m))


def is_mth_power_unit(n: int, m: int, p: int) -> bool:
    """Whether the p-adic unit n is an m-th power in Z_p (p = m odd).

    Solvability of y^m = n mod p^(2 v_p(m) + 1) decides it; for p = m this is
    n^(p-1) = 1 mod p^2.
    """
    if n % p == 0:
        raise ValueError("n must be a p-adic unit")
    if p != m:
        k = 1
        return any(pow(y, m, p**k) == n % p**k for y in range(1, p**k))
    return pow(n, p - 1, p * p) == 1


def is_mth_power_unit_bruteforce(n: int, m: int, p: int) -> bool:
    """Same question, by searching y mod p^(2 v_p(m) + 1) directly (small p only)."""
    k = 2 * valuation(m, p) + 1 if m % p == 0 else 1
    mod = p**k
    return any(pow(y, m, mod) == n % mod for y in range(mod) if y % p)


def kummer_splitting(n: int, m: int, p: int) -> SplittingData:
    """Splitting of Q_p[x]/(x^m - n) with different exponents."""
    _check_odd_prime(m)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = normalize_radicand(n, m, p)
    v = valuation(n, p)
    if v:
        # Eisenstein after replacing x by x^a / p^b with a v - b m = 1
        if p != m:
            return SplittingData(p, ((m, 1, m - 1),))
        return SplittingData(p, ((m, 1, 2 * m - 1),))
    if p != m:
        fac = polyfp.factor_mod_p([-n] + [0] * (m - 1) + [1], p)
        comps = sorted(((1, len(g) - 1, 0) for g, _ in fac), key=lambda c: c[1])
        return SplittingData(p, tuple(comps))
    if not is_mth_power_unit(n, m, p):
        # x -> x + n gives an Eisenstein polynomial; d = v(f'(alpha)) = v(m) = m
        return SplittingData(p, ((m, 1, m),))
    # Q_p x Q_p(zeta_p): the second factor is totally and tamely ramified
    return SplittingData(p, ((1, 1, 0), (m - 1, 1, m - 2)))


def hecke_components(components: Sequence[tuple[int, int, int]]) -> tuple[int, ...]:
    """Indices of components that are Hecke primes.

    A component qualifies when its Hecke exponent is odd and some unramified
    class in V is nontrivial there, which fails exactly when every other
    component has even ramification index.
    """
    s = components
    dt = sum(d * f for _, f, d in s)
    out = []
    for i, (e, f, d) in enumerate(s):
        h = dt * e - d
        if h % 2 == 0:
            continue
        others = [s[j][0] for j in range(len(s)) if j != i]
        if others and any(ej % 2 for ej in others):
            out.append(i)
    return tuple(out)


def local_hecke_classify(s: SplittingData, m: int | None = None) -> LocalHeckeReport:
    if m is not None and s.degree != m:
        raise ValueError("degree mismatch")
    comps = hecke_components(s.components)
    ramified = any(h % 2 for h in s.hecke_exponents)
    if ramified != bool(comps):
        raise AssertionError(f"Hecke ramified but no Hecke prime for {s}")
    return LocalHeckeReport(bool(comps), comps, s.N - 1)


# ---------------------------------------------------------------------------
# the local refinement obstruction
# ---------------------------------------------------------------------------

class KummerAlgebra:
    """Q[x]/(x^m - n) with elements as coefficient lists of length m."""

    def __init__(self, n: int, m: int):
        self.n, self.m = n, m

    def mul(self, a: Sequence, b: Sequence) -> list[Fraction]:
        m, n = self.m, self.n
        out = [Fraction(0)] * m
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        k = i + j
                        if k >= m:
                            out[k - m] += x * y * n
                        else:
                            out[k] += x * y
        return out

    def trace(self, a: Sequence) -> Fraction:
        return self.m * Fraction(a[0])

    def norm(self, a: Sequence) -> Fraction:
        rows = []
        xi = [Fraction(0)] * self.m
        for i in range(self.m):
            xi = [Fraction(int(j == i)) for j in range(self.m)]
            rows.append(self.mul(a, xi))
        return rational_det(rows)

    def trace_gram(self, t: Sequence) -> list[list[Fraction]]:
        """Gram matrix of (1/m) Tr(t x y) on the power basis."""
        m, n = self.m, self.n
        g = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for j in range(m):
                acc = Fraction(0)
                for k, tk in enumerate(t):
                    s = i + j + k
                    if tk and s % m == 0:
                        acc += tk * Fraction(n) ** (s // m)
                g[i][j] = acc
        return g


def _nonsquare_in_residue_field(g: list[int], p: int) -> list[int]:
    f = len(g) - 1
    q = p**f
    for z in _residues(f, p):
        if polyfp.powmod(z, (q - 1) // 2, g, p) == [p - 1]:
            return z
    raise RuntimeError("no nonsquare found")


def _residues(f: int, p: int):
    """Nonzero polynomials of degree < f, in base-p counting order."""
    for k in range(1, p**f):
        z = []
        while k:
            z.append(k % p)
            k //= p
        yield z


def _trace_one_element(g: list[int]) -> list[int]:
    f = len(g) - 1
    for z in _residues(f, 2):
        t, b = list(z), list(z)
        for _ in range(f - 1):
            b = polyfp.powmod(b, 2, g, 2)
            t = polyfp.add(t, b, 2)
        t = polyfp.mod(t, g, 2)
        if t == [1]:
            return z
    raise RuntimeError("no trace-one element found")


def _crt_idempotents(factors: list[list[int]], modulus: int, F: list[int], p: int) -> list[list[int]]:
    out = []
    for i, g in enumerate(factors):
        others = [1]
        for j, h in enumerate(factors):
            if j != i:
                others = polyfp.mul(others, h, modulus)
        a = polyfp.mod(others, g, modulus)
        _, s, _ = polyfp.xgcd(polyfp.trim(a, p), polyfp.trim(g, p), p)
        u = s
        mod = p
        while mod < modulus:
            mod = min(mod * mod, modulus)
            au = polyfp.mod(polyfp.mul(a, u, mod), g, mod)
            u = polyfp.mod(polyfp.mul(u, polyfp.sub([2], au, mod), mod), g, mod)
        out.append(polyfp.mod(polyfp.mul(others, u, modulus), F, modulus))
    return out


def _unramified_classes(n: int, m: int, p: int) -> list[tuple[frozenset, list[Fraction]]]:
    """Global representatives of every class in V for p not dividing mn."""
    k = 3 if p == 2 else 1
    modulus = p**k
    F = polyfp.trim([-n] + [0] * (m - 1) + [1], modulus)
    fac = [g for g, _ in polyfp.factor_mod_p(F, p)]
    lifted = polyfp.hensel_lift(F, fac, p, k)
    idem = _crt_idempotents(lifted, modulus, F, p)
    eps = []
    for g, G in zip(fac, lifted):
        if p == 2:
            delta = _trace_one_element(g)
            eps.append(polyfp.add([1], polyfp.scale(delta, 4, 8), 8))
        else:
            eps.append(_nonsquare_in_residue_field(g, p))
    out = []
    N = len(fac)
    for r in range(2, N + 1, 2):  # every component has e = 1, so |S| must be even
        for S in itertools.combinations(range(N), r):
            t: list[int] = []
            for i in range(N):
                c = eps[i] if i in S else [1]
                t = polyfp.add(t, polyfp.mul(c, idem[i], modulus), modulus)
            t = polyfp.mod(t, F, modulus)
            coeffs = [Fraction(t[i] if i < len(t) else 0) for i in range(m)]
            out.append((frozenset(S), coeffs))
    return out


def _pth_root_approx(n: int, p: int, k: int) -> int:
    """y with y^p = n mod p^(k+1), for a unit n that is a p-th power in Z_p."""
    y = n % p
    for j in range(1, k):
        mod = p ** (j + 2)
        for a in range(p):
            cand = y + a * p**j
            if pow(cand, p, mod) == n % mod:
                y = cand
                break
        else:
            raise ValueError("n is not a p-th power")
    return y


def _tame_class(n: int, m: int, p: int, k: int = 6) -> list[Fraction]:
    """t = c + (1 - c) e where e approximates the idempotent of the Q_p factor."""
    y = _pth_root_approx(n, p, k)
    c = next(a for a in range(2, p) if legendre(a, p) == -1)
    # Phi(x) = (x^m - y^m)/(x - y) = sum x^(m-1-i) y^i
    denom = Fraction(m * y ** (m - 1))
    e = [Fraction(y ** (m - 1 - i)) / denom for i in range(m)]
    t = [(1 - c) * x for x in e]
    t[0] += c
    return t


@dataclass(frozen=True)
class ObstructionResult:
    status: str  # "kernel", "obstructed", "trivial_space"
    splitting: SplittingData
    classes_checked: int
    classes_in_kernel: int  # counting the trivial class


def evaluate_class(alg: KummerAlgebra, t: Sequence[Fraction], v: Place | int) -> bool:
    """Whether the form (1/m) Tr(t x^2) is split at v."""
    one = [Fraction(1)] + [Fraction(0)] * (alg.m - 1)
    disc = rational_det(alg.trace_gram(one))
    form = diagonalize(alg.trace_gram(t))
    return is_split_odd_rank(form, alg.norm(t), disc, v)


@lru_cache(maxsize=1 << 14)
def local_refinement_obstruction(n: int, m: int, p: int) -> ObstructionResult:
    """Is the unramified local space V inside the kernel of q at p?

    Every nonzero class of V is realized globally and tested; the answer must
    match the Hecke classification of the splitting type.
    """
    _check_odd_prime(m)
    n = normalize_radicand(n, m, p)
    s = kummer_splitting(n, m, p)
    report = local_hecke_classify(s, m)
    if s.N == 1:
        if report.is_hecke_ramified:
            raise LocalObstructionInconsistency(f"field extension reported Hecke ramified: {s}")
        return ObstructionResult("trivial_space", s, 1, 1)
    alg = KummerAlgebra(n, m)
    if p == m:
        e_ram = s.components[1][0]
        if e_ram not in (1, m - 1):
            raise UnsupportedRamification(f"e = {e_ram} not in {{1, m-1}}")
        classes = [_tame_class(n, m, p)]
    else:
        classes = [t for _, t in _unramified_classes(n, m, p)]
    in_kernel = 1 + sum(1 for t in classes if evaluate_class(alg, t, p))
    total = 1 + len(classes)
    if total != 2 ** (s.N - 1):
        raise AssertionError(f"|V| = {total}, expected {2 ** (s.N - 1)}")
    status = "kernel" if in_kernel == total else "obstructed"
    if (status == "obstructed") != report.is_hecke_ramified:
        raise LocalObstructionInconsistency(
            f"n={n}, m={m}, p={p}: HW gives {status}, classification gives "
            f"hecke_ramified={report.is_hecke_ramified}")
    return ObstructionResult(status, s, total, in_kernel)


# ---------------------------------------------------------------------------
# densities and predicted averages
# ---------------------------------------------------------------------------

FAMILIES = ("wild_cubic", "tame_cubic", "all_cubic")


def _in_family(n: int, family: str, p: int) -> bool:
    v = valuation(n, p)
    if v >= 3:
        return False
    if p != 3:
        return True
    tame = v == 0 and n % 9 in (1, 8)
    if family == "tame_cubic":
        return tame
    if family == "wild_cubic":
        return not tame
    return True


def default_depth(p: int, m: int = 3) -> int:
    return 2 * valuation(3 * m, p) + 3


def local_density_nu(p: Place | int | str, family: str, k: int | None = None,
                     base: str = "Q") -> Fraction:
    """Average of |V ∩ ker q| / |M(Q_p)| over the family's residues n mod p^k.

    The archimedean value is returned by convention: 1/2 over Q and 1/4 over
    an imaginary quadratic base.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    v = as_place(p)
    if not v.is_finite:
        return Fraction(1, 2) if base == "Q" else Fraction(1, 4)
    p = v.p
    if k is None:
        k = default_depth(p)
    total = Fraction(0)
    weight = Fraction(0)
    if p != 3:
        # splitting depends only on v_p(n) and n/p^v mod p; weight each class by its measure
        for val in range(3):
            for u in range(1, p):
                n = p**val * u
                w = Fraction(1, p ** (val + 1))
                r = local_refinement_obstruction(n, 3, p)
                total += w * Fraction(r.classes_in_kernel, r.classes_checked)
                weight += w
        return total / weight
    mod = p**k
    count = 0
    for n in range(1, mod):
        if not _in_family(n, family, p):
            continue
        r = local_refinement_obstruction(n, 3, p)
        total += Fraction(r.classes_in_kernel, r.classes_checked)
        count += 1
    return total / count


PREDICTION_BASES = ("Q", "imaginary_quadratic")


def predicted_average(base: str, family: str) -> Fraction:
    """1 + 2 prod_v nu_v for the family of pure cubic extensions of ``base``.

    family is "wild" or "tame"; ``base`` is "Q" or "imaginary_quadratic"
    (class number one, 3 inert).
    """
    if base not in PREDICTION_BASES:
        raise ValueError(f"unknown base field tag {base!r}")
    fam = {"wild": "wild_cubic", "tame": "tame_cubic"}.get(family)
    if fam is None:
        raise ValueError(f"unknown family tag {family!r}")
    nu = local_density_nu(REAL, fam, base=base) * local_density_nu(3, fam)
    for p in (2, 5, 7):
        nu *= local_density_nu(p, fam)
    return 1 + 2 * nu


# ---------------------------------------------------------------------------
# cyclotomic Kummer generator
# ---------------------------------------------------------------------------

def poly_discriminant(f: Sequence[int]) -> int:
    """Discriminant of an integer polynomial (coefficients lowest degree first)."""
    n = len(f) - 1
    df = [i * f[i] for i in range(1, n + 1)]
    res = resultant(f, df)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    lead = f[-1]
    q, r = divmod(sign * res, lead)
    if r:
        raise ArithmeticError("non-integral discriminant")
    return q


def resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant via the Sylvester matrix."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    fr, gr = list(reversed(f)), list(reversed(g))
    for i in range(n):
        rows.append([0] * i + fr + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gr + [0] * (size - n - 1 - i))
    return int_det(rows)


def cyclotomic_radicand_class(p: int) -> int:
    """Square class of b with Q(zeta_p) = Q(b^(1/(p-1))), from discriminants.

    disc(x^k - b) = b^(k-1) disc(x^k - 1) with k - 1 odd, so the class of b is
    that of disc(Phi_p) * disc(x^k - 1).
    """
    k = p - 1
    phi = [1] * p
    d_phi = poly_discriminant(phi)
    d_unit = poly_discriminant([-1] + [0] * (k - 1) + [1])
    return squarefree_part(d_phi * d_unit)
