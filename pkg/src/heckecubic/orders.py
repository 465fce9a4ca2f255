"""Maximal orders of cubic fields, ideals, prime decomposition and Hecke ideals.

An order is a Z-lattice in Q(theta) with basis w_0 = 1, w_1, w_2 stored as
rational rows over the power basis (1, theta, theta^2).  Elements of the
order are integer coordinate vectors; ideals are integer HNF matrices over
the order basis with a positive denominator.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import mpmath

from . import linalg
from .arith import factor, squarefree_part, valuation
from .linalg import det3, hnf_square, rat_inverse
from .local_kummer import SplittingData, hecke_components, poly_discriminant

Vec = list[int]

JSON_SCHEMA_VERSION = 1


class ReducibleError(ValueError):
    def __init__(self, f, root):
        super().__init__(f"polynomial {f} is reducible: root {root}")
        self.root = root


def _poly_mulmod(a: Sequence, b: Sequence, f: Sequence) -> list:
    """Product of two elements of Q[x]/(f) for monic cubic f, coefficient lists of length 3."""
    prod = [0] * 5
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for k in (4, 3):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(3):
                prod[k - 3 + j] -= c * f[j]
    return prod[:3]


def _integer_root(f: Sequence[int]) -> int | None:
    roots = mpmath.polyroots([f[3], f[2], f[1], f[0]], maxsteps=200, extraprec=200)
    for r in roots:
        if abs(mpmath.im(r)) < 1e-6:
            k = int(mpmath.nint(mpmath.re(r)))
            for c in (k - 1, k, k + 1):
                if f[0] + f[1] * c + f[2] * c * c + c**3 == 0:
                    return c
    return None


@dataclass(frozen=True)
class PrimeIdeal:
    """A nonzero prime of a cubic order."""

    p: int
    e: int
    f: int
    hnf: tuple[tuple[int, ...], ...]
    beta: tuple[int, ...]  # beta * P in pO, beta not in pO
    label: str = ""

    @property
    def norm(self) -> int:
        return self.p**self.f

    def __repr__(self) -> str:
        return f"PrimeIdeal({self.label or self.p}, e={self.e}, f={self.f})"

    def __hash__(self) -> int:
        return hash((self.p, self.hnf))

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeIdeal) and self.p == other.p and self.hnf == other.hnf


class NumberFieldOrder:
    """An order in a cubic field given by basis rows over the power basis."""

    def __init__(self, f: Sequence[int], basis: Sequence[Sequence[Fraction]]):
        f = tuple(int(c) for c in f)
        if len(f) != 4 or f[3] != 1:
            raise ValueError("need a monic cubic, coefficients lowest degree first")
        self.f = f
        self.basis = tuple(tuple(Fraction(x) for x in row) for row in basis)
        self.basis_inv = rat_inverse(self.basis)
        self.mult = self._mult_table()
        # nonzero structure constants for fast multiplication
        self._terms = [(i, j, k, self.mult[i][j][k]) for i in range(3) for j in range(3)
                       for k in range(3) if self.mult[i][j][k]]
        self.traces = tuple(self._trace_basis(i) for i in range(3))
        self.trace_matrix = tuple(tuple(sum(self.mult[i][j][k] * self.traces[k] for k in range(3))
                                        for j in range(3)) for i in range(3))
        self.disc = det3(self.trace_matrix)
        self._prime_cache: dict[int, list[PrimeIdeal]] = {}

    # -- construction helpers ------------------------------------------------
    def _to_coords(self, power: Sequence) -> list[Fraction]:
        return [sum(Fraction(power[j]) * self.basis_inv[j][i] for j in range(3)) for i in range(3)]

    def _mult_table(self):
        table = []
        for i in range(3):
            row = []
            for j in range(3):
                prod = _poly_mulmod(self.basis[i], self.basis[j], self.f)
                c = self._to_coords(prod)
                if any(x.denominator != 1 for x in c):
                    raise ValueError("basis does not span a ring")
                row.append(tuple(int(x) for x in c))
            table.append(tuple(row))
        return tuple(table)

    def _trace_basis(self, i: int) -> int:
        # trace of w_i as the trace of its multiplication matrix
        return sum(self.mult[i][j][j] for j in range(3))

    # -- basic invariants ----------------------------------------------------
    @cached_property
    def poly_disc(self) -> int:
        return poly_discriminant(list(self.f))

    @cached_property
    def index(self) -> int:
        q, r = divmod(self.poly_disc, self.disc)
        root = math.isqrt(q)
        if r or root * root != q:
            raise ArithmeticError("disc(f)/disc(O) is not a square")
        return root

    @cached_property
    def signature(self) -> tuple[int, int]:
        return (3, 0) if self.poly_disc > 0 else (1, 1)

    @property
    def unit_rank(self) -> int:
        r1, r2 = self.signature
        return r1 + r2 - 1

    def one(self) -> Vec:
        return [1, 0, 0]

    def from_int(self, a: int) -> Vec:
        return [a, 0, 0]

    def theta(self) -> Vec:
        c = self._to_coords([0, 1, 0])
        return [int(x) for x in c]

    def from_power(self, power: Sequence) -> list[Fraction]:
        return self._to_coords(power)

    def to_power(self, x: Sequence) -> list[Fraction]:
        return [sum(Fraction(x[i]) * self.basis[i][j] for i in range(3)) for j in range(3)]

    # -- element arithmetic --------------------------------------------------
    def mul(self, a: Sequence, b: Sequence) -> list:
        out = [0, 0, 0]
        for i, j, k, c in self._terms:
            ai = a[i]
            if ai:
                bj = b[j]
                if bj:
                    out[k] += c * ai * bj
        return out

    def mul_mod(self, a: Sequence[int], b: Sequence[int], m: int) -> Vec:
        return [x % m for x in self.mul(a, b)]

    def pow_mod(self, a: Sequence[int], e: int, m: int) -> Vec:
        result = [1 % m, 0, 0]
        base = [x % m for x in a]
        while e:
            if e & 1:
                result = self.mul_mod(result, base, m)
            base = self.mul_mod(base, base, m)
            e >>= 1
        return result

    def mult_matrix(self, a: Sequence) -> list[list]:
        """Row i holds the coordinates of w_i * a."""
        return [self.mul([int(i == k) for k in range(3)], a) for i in range(3)]

    def norm(self, a: Sequence) -> Fraction | int:
        m = self.mult_matrix(a)
        if all(isinstance(x, int) for row in m for x in row):
            return det3(m)
        return Fraction(det3([[Fraction(x) for x in row] for row in m]))

    def trace(self, a: Sequence) -> int | Fraction:
        return sum(a[i] * self.traces[i] for i in range(3))

    def inverse(self, a: Sequence) -> list[Fraction]:
        m = rat_inverse(self.mult_matrix(a))
        return list(m[0])  # 1 * a^{-1}, since w_0 = 1

    @cached_property
    def norm_form(self) -> dict[tuple[int, int, int], int]:
        """Coefficients of N(x0 w0 + x1 w1 + x2 w2) as a ternary cubic form."""
        mats = [self.mult_matrix([int(i == k) for k in range(3)]) for i in range(3)]
        coeffs: dict[tuple[int, int, int], int] = {}
        # expand det(sum x_i M_i) by multilinearity over column choices
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    m = [mats[a][0], mats[b][1], mats[c][2]]
                    d = det3(m)
                    if d:
                        key = [0, 0, 0]
                        key[a] += 1
                        key[b] += 1
                        key[c] += 1
                        coeffs[tuple(key)] = coeffs.get(tuple(key), 0) + d
        return {k: v for k, v in coeffs.items() if v}

    # -- embeddings ----------------------------------------------------------
    def roots(self, dps: int = 50) -> list:
        """Complex roots of f: real roots first (sorted), then one of each conjugate pair."""
        with mpmath.workdps(dps):
            rs = mpmath.polyroots([1, self.f[2], self.f[1], self.f[0]], maxsteps=400, extraprec=4 * dps)
            real = sorted(mpmath.re(r) for r in rs if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-dps // 2))
            cplx = [r for r in rs if abs(mpmath.im(r)) >= mpmath.mpf(10) ** (-dps // 2) and mpmath.im(r) > 0]
        if len(real) + 2 * len(cplx) != 3:
            raise ArithmeticError("root isolation failed")
        return list(real) + cplx

    @lru_cache(maxsize=8)
    def basis_embeddings(self, dps: int = 50) -> tuple:
        """emb[k][i] = sigma_k(w_i) for the r1 + r2 archimedean embeddings."""
        rs = self.roots(dps)
        with mpmath.workdps(dps):
            return tuple(tuple(sum(mpmath.mpf(self.basis[i][j].numerator) / self.basis[i][j].denominator * r**j
                                   for j in range(3)) for i in range(3)) for r in rs)

    def embed(self, a: Sequence, dps: int = 50) -> list:
        emb = self.basis_embeddings(dps)
        with mpmath.workdps(dps):
            return [sum(mpmath.mpf(int(a[i])) * e[i] if isinstance(a[i], int) else
                        mpmath.mpf(a[i].numerator) / a[i].denominator * e[i] for i in range(3)) for e in emb]

    def real_signs(self, a: Sequence) -> list[int]:
        """Signs at the real embeddings, certified against the rounding error."""
        r1 = self.signature[0]
        if not any(a):
            raise ValueError("zero element has no sign")
        dps = 40
        while dps <= 5000:
            vals = self.embed(a, dps)
            emb = self.basis_embeddings(dps)
            with mpmath.workdps(dps):
                scale = sum(abs(mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator) for x in a)
                scale *= max(abs(e[i]) for e in emb for i in range(3))
                err = scale * mpmath.mpf(10) ** (-dps + 5)
                if all(abs(vals[k]) > err for k in range(r1)):
                    return [1 if vals[k] > 0 else -1 for k in range(r1)]
            dps *= 2
        raise ArithmeticError("could not certify signs")

    # -- ideals --------------------------------------------------------------
    def ideal(self, gens: Iterable[Sequence], denom: int = 1) -> FractionalIdeal:
        """Ideal generated (as a module) by the given integer vectors, divided by denom."""
        rows = [list(map(int, g)) for g in gens]
        return FractionalIdeal.make(self, rows, denom)

    def ideal_from_elements(self, elts: Iterable[Sequence]) -> FractionalIdeal:
        """Ideal generated as an O-ideal by possibly fractional elements."""
        elts = [list(map(Fraction, e)) for e in elts]
        d = 1
        for e in elts:
            for x in e:
                d = d * x.denominator // math.gcd(d, x.denominator)
        rows = []
        for e in elts:
            ie = [int(x * d) for x in e]
            for i in range(3):
                rows.append(self.mul([int(i == k) for k in range(3)], ie))
        return FractionalIdeal.make(self, rows, d)

    def principal(self, a: Sequence) -> FractionalIdeal:
        return self.ideal_from_elements([a])

    def unit_ideal(self) -> FractionalIdeal:
        return FractionalIdeal(self, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), 1)

    @cached_property
    def codifferent(self) -> FractionalIdeal:
        """The trace dual O^v = {x : Tr(x O) in Z}."""
        tinv = rat_inverse(self.trace_matrix)
        return self.ideal_from_lattice(tinv)

    def ideal_from_lattice(self, rows: Sequence[Sequence[Fraction]]) -> FractionalIdeal:
        rows = [[Fraction(x) for x in r] for r in rows]
        d = 1
        for r in rows:
            for x in r:
                d = d * x.denominator // math.gcd(d, x.denominator)
        return FractionalIdeal.make(self, [[int(x * d) for x in r] for r in rows], d)

    def dual(self, ideal: FractionalIdeal) -> FractionalIdeal:
        """{x : Tr(x I) in Z}: the rows of (T B^t)^{-1} for basis matrix B."""
        b = [[Fraction(x, ideal.denom) for x in row] for row in ideal.hnf]
        tb = [[sum(Fraction(self.trace_matrix[i][k]) * b[j][k] for k in range(3)) for j in range(3)]
              for i in range(3)]
        return self.ideal_from_lattice(rat_inverse(tb))

    @cached_property
    def different(self) -> FractionalIdeal:
        return self.codifferent.inverse()

    @cached_property
    def hecke_ideal(self) -> FractionalIdeal:
        h = self.codifferent.scale(abs(self.disc))
        if h.denom != 1:
            raise ArithmeticError("Hecke ideal is not integral")
        return h

    # -- residue algebra O/pO ------------------------------------------------
    def frobenius_matrix(self, p: int) -> list[list[int]]:
        return [self.pow_mod([int(i == k) for k in range(3)], p, p) for i in range(3)]

    def radical_mod_p(self, p: int) -> list[list[int]]:
        """Basis of the nilradical of O/pO: kernel of Frobenius^j with p^j >= 3."""
        fr = self.frobenius_matrix(p)
        m = fr
        q = p
        while q < 3:
            m = [[x % p for x in r] for r in linalg.matmul(m, fr)]
            q *= p
        return linalg.left_kernel_mod_p(m, p)

    def prime_decomposition(self, p: int) -> list[PrimeIdeal]:
        if p in self._prime_cache:
            return self._prime_cache[p]
        primes = _decompose(self, p)
        self._prime_cache[p] = primes
        return primes

    def splitting_data(self, p: int) -> SplittingData:
        primes = self.prime_decomposition(p)
        comps = []
        diff = self.different
        for P in primes:
            comps.append((P.e, P.f, diff.valuation(P)))
        return SplittingData(p, tuple(comps))

    # -- valuations ----------------------------------------------------------
    def valuation(self, a: Sequence, P: PrimeIdeal) -> int:
        """v_P of a nonzero element (fractional coordinates allowed)."""
        if isinstance(a[0], Fraction) or isinstance(a[1], Fraction) or isinstance(a[2], Fraction):
            fa = [Fraction(x) for x in a]
            d = 1
            for x in fa:
                d = d * x.denominator // math.gcd(d, x.denominator)
            return self.valuation([int(x * d) for x in fa], P) - P.e * valuation(d, P.p)
        if not any(a):
            raise ValueError("valuation of zero")
        p = P.p
        v = 0
        # pull out powers of p first: v_P(p) = e
        x = list(a)
        while all(c % p == 0 for c in x):
            x = [c // p for c in x]
            v += P.e
        beta = P.beta
        while True:
            y = self.mul(x, beta)
            if all(c % p == 0 for c in y):
                x = [c // p for c in y]
                v += 1
            else:
                return v

    def unit_part(self, a: Sequence[int], P: PrimeIdeal) -> tuple[int, list[int]]:
        """(v, u) with u = a * (beta/p)^v in O a P-unit, for integral nonzero a.

        beta/p has valuation -1 at P and is integral at the other primes over p,
        so u differs from a by a fixed power of one element of valuation -1.
        """
        p = P.p
        x = list(a)
        v = 0
        beta = P.beta
        while True:
            y = self.mul(x, beta)
            if all(c % p == 0 for c in y):
                x = [c // p for c in y]
                v += 1
            else:
                return v, x

    def residue_map(self, P: PrimeIdeal) -> list[int] | None:
        """For a degree-one prime, the linear functional O -> F_p with kernel P."""
        if P.f != 1:
            return None
        cache = self.__dict__.setdefault("_residue_cache", {})
        if P in cache:
            return cache[P]
        ker = linalg.right_kernel_mod_p([list(r) for r in P.hnf], P.p)
        lam = ker[0]
        s = lam[0] % P.p  # value at w_0 = 1
        inv = pow(s, -1, P.p)
        cache[P] = [x * inv % P.p for x in lam]
        return cache[P]

    def primes_above(self, p: int) -> list[PrimeIdeal]:
        return self.prime_decomposition(p)

    # -- Hecke data ----------------------------------------------------------
    def hecke_report(self) -> GlobalHeckeReport:
        return hecke_primes(self)

    def to_json(self) -> dict:
        return {
            "schema_version": JSON_SCHEMA_VERSION,
            "polynomial": list(self.f),
            "basis": [[str(x) for x in row] for row in self.basis],
            "disc": self.disc,
            "index": self.index,
            "signature": list(self.signature),
        }

    def __repr__(self) -> str:
        return f"NumberFieldOrder(f={self.f}, disc={self.disc})"


@dataclass(frozen=True)
class FractionalIdeal:
    """(1/denom) * (row span of hnf) over the order basis."""

    order: NumberFieldOrder = field(compare=False, hash=False, repr=False)
    hnf: tuple[tuple[int, ...], ...]
    denom: int

    @staticmethod
    def make(order: NumberFieldOrder, rows: Sequence[Sequence[int]], denom: int = 1) -> FractionalIdeal:
        h = hnf_square(rows, 3)
        g = denom
        for row in h:
            for x in row:
                g = math.gcd(g, x)
        h = [[x // g for x in row] for row in h]
        return FractionalIdeal(order, tuple(tuple(r) for r in h), denom // g)

    @property
    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.hnf]

    def norm(self) -> Fraction:
        return Fraction(abs(det3(self.hnf)), self.denom**3)

    def is_integral(self) -> bool:
        return self.denom == 1

    def __mul__(self, other: FractionalIdeal) -> FractionalIdeal:
        rows = [self.order.mul(a, b) for a in self.hnf for b in other.hnf]
        return FractionalIdeal.make(self.order, rows, self.denom * other.denom)

    def scale(self, c: int | Fraction) -> FractionalIdeal:
        c = Fraction(c)
        return FractionalIdeal.make(self.order, [[x * c.numerator for x in r] for r in self.hnf],
                                    self.denom * c.denominator)

    def __pow__(self, k: int) -> FractionalIdeal:
        if k < 0:
            return self.inverse() ** (-k)
        result = self.order.unit_ideal()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> FractionalIdeal:
        return self.order.dual(self * self.order.codifferent)

    def __eq__(self, other) -> bool:
        return isinstance(other, FractionalIdeal) and self.hnf == other.hnf and self.denom == other.denom

    def __hash__(self) -> int:
        return hash((self.hnf, self.denom))

    def contains(self, a: Sequence) -> bool:
        """Membership of an element (rational coordinates allowed)."""
        fa = [Fraction(x) * self.denom for x in a]
        # solve c * hnf = fa with upper-triangular hnf
        c = [Fraction(0)] * 3
        rem = list(fa)
        for i in range(3):
            c[i] = rem[i] / self.hnf[i][i]
            if c[i].denominator != 1:
                return False
            rem = [r - c[i] * h for r, h in zip(rem, self.hnf[i])]
        return all(r == 0 for r in rem)

    def valuation(self, P: PrimeIdeal) -> int:
        vals = [self.order.valuation(list(r), P) for r in self.hnf if any(r)]
        return min(vals) - P.e * valuation(self.denom, P.p)

    def factorization(self) -> list[tuple[PrimeIdeal, int]]:
        n = self.norm()
        ps = set(factor(n.numerator).primes()) | set(factor(n.denominator).primes())
        fi = [factor(n.numerator), factor(n.denominator)]
        if any(not x.complete for x in fi):
            raise ArithmeticError(f"cannot factor ideal norm {n}")
        ps |= set(factor(self.denom).primes())
        out = []
        for p in sorted(ps):
            for P in self.order.prime_decomposition(p):
                v = self.valuation(P)
                if v:
                    out.append((P, v))
        return out

    def is_square_ideal(self) -> bool:
        return all(v % 2 == 0 for _, v in self.factorization())

    def __repr__(self) -> str:
        return f"FractionalIdeal({[list(r) for r in self.hnf]}, denom={self.denom})"


def prime_ideal_as_ideal(order: NumberFieldOrder, P: PrimeIdeal) -> FractionalIdeal:
    return FractionalIdeal(order, P.hnf, 1)


# ---------------------------------------------------------------------------
# prime decomposition via O/pO
# ---------------------------------------------------------------------------

def _span_mod_p(rows, p):
    return linalg.rref_mod_p(rows, p)[0]


def _algebra_mul(order, a, b, p):
    return order.mul_mod(a, b, p)


def _min_poly_roots(order, x, p, dim_hint):
    """Roots in F_p of the minimal polynomial of x over F_p (x in the split subalgebra)."""
    from . import polyfp
    powers = [[1, 0, 0]]
    for _ in range(3):
        powers.append(order.mul_mod(powers[-1], x, p))
    # find the first linear dependency among 1, x, x^2, x^3
    for k in range(1, 4):
        ker = linalg.left_kernel_mod_p(powers[: k + 1], p)
        if ker:
            coeffs = ker[0]
            return polyfp.roots_mod_p(coeffs, p)
    raise ArithmeticError("no minimal polynomial found")


def _split_idempotents(order, p, fixed_basis):
    """Primitive idempotents of the split algebra {x : x^p = x} in O/pO."""
    one = [1, 0, 0]
    pieces = [one]
    done = []
    while pieces:
        eps = pieces.pop()
        sub = _span_mod_p([order.mul_mod(eps, b, p) for b in fixed_basis], p)
        if len(sub) <= 1:
            done.append(eps)
            continue
        # choose an element of eps * B that is not a multiple of eps
        x = None
        for b in sub:
            if linalg.rank_mod_p([eps, b], p) == 2:
                x = b
                break
        roots = _min_poly_roots(order, x, p, len(sub))
        if len(roots) <= 1:
            raise ArithmeticError("split subalgebra element with a single eigenvalue")
        for c in roots:
            e = list(eps)
            for c2 in roots:
                if c2 == c:
                    continue
                inv = pow((c - c2) % p, -1, p)
                factor_ = [(x[k] - c2 * eps[k]) * inv % p for k in range(3)]
                e = order.mul_mod(e, factor_, p)
            if any(e):
                pieces.append(e)
    return done


def _decompose(order: NumberFieldOrder, p: int) -> list[PrimeIdeal]:
    rad = order.radical_mod_p(p)
    fr = order.frobenius_matrix(p)
    # split subalgebra: x F = x
    m = [[(fr[i][j] - int(i == j)) % p for j in range(3)] for i in range(3)]
    fixed = linalg.left_kernel_mod_p(m, p)
    idems = _split_idempotents(order, p, fixed) if len(fixed) > 1 else [[1, 0, 0]]
    basis = [[int(i == k) for k in range(3)] for i in range(3)]
    out = []
    for eps in idems:
        one_minus = [(int(k == 0) - eps[k]) % p for k in range(3)]
        comp_rows = [order.mul_mod(one_minus, b, p) for b in basis]
        max_ideal = _span_mod_p(rad + comp_rows, p)
        f = 3 - len(max_ideal)
        local_dim = len(_span_mod_p([order.mul_mod(eps, b, p) for b in basis], p))
        e = local_dim // f
        rows = [list(r) for r in max_ideal] + [[p * int(i == k) for k in range(3)] for i in range(3)]
        h = hnf_square(rows, 3)
        beta_ker = _anti_uniformizer(order, h, p)
        out.append(PrimeIdeal(p, e, f, tuple(tuple(r) for r in h), tuple(beta_ker)))
    out.sort(key=lambda P: (P.f, P.e, P.hnf))
    labelled = []
    for i, P in enumerate(out):
        labelled.append(PrimeIdeal(P.p, P.e, P.f, P.hnf, P.beta, f"p{p}_{i}"))
    if sum(P.e * P.f for P in labelled) != 3:
        raise ArithmeticError(f"decomposition of {p} is inconsistent: {labelled}")
    return labelled


def _anti_uniformizer(order, h, p):
    """beta in O with beta * P in pO and beta not in pO."""
    # condition: beta * g_j = 0 mod p for every basis vector g_j of P
    cols = []
    for g in h:
        m = order.mult_matrix(g)  # row i = w_i * g
        cols.append([[x % p for x in row] for row in m])
    # beta = sum b_i w_i ; beta * g = sum b_i (w_i g): a 3 x 9 system
    big = [sum((cols[j][i] for j in range(3)), []) for i in range(3)]
    ker = linalg.left_kernel_mod_p(big, p)
    if not ker:
        raise ArithmeticError("no anti-uniformizer")
    return ker[0]


# ---------------------------------------------------------------------------
# maximal order by round 2
# ---------------------------------------------------------------------------

def _canonical_basis(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis 1, (a + b theta)/d1, (c + e theta + theta^2)/d2 style: echelon from theta^2 down."""
    d = 1
    for r in rows:
        for x in r:
            d = d * Fraction(x).denominator // math.gcd(d, Fraction(x).denominator)
    ints = [[int(Fraction(x) * d) for x in reversed(r)] for r in rows]
    h = hnf_square(ints, 3)
    return [[Fraction(x, d) for x in reversed(r)] for r in reversed(h)]


def _round2_step(order: NumberFieldOrder, p: int) -> NumberFieldOrder | None:
    rad = order.radical_mod_p(p)
    irows = [list(r) for r in rad] + [[p * int(i == k) for k in range(3)] for i in range(3)]
    ih = hnf_square(irows, 3)
    ihinv = rat_inverse(ih)
    # alpha -> (coords of alpha * g_j in the I-basis) mod p
    big = []
    for i in range(3):
        w = [int(i == k) for k in range(3)]
        row = []
        for g in ih:
            prod = order.mul(w, g)
            coords = [sum(Fraction(prod[k]) * ihinv[k][c] for k in range(3)) for c in range(3)]
            if any(x.denominator != 1 for x in coords):
                raise ArithmeticError("radical is not an ideal")
            row += [int(x) % p for x in coords]
        big.append(row)
    ker = linalg.left_kernel_mod_p(big, p)
    if not ker:
        return None
    urows = [list(r) for r in ker] + [[p * int(i == k) for k in range(3)] for i in range(3)]
    uh = hnf_square(urows, 3)
    new_rows = []
    for r in uh:
        new_rows.append([sum(Fraction(r[i], p) * order.basis[i][j] for i in range(3)) for j in range(3)])
    return NumberFieldOrder(order.f, _canonical_basis(new_rows))


@lru_cache(maxsize=512)
def maximal_order(f: tuple[int, ...]) -> NumberFieldOrder:
    """Maximal order of Q[x]/(f) for a monic irreducible integral cubic f (lowest degree first)."""
    f = tuple(int(c) for c in f)
    if len(f) == 3:
        f = f + (1,)
    if len(f) != 4 or f[3] != 1:
        raise ValueError("maximal_order expects a monic cubic")
    root = _integer_root(f)
    if root is not None:
        raise ReducibleError(f, root)
    order = NumberFieldOrder(f, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    d = order.disc
    fd = factor(d)
    if not fd.complete:
        raise ArithmeticError(f"cannot factor the discriminant {d}")
    for p, e in fd.factors:
        if e < 2:
            continue
        while True:
            nxt = _round2_step(order, p)
            if nxt is None:
                break
            order = nxt
    return order


def pure_cubic(n: int) -> NumberFieldOrder:
    return maximal_order((-n, 0, 0, 1))


# ---------------------------------------------------------------------------
# Hecke primes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GlobalHeckeReport:
    factorization: tuple[tuple[PrimeIdeal, int], ...]
    hecke_primes: tuple[PrimeIdeal, ...]
    splitting: tuple[SplittingData, ...]

    @property
    def is_hecke_ramified(self) -> bool:
        return bool(self.hecke_primes)

    def to_json(self) -> dict:
        return {
            "hecke_ideal": [{"prime": P.p, "e": P.e, "f": P.f, "exponent": k} for P, k in self.factorization],
            "hecke_primes": [{"prime": P.p, "e": P.e, "f": P.f, "label": P.label} for P in self.hecke_primes],
            "splitting": [{"p": s.p, "components": [list(c) for c in s.components]} for s in self.splitting],
            "is_hecke_ramified": self.is_hecke_ramified,
        }


def hecke_primes(order: NumberFieldOrder) -> GlobalHeckeReport:
    """Factor the Hecke ideal and select its Hecke primes."""
    h = order.hecke_ideal
    disc_primes = factor(order.disc).primes()
    fact = []
    hp = []
    splits = []
    for p in disc_primes:
        s = order.splitting_data(p)
        splits.append(s)
        primes = order.prime_decomposition(p)
        expo = s.hecke_exponents
        for P, k in zip(primes, expo):
            direct = h.valuation(P)
            if direct != k:
                raise ArithmeticError(f"Hecke exponent mismatch at {P}: {direct} vs {k}")
            if k:
                fact.append((P, k))
        for i in hecke_components(s.components):
            hp.append(primes[i])
    n = h.norm()
    if n.denominator != 1 or math.isqrt(n.numerator) ** 2 != n.numerator:
        raise ArithmeticError("Hecke ideal norm is not a square")
    return GlobalHeckeReport(tuple(fact), tuple(hp), tuple(splits))


def resolvent_field(order: NumberFieldOrder) -> int:
    """Squarefree d with quadratic resolvent Q(sqrt d)."""
    return squarefree_part(order.disc)


def order_to_json(order: NumberFieldOrder) -> str:
    data = order.to_json()
    data["hecke"] = hecke_primes(order).to_json()
    return json.dumps(data, sort_keys=True)
