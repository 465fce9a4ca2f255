"""The unramified 2-Selmer group of a cubic field and Hecke reciprocity.

Square classes are products of explicit integral elements with integer
exponents (usually the relation elements of a class group computation), so
every local invariant is evaluated factor by factor:

* signs at real embeddings,
* valuation parities,
* at a prime w over 2, the unit part x * (beta/2)^v reduced mod w^{2e},
  where beta/2 is a fixed element of valuation -1 at w; a unit is
  unramified exactly when it is a square mod w^{2e} = 4 O_w,
* at an odd prime w, the Legendre symbol of the unit part in O/w,
* quadratic characters at auxiliary degree-one primes, which detect
  square classes globally.
"""

from __future__ import annotations

import csv
import itertools
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .arith import (
    REAL,
    Place,
    diagonalize,
    factor,
    finite,
    is_split_odd_rank,
    is_square,
    squarefree_part,
)
from .classgroup import ClassGroupData, character_value, two_torsion_basis
from .orders import NumberFieldOrder, PrimeIdeal, hecke_primes, prime_ideal_as_ideal


class SelmerCardinalityError(AssertionError):
    pass


class ReciprocityViolation(AssertionError):
    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


class DimensionFormulaError(AssertionError):
    pass


# ---------------------------------------------------------------------------
# square classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SquareClassElement:
    """prod x_i^{e_i} times (-1)^sign, as a class in F^x / F^x2."""

    order: NumberFieldOrder = field(compare=False, hash=False, repr=False)
    factors: tuple[tuple[tuple[int, ...], int], ...]
    sign: int = 0
    label: str = ""

    @staticmethod
    def from_exponents(cg: ClassGroupData, exps: Sequence[int], sign: int = 0, label: str = "",
                       reduce_mod_2: bool = True) -> SquareClassElement:
        facs = []
        for k, e in enumerate(exps):
            if reduce_mod_2:
                e = e % 2
            if e:
                facs.append((tuple(cg.relation_elements[k]), e))
        return SquareClassElement(cg.order, tuple(facs), sign % 2, label)

    @staticmethod
    def from_element(O: NumberFieldOrder, x: Sequence[int], label: str = "") -> SquareClassElement:
        return SquareClassElement(O, ((tuple(int(c) for c in x), 1),), 0, label)

    @staticmethod
    def one(O: NumberFieldOrder) -> SquareClassElement:
        return SquareClassElement(O, (), 0, "1")

    def __mul__(self, other: SquareClassElement) -> SquareClassElement:
        merged: dict[tuple[int, ...], int] = {}
        for x, e in self.factors + other.factors:
            merged[x] = merged.get(x, 0) + e
        facs = tuple((x, e % 2) for x, e in sorted(merged.items()) if e % 2)
        return SquareClassElement(self.order, facs, (self.sign + other.sign) % 2)

    @property
    def is_trivial_representation(self) -> bool:
        return not self.factors and not self.sign

    def representative(self) -> list[Fraction]:
        """Exact coordinates of the product."""
        O = self.order
        num = [Fraction(1), Fraction(0), Fraction(0)]
        den = [1, 0, 0]
        for x, e in self.factors:
            for _ in range(abs(e)):
                if e > 0:
                    num = O.mul(num, list(x))
                else:
                    den = O.mul(den, list(x))
        if den != [1, 0, 0]:
            num = O.mul(num, O.inverse(den))
        if self.sign:
            num = [-c for c in num]
        return [Fraction(c) for c in num]

    def norm(self) -> Fraction:
        n = Fraction(-1 if self.sign else 1)
        for x, e in self.factors:
            n *= Fraction(self.order.norm(list(x))) ** e
        return n

    @property
    def norm_class(self) -> int:
        """Squarefree representative of the rational square class of the norm."""
        return squarefree_part(self.norm())

    def valuation(self, P: PrimeIdeal) -> int:
        return sum(e * self.order.valuation(list(x), P) for x, e in self.factors)

    def real_signs(self) -> list[int]:
        r1 = self.order.signature[0]
        out = [-1 if self.sign else 1] * r1
        for x, e in self.factors:
            if e % 2:
                s = self.order.real_signs(list(x))
                out = [a * b for a, b in zip(out, s)]
        return out

    def support(self) -> list[int]:
        """Rational primes below which the class can have odd valuation."""
        ps: set[int] = set()
        for x, e in self.factors:
            if e % 2:
                fi = factor(abs(self.order.norm(list(x))))
                if not fi.complete:
                    raise ArithmeticError("cannot factor the norm of a factor")
                ps |= set(fi.primes())
        return sorted(ps)

    def to_json(self) -> dict:
        return {"label": self.label, "sign": self.sign,
                "factors": [[list(x), e] for x, e in self.factors], "norm_class": self.norm_class}


# ---------------------------------------------------------------------------
# local invariants
# ---------------------------------------------------------------------------

def _reduce_mod_hnf(x: Sequence[int], h: Sequence[Sequence[int]]) -> tuple[int, ...]:
    v = list(x)
    for i in range(len(h)):
        q = v[i] // h[i][i]
        if q:
            v = [a - q * b for a, b in zip(v, h[i])]
    return tuple(v)


def _residues(h: Sequence[Sequence[int]]):
    ranges = [range(h[i][i]) for i in range(3)]
    for a in itertools.product(*ranges):
        yield _reduce_mod_hnf(list(a), h)


class UnitSquareClasses:
    """(O/I)^x modulo squares for I = P^m, with F_2 coordinates for every unit residue."""

    def __init__(self, O: NumberFieldOrder, P: PrimeIdeal, m: int):
        self.O = O
        self.P = P
        ideal = prime_ideal_as_ideal(O, P) ** m
        self.hnf = [list(r) for r in ideal.hnf]
        modulus = self.hnf[0][0] * self.hnf[1][1] * self.hnf[2][2]
        self.modulus = modulus
        elems = sorted(set(_residues(self.hnf)))
        pr = prime_ideal_as_ideal(O, P)
        units = [x for x in elems if not pr.contains(list(x))]
        self.units = units

        def mul(a, b):
            return _reduce_mod_hnf(O.mul(list(a), list(b)), self.hnf)
        self._mul = mul
        squares = {mul(x, x) for x in units}
        self.squares = squares
        # build an F_2 basis of units / squares by growing a subgroup
        coords: dict[tuple[int, ...], int] = {s: 0 for s in squares}
        gens = []
        for x in units:
            if x in coords:
                continue
            bit = 1 << len(gens)
            gens.append(x)
            new = {}
            for y, c in coords.items():
                new[mul(x, y)] = c | bit
            coords.update(new)
        if len(coords) != len(units):
            raise ArithmeticError("unit square classes do not form an elementary 2-group")
        self.coords = coords
        self.dim = len(gens)

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return _reduce_mod_hnf(list(x), self.hnf)

    def coordinates(self, unit: Sequence[int]) -> int:
        return self.coords[self.reduce(unit)]


_LOCAL_CACHE: dict = {}


def _local_table(O: NumberFieldOrder, P: PrimeIdeal, m: int) -> UnitSquareClasses:
    key = (O.f, P.hnf, m)
    if key not in _LOCAL_CACHE:
        _LOCAL_CACHE[key] = UnitSquareClasses(O, P, m)
    return _LOCAL_CACHE[key]


def unramified_table(O: NumberFieldOrder, P: PrimeIdeal) -> UnitSquareClasses:
    """Units mod P^{2e} modulo squares: a unit is unramified iff its coordinates vanish."""
    if P.p != 2:
        raise ValueError("the unramified test is only needed over 2")
    return _local_table(O, P, 2 * P.e)


def two_adic_vector(O: NumberFieldOrder, x: Sequence[int], P: PrimeIdeal) -> tuple[int, int]:
    """(v mod 2, coordinates of the unit part modulo unramified classes) at P over 2."""
    v, u = O.unit_part(list(x), P)
    return v % 2, unramified_table(O, P).coordinates(u)


def residue_character(O: NumberFieldOrder, x: Sequence[int], P: PrimeIdeal) -> int:
    """Euler criterion for the unit part of x in O/P, P of odd residue characteristic; 0 square, 1 not."""
    if P.p == 2:
        raise ValueError("residue characteristic 2 is not supported")
    _, u = O.unit_part(list(x), P)
    p = P.p
    r = O.pow_mod(u, (P.norm - 1) // 2, p)
    rows = [[c % p for c in row] for row in P.hnf]
    base = linalg.rank_mod_p(rows, p)
    minus_one = [(r[0] - 1) % p, r[1] % p, r[2] % p]
    if linalg.rank_mod_p(rows + [minus_one], p) == base:
        return 0
    plus_one = [(r[0] + 1) % p, r[1] % p, r[2] % p]
    if linalg.rank_mod_p(rows + [plus_one], p) == base:
        return 1
    raise ArithmeticError("Euler criterion gave neither 1 nor -1: element not a P-unit")


def _class_bits_residue(t: SquareClassElement, P: PrimeIdeal) -> int:
    """Legendre bit of the unit part of t at an odd prime P (t with even valuation at P)."""
    bit = 0
    for x, e in t.factors:
        if e % 2:
            bit ^= residue_character(t.order, x, P)
    if t.sign:
        bit ^= _minus_one_bit(P)
    return bit


def _minus_one_bit(P: PrimeIdeal) -> int:
    # -1 is a square in F_q iff q = 1 mod 4
    return 0 if P.norm % 4 == 1 else 1


def splits_at(t: SquareClassElement, w: PrimeIdeal) -> str:
    """'split' if t is a local square at w, 'inert' otherwise (t even valuation, w odd)."""
    if w.p == 2:
        raise ValueError("residue characteristic 2 is rejected by splits_at")
    if t.valuation(w) % 2:
        raise ValueError("t has odd valuation at w")
    # (beta/p)^{sum e v} is a square because the total valuation is even
    return "inert" if _class_bits_residue(t, w) else "split"


def _splits_at_two(t: SquareClassElement, w: PrimeIdeal) -> str:
    """Local square test at w over 2: the unit part must be a square mod 4w."""
    if t.valuation(w) % 2:
        raise ValueError("t has odd valuation at w")
    table = _local_table(t.order, w, 2 * w.e + 1)
    c = table.coordinates([-1, 0, 0]) if t.sign else 0
    for x, e in t.factors:
        if e % 2:
            _, u = t.order.unit_part(list(x), w)
            c ^= table.coordinates(u)
    return "inert" if c else "split"


def hilbert_with_uniformizer(t: SquareClassElement, w: PrimeIdeal) -> int:
    """(t, pi_w)_w as a bit for odd w, with pi_w = p / beta."""
    v = t.valuation(w)
    bit = _class_bits_residue(t, w)
    if v % 2:
        bit ^= _minus_one_bit(w)
    return bit


# ---------------------------------------------------------------------------
# the Selmer group
# ---------------------------------------------------------------------------

@dataclass
class SelmerGroupData:
    order: NumberFieldOrder
    basis: list[SquareClassElement]
    dimension: int
    ambient_dimension: int
    local_report: dict
    class_group: ClassGroupData = field(repr=False, default=None)

    def elements(self) -> list[SquareClassElement]:
        """All 2^dimension classes (as products of basis elements)."""
        out = []
        for mask in range(1 << self.dimension):
            t = SquareClassElement.one(self.order)
            for i, b in enumerate(self.basis):
                if mask >> i & 1:
                    t = t * b
            out.append(SquareClassElement(t.order, t.factors, t.sign, f"mask{mask}"))
        return out

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "ambient_dimension": self.ambient_dimension,
                "basis": [b.to_json() for b in self.basis], "local_report": self.local_report}


def _primes_over_2(O: NumberFieldOrder) -> list[PrimeIdeal]:
    return O.prime_decomposition(2)


def _element_vectors(cg: ClassGroupData):
    """Per relation element (and -1 appended last): valuation bits, sign bits, 2-adic bits, character bits."""
    O = cg.order
    r1 = O.signature[0]
    w2 = _primes_over_2(O)
    vals, signs, local, chars = [], [], [], []
    for k, x in enumerate(cg.relation_elements):
        vals.append(linalg.f2_pack([v & 1 for v in cg.relation_matrix[k]]))
        d = cg.element_data(k)
        signs.append(linalg.f2_pack([0 if s > 0 else 1 for s in d["signs"]]))
        bits = []
        for P in w2:
            table = unramified_table(O, P)
            _, u = O.unit_part(list(x), P)
            c = table.coordinates(u)
            bits += [(c >> i) & 1 for i in range(table.dim)]
        local.append(linalg.f2_pack(bits))
        chars.append(linalg.f2_pack(d["chars"]))
    # -1
    vals.append(0)
    signs.append(linalg.f2_pack([1] * r1))
    bits = []
    for P in w2:
        table = unramified_table(O, P)
        c = table.coordinates([-1, 0, 0])
        bits += [(c >> i) & 1 for i in range(table.dim)]
    local.append(linalg.f2_pack(bits))
    chars.append(linalg.f2_pack([_minus_one_bit(Q) for Q in cg.aux_primes]))
    return vals, signs, local, chars


def _combo_to_element(cg: ClassGroupData, mask: int, label: str = "") -> SquareClassElement:
    m = len(cg.relation_elements)
    exps = [(mask >> k) & 1 for k in range(m)]
    sign = (mask >> m) & 1
    return SquareClassElement.from_exponents(cg, exps, sign, label)


def _char_width(cg: ClassGroupData) -> int:
    return cg.order.signature[0] + len(cg.aux_primes)


def sel2_ambient(O: NumberFieldOrder, cg: ClassGroupData) -> list[SquareClassElement]:
    """F_2-basis of Sel_2(F): -1, fundamental units, and square roots gamma_i of I_i^2."""
    basis = [SquareClassElement(O, (), 1, "-1")]
    for i, e in enumerate(cg.units.exponents):
        basis.append(SquareClassElement.from_exponents(cg, e, 0, f"unit{i}"))
    for i, (a, c) in enumerate(two_torsion_basis(cg)):
        basis.append(SquareClassElement.from_exponents(cg, c, 0, f"gamma{i}"))
    # independence under signs and characters
    vecs = [_global_bits(cg, t) for t in basis]
    if linalg.f2_rank(vecs) != len(basis):
        raise SelmerCardinalityError("ambient Selmer basis is not independent")
    return basis


def _global_bits(cg: ClassGroupData, t: SquareClassElement) -> int:
    O = cg.order
    bits = [0 if s > 0 else 1 for s in t.real_signs()]
    for Q in cg.aux_primes:
        b = 1 if t.sign and Q.p % 4 == 3 else 0
        for x, e in t.factors:
            if e % 2:
                b ^= character_value(O, Q, x)
        bits.append(b)
    return linalg.f2_pack(bits)


def sel2_unramified(O: NumberFieldOrder, cg: ClassGroupData) -> SelmerGroupData:
    """Kernel of the local conditions (positive at real places, unramified over 2) on Sel_2(F)."""
    vals, signs, local, chars = _element_vectors(cg)
    n = len(vals)
    r1 = O.signature[0]
    width_l = sum(unramified_table(O, P).dim for P in _primes_over_2(O))
    # combos with even valuation everywhere
    even = linalg.f2_kernel(vals)
    nchar = _char_width(cg)
    sig_char = [signs[k] | (chars[k] << r1) for k in range(n)]
    loc = [signs[k] | (local[k] << r1) for k in range(n)]
    # restrict to the even-valuation space: coordinates in the basis `even`
    img_global = [linalg.f2_combine(m, sig_char) for m in even]
    img_local = [linalg.f2_combine(m, loc) for m in even]
    ambient_dim = linalg.f2_rank(img_global)
    # kernel of the local map inside span(even), then its global image
    ker_local = linalg.f2_kernel(img_local)
    sel_masks = []
    images = linalg.F2Basis()
    for km in ker_local:
        mask = 0
        for i, m in enumerate(even):
            if km >> i & 1:
                mask ^= m
        img = linalg.f2_combine(mask, sig_char)
        if images.add(img):
            sel_masks.append(mask)
    dim = len(sel_masks)
    expected_ambient = 1 + O.unit_rank + cg.two_rank
    if ambient_dim != expected_ambient:
        raise SelmerCardinalityError(
            f"Sel_2 dimension {ambient_dim} differs from 1 + u + dim Cl[2] = {expected_ambient}")
    if dim != cg.two_rank:
        raise SelmerCardinalityError(f"|Sel_2^un| = 2^{dim} but |Cl[2]| = 2^{cg.two_rank}")
    basis = [_combo_to_element(cg, m, f"sel{i}") for i, m in enumerate(sel_masks)]
    for t in basis:
        if not is_square(t.norm()):
            raise SelmerCardinalityError("a Selmer class has non-square norm")
    report = {
        "real_places": r1,
        "primes_over_2": [{"e": P.e, "f": P.f, "local_dim": unramified_table(O, P).dim} for P in _primes_over_2(O)],
        "local_condition_width": r1 + width_l,
        "characters": nchar - r1,
    }
    return SelmerGroupData(O, basis, dim, ambient_dim, report, cg)


# ---------------------------------------------------------------------------
# Hecke reciprocity
# ---------------------------------------------------------------------------

@dataclass
class AuditRow:
    t: str
    inert: list[str]
    split: list[str]

    @property
    def parity_ok(self) -> bool:
        return len(self.inert) % 2 == 0


def reciprocity_audit(O: NumberFieldOrder, sd: SelmerGroupData) -> list[AuditRow]:
    """For every class of Sel_2^un, the Hecke primes inert in F(sqrt t) must be even in number."""
    report = hecke_primes(O)
    rows = []
    for t in sd.elements():
        inert, split = [], []
        for w in report.hecke_primes:
            status = splits_at(t, w) if w.p != 2 else _splits_at_two(t, w)
            (inert if status == "inert" else split).append(w.label)
        row = AuditRow(t.label, inert, split)
        if not row.parity_ok:
            raise ReciprocityViolation(
                f"odd number of inert Hecke primes for f = {O.f}",
                {"polynomial": list(O.f), "t": t.to_json(), "inert": inert, "split": split})
        rows.append(row)
    return rows


def hecke_functional(O: NumberFieldOrder, t: SquareClassElement) -> int:
    """t -> sum over Hecke primes w of (t, pi_w)_w, as a bit."""
    bit = 0
    for w in hecke_primes(O).hecke_primes:
        bit ^= hilbert_with_uniformizer(t, w)
    return bit


def write_audit_csv(path, rows: Sequence[tuple[str, str, str, str]]) -> None:
    """rows of (field, t, hecke_prime, split|inert)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["field", "t", "hecke_prime", "status"])
        for r in rows:
            w.writerow(r)


def audit_csv_rows(field_id: str, audit: Sequence[AuditRow]) -> list[tuple[str, str, str, str]]:
    out = []
    for row in audit:
        for w in row.inert:
            out.append((field_id, row.t, w, "inert"))
        for w in row.split:
            out.append((field_id, row.t, w, "split"))
    return out


# ---------------------------------------------------------------------------
# the global quadratic refinement
# ---------------------------------------------------------------------------

def default_beta(O: NumberFieldOrder) -> list[Fraction]:
    """theta for pure cubics (trace zero already), else 3 theta - Tr(theta)."""
    f = O.f
    theta = O.from_power([0, 1, 0])
    if f[2] == 0 and f[1] == 0:
        return theta
    tr = -f[2]
    return [3 * theta[0] - tr, 3 * theta[1], 3 * theta[2]]


def _charpoly(O: NumberFieldOrder, b: Sequence[Fraction]) -> list[Fraction]:
    """Characteristic polynomial of multiplication by b, lowest degree first, monic."""
    m = O.mult_matrix([Fraction(x) for x in b])
    m = [[Fraction(x) for x in row] for row in m]
    tr = m[0][0] + m[1][1] + m[2][2]
    minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
              + m[1][1] * m[2][2] - m[1][2] * m[2][1])
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    return [-det, minors, -tr, Fraction(1)]


def refinement_form(O: NumberFieldOrder, beta: Sequence[Fraction], t: Sequence[Fraction]):
    """Gram matrix of (x, y) -> Tr(t x y / f'(beta)) over the integral basis."""
    if O.trace(beta) != 0:
        raise ValueError("beta must have trace zero")
    cp = _charpoly(O, beta)
    # f'(beta) = 3 beta^2 + 2 c2 beta + c1
    b2 = O.mul(beta, beta)
    fp = [3 * b2[i] + 2 * cp[2] * beta[i] + (cp[1] if i == 0 else 0) for i in range(3)]
    if all(x == 0 for x in fp) or O.norm(fp) == 0:
        raise ValueError("beta does not generate the field")
    scale = O.mul([Fraction(x) for x in t], O.inverse(fp))
    basis = [[int(i == j) for j in range(3)] for i in range(3)]
    gram = [[Fraction(O.trace(O.mul(scale, O.mul(basis[i], basis[j])))) for j in range(3)] for i in range(3)]
    return gram, cp


def global_refinement_q(O: NumberFieldOrder, beta: Sequence[Fraction] | None,
                        t: SquareClassElement, extra_primes: Sequence[int] = ()) -> set[Place]:
    """Places where the form Tr(t x y / f'(beta)) is not split.

    Only places that can be nonsplit are examined: infinity, 2, primes of
    disc(f_beta), and primes where t can have odd valuation.  Elsewhere the
    form is a unit multiple of a unimodular split form.
    """
    beta = default_beta(O) if beta is None else [Fraction(x) for x in beta]
    rep = t.representative()
    gram, cp = refinement_form(O, beta, rep)
    form = diagonalize(gram)
    det = form.det()
    cands: set[int] = {2}
    # disc of the characteristic polynomial of beta, made integral
    from .local_kummer import poly_discriminant
    den = 1
    for c in cp:
        den = den * c.denominator // _gcd(den, c.denominator)
    scaled = [int(c * den ** (3 - i)) for i, c in enumerate(cp)]
    # x -> x/den substitution gives a monic integral polynomial for den * beta
    d = poly_discriminant(scaled)
    fd = factor(abs(d))
    if not fd.complete:
        raise ArithmeticError("cannot factor disc(f_beta)")
    cands |= set(fd.primes()) | set(factor(den).primes())
    cands |= set(t.support())
    cands |= set(extra_primes)
    bad: set[Place] = set()
    if not is_split_odd_rank(form, 1, det, REAL):
        bad.add(REAL)
    for p in sorted(cands):
        if not is_split_odd_rank(form, 1, det, finite(p)):
            bad.add(finite(p))
    return bad


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def random_nonselmer_classes(O: NumberFieldOrder, count: int, seed: int = 0) -> list[SquareClassElement]:
    """Classes t = s * N(s) (square norm) for small random s; typically not Selmer."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = [rng.randint(-6, 6) for _ in range(3)]
        if not any(s):
            continue
        n = O.norm(s)
        if n == 0:
            continue
        t = SquareClassElement(O, ((tuple(s), 1), ((int(n), 0, 0), 1)), 0, f"s{len(out)}")
        out.append(t)
    return out


# ---------------------------------------------------------------------------
# dimension formulas
# ---------------------------------------------------------------------------

def _local_dim(O: NumberFieldOrder, P: PrimeIdeal) -> int:
    """dim F_w^x / F_w^x2 by enumeration of (O/w^m)^x modulo squares."""
    m = 2 * P.e + 1 if P.p == 2 else 1
    return 1 + _local_table(O, P, m).dim


def _rational_local_dim(p: int) -> int:
    m = 8 if p == 2 else p
    units = [x for x in range(m) if x % p]
    squares = {x * x % m for x in units}
    size = len(units) // len(squares)
    return 1 + size.bit_length() - 1


def local_dims(O: NumberFieldOrder, p: int) -> dict:
    primes = O.prime_decomposition(p)
    sum_w = sum(_local_dim(O, P) for P in primes)
    w_p = sum_w - _rational_local_dim(p)
    norm_rank = 1 if any(P.f % 2 for P in primes) else 0
    v_p = len(primes) - norm_rank
    return {"k": len(primes), "W": w_p, "V": v_p}


@dataclass
class DimensionReport:
    S: tuple[int, ...]
    T_size: int
    span_T: int
    u: int
    h: int
    h1_predicted: int
    h1_direct: int
    y_predicted: int | None
    y_direct: int | None
    corollary: bool | None
    kernel_dim: int | None

    @property
    def ok(self) -> bool:
        good = self.h1_predicted == self.h1_direct
        if self.y_predicted is not None:
            good = good and self.y_predicted == self.y_direct
        if self.corollary is not None:
            good = good and self.corollary
        if self.kernel_dim is not None:
            good = good and self.kernel_dim == self.h
        return good


def _norm_bits(cg: ClassGroupData, k: int, fb_primes: list[int]) -> int:
    O = cg.order
    x = cg.relation_elements[k]
    n = O.norm(list(x))
    bits = [1 if n < 0 else 0]
    for p in fb_primes:
        a = sum(P.f * v for P, v in zip(cg.factor_base, cg.relation_matrix[k]) if P.p == p)
        bits.append(a & 1)
    return linalg.f2_pack(bits)


def dim_formula_check(O: NumberFieldOrder, cg: ClassGroupData, S: Sequence[int]) -> DimensionReport:
    """Compare the predicted dimensions of H^1_S and Y_S with direct computations."""
    S = tuple(sorted(set(S)))
    fb_primes = sorted({P.p for P in cg.factor_base})
    for p in S:
        if p not in fb_primes:
            raise ValueError(f"prime {p} of S is not below the factor-base bound")
    T = [P for P in cg.factor_base if P.p in S]
    u = O.unit_rank
    h = cg.two_rank
    # span of T in Cl/2Cl
    even_idx = [i for i, d in enumerate(cg.elementary_divisors) if d % 2 == 0]
    span = linalg.f2_rank([linalg.f2_pack([cg.dlog_vector(cg.prime_relation(P))[i] & 1 for i in even_idx]) for P in T]) \
        if T and even_idx else 0
    h1_pred = u + h + len(T) - len(S) - span
    # direct H^1_S
    r1 = O.signature[0]
    m = len(cg.relation_elements)
    t_cols = [i for i, P in enumerate(cg.factor_base) if P.p in S]
    other_cols = [i for i, P in enumerate(cg.factor_base) if P.p not in S]
    cons, img, ymap = [], [], []
    w2 = _primes_over_2(O) if 2 in S else []
    for k in range(m):
        row = cg.relation_matrix[k]
        vbits = linalg.f2_pack([row[i] & 1 for i in other_cols])
        nb = _norm_bits(cg, k, fb_primes)
        cons.append(vbits | (nb << len(other_cols)))
        d = cg.element_data(k)
        tbits = [row[i] & 1 for i in t_cols]
        sbits = [0 if s > 0 else 1 for s in d["signs"]]
        img.append(linalg.f2_pack(sbits + d["chars"] + tbits))
        ybits = list(sbits)
        for i in t_cols:
            P = cg.factor_base[i]
            if P.p != 2:
                ybits.append(row[i] & 1)
        for P in w2:
            vbit, c = two_adic_vector(O, cg.relation_elements[k], P)
            ybits.append(vbit)
            ybits += [(c >> j) & 1 for j in range(unramified_table(O, P).dim)]
        ymap.append(linalg.f2_pack(ybits))
    # -1: norm -1, sign negative everywhere
    cons.append(1 << len(other_cols))
    img.append(linalg.f2_pack([1] * r1 + [_minus_one_bit(Q) for Q in cg.aux_primes] + [0] * len(t_cols)))
    yb = [1] * r1 + [0] * sum(1 for i in t_cols if cg.factor_base[i].p != 2)
    for P in w2:
        c = unramified_table(O, P).coordinates([-1, 0, 0])
        yb += [0] + [(c >> j) & 1 for j in range(unramified_table(O, P).dim)]
    ymap.append(linalg.f2_pack(yb))
    space = linalg.f2_kernel(cons)
    images = [linalg.f2_combine(mk, img) for mk in space]
    h1_direct = linalg.f2_rank(images)
    y_pred = y_direct = cor = kdim = None
    if 2 in S:
        y_pred = 2 * u + len(T) - len(S)
        y_direct = r1 - 1
        for p in S:
            ld = local_dims(O, p)
            y_direct += ld["W"] - ld["V"]
        if span == len(even_idx):
            cor = (y_direct == h1_direct + u)
        # kernel of H^1_S -> Y_S has dimension h
        basis = linalg.F2Basis()
        reps = []
        for mk in space:
            if basis.add(linalg.f2_combine(mk, img)):
                reps.append(mk)
        yimg = [linalg.f2_combine(mk, ymap) for mk in reps]
        kdim = len(reps) - linalg.f2_rank(yimg)
    report = DimensionReport(S, len(T), span, u, h, h1_pred, h1_direct, y_pred, y_direct, cor, kdim)
    if not report.ok:
        raise DimensionFormulaError(f"dimension formula mismatch for f = {O.f}, S = {S}: {report}")
    return report
