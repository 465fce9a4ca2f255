"""Class groups, units and ideal-class discrete logarithms of cubic fields.

Relations are harvested from small elements of LLL-reduced lattices (the
order itself and factor-base primes), the relation lattice is put in Smith
form, and units come from the integer kernel of the relation matrix.  Units
and square roots of principal squares are kept in compact form: exponent
vectors over the stored relation elements.

Three quality gates decide when the relation lattice is complete:

* the product h'R' agrees with the truncated Euler product for hR,
* 2-saturation: the square classes produced by relations have the expected
  F_2-rank under signs and quadratic characters at auxiliary primes,
* the answer is stable for a number of extra relations.

The result carries a conditionality tag.  "certified" means every prime of
norm below the Minkowski bound was shown to lie in the group generated by
the factor base; "GRH-conditional" means the same below the Bach bound;
"heuristic" means only the factor base itself was used.
"""

from __future__ import annotations

import math
import random
from collections import OrderedDict
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import linalg, polyfp
from .arith import legendre, primes_up_to
from .orders import FractionalIdeal, NumberFieldOrder, PrimeIdeal, prime_ideal_as_ideal


class ClassGroupError(RuntimeError):
    """Relation harvesting ran out of budget before the quality gates passed."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


class UnfactorableSupportError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ClassGroupConfig:
    factor_base_multiplier: float = 0.3
    factor_base_min: int = 30
    relation_budget: int = 40000  # candidate elements examined
    extra_relations: int = 20
    grh_flag: bool = False
    certify_flag: bool = False
    max_disc: int = 10**8
    euler_bound: int = 5000
    aux_characters: int = 32
    shuffle_seed: int | None = None


def minkowski_bound(O: NumberFieldOrder) -> float:
    r1, r2 = O.signature
    return 6 / 27 * (4 / math.pi) ** r2 * math.sqrt(abs(O.disc))


def bach_bound(O: NumberFieldOrder) -> float:
    return 12 * math.log(abs(O.disc)) ** 2


# ---------------------------------------------------------------------------
# lattices and small elements
# ---------------------------------------------------------------------------

def _t2_precision(rows: Sequence[Sequence[int]]) -> int:
    size = max(abs(int(x)) for r in rows for x in r) + 1
    return 30 + 10 * ((2 * len(str(size)) + 9) // 10)


def _t2_gram(O: NumberFieldOrder, rows: Sequence[Sequence[int]]) -> list[list]:
    """T2 Gram matrix of a lattice given by rows, in floating point.

    The working precision grows with the size of the coordinates so that the
    cancellation in a skewed basis does not swamp the small vectors.
    """
    dps = _t2_precision(rows)
    emb = O.basis_embeddings(dps)
    r1 = O.signature[0]
    with mpmath.workdps(dps):
        vals = [[sum(int(r[i]) * e[i] for i in range(3)) for e in emb] for r in rows]
        g = [[mpmath.mpf(0)] * len(rows) for _ in rows]
        for a in range(len(rows)):
            for b in range(a, len(rows)):
                s = mpmath.mpf(0)
                for k, (x, y) in enumerate(zip(vals[a], vals[b])):
                    w = 1 if k < r1 else 2
                    s += w * mpmath.re(x * mpmath.conj(y))
                g[a][b] = g[b][a] = s
        return g


def reduced_basis(O: NumberFieldOrder, rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """LLL-reduce a rank-3 lattice in O with respect to the T2 norm.

    Floating LLL passes alternate with exact recomputation of the Gram matrix
    from the integer rows until a pass leaves the basis unchanged.
    """
    rows = [list(r) for r in rows]
    ident = linalg.identity(3)
    for _ in range(50):
        gram = _t2_gram(O, rows)
        with mpmath.workdps(_t2_precision(rows)):
            t = linalg.lll_gram(gram, max_steps=500)
        if t == ident:
            break
        rows = [[sum(t[i][k] * rows[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    return rows


def _shell(r: int) -> Iterator[tuple[int, int, int]]:
    """Primitive coefficient vectors with max norm r, first nonzero entry positive."""
    rng = range(-r, r + 1)
    for a in rng:
        for b in rng:
            for c in rng:
                if max(abs(a), abs(b), abs(c)) != r:
                    continue
                first = a or b or c
                if first <= 0:
                    continue
                if math.gcd(math.gcd(a, b), c) != 1:
                    continue
                yield a, b, c


def _norm_evaluator(O: NumberFieldOrder):
    terms = list(O.norm_form.items())

    def norm(x):
        total = 0
        for (i, j, k), c in terms:
            total += c * x[0] ** i * x[1] ** j * x[2] ** k
        return total
    return norm


# ---------------------------------------------------------------------------
# analytic class number formula
# ---------------------------------------------------------------------------

def _x_pow_mod(f: Sequence[int], p: int) -> list[int]:
    """x^p mod (f, p) for monic cubic f, as a coefficient list of length 3."""
    f0, f1, f2 = f[0] % p, f[1] % p, f[2] % p

    def mulmod(a, b):
        c0 = a[0] * b[0]
        c1 = a[0] * b[1] + a[1] * b[0]
        c2 = a[0] * b[2] + a[1] * b[1] + a[2] * b[0]
        c3 = a[1] * b[2] + a[2] * b[1]
        c4 = a[2] * b[2]
        # x^4 = x * x^3, x^3 = -(f2 x^2 + f1 x + f0)
        c3 -= c4 * f2
        c2 -= c4 * f1
        c1 -= c4 * f0
        c2 -= c3 * f2
        c1 -= c3 * f1
        c0 -= c3 * f0
        return [c0 % p, c1 % p, c2 % p]

    result = [1, 0, 0]
    base = [0, 1, 0]
    e = p
    while e:
        if e & 1:
            result = mulmod(result, base)
        base = mulmod(base, base)
        e >>= 1
    return result


def _local_euler_factor(O: NumberFieldOrder, p: int, disc_f: int) -> float:
    """log of prod_{P | p} (1 - N(P)^{-1})^{-1}."""
    if disc_f % p == 0:
        return -sum(math.log1p(-1.0 / P.norm) for P in O.prime_decomposition(p))
    g = _x_pow_mod(O.f, p)
    g[1] = (g[1] - 1) % p
    if not any(g):
        nroots = 3
    else:
        nroots = len(polyfp.gcd(list(O.f), polyfp.trim(g, p), p)) - 1
    if nroots == 3:
        return -3 * math.log1p(-1.0 / p)
    if nroots == 1:
        return -math.log1p(-1.0 / p) - math.log1p(-1.0 / (p * p))
    return -math.log1p(-1.0 / p**3)


def analytic_hR(O: NumberFieldOrder, bound: int = 5000) -> float:
    """Truncated Euler product estimate of h * R."""
    disc_f = O.poly_disc
    log_kappa = 0.0
    for p in primes_up_to(bound):
        log_kappa += math.log1p(-1.0 / p) + _local_euler_factor(O, p, disc_f)
    r1, r2 = O.signature
    return math.exp(log_kappa) * 2 * math.sqrt(abs(O.disc)) / (2**r1 * (2 * math.pi) ** r2)


# ---------------------------------------------------------------------------
# unit lattice from log vectors
# ---------------------------------------------------------------------------

_DPS = 60


def _log_vector(O: NumberFieldOrder, x: Sequence[int], u: int) -> list:
    vals = O.embed(x, _DPS)
    with mpmath.workdps(_DPS):
        return [mpmath.log(abs(vals[k])) for k in range(u)]


class _UnitLattice:
    """Incremental lattice generated by unit log vectors, tracking exponents."""

    def __init__(self, u: int, tol):
        self.u = u
        self.tol = tol
        self.basis: list[list] = []  # log vectors
        self.exps: list[list[int]] = []

    def _coords(self, v):
        # least squares coordinates of v in the current basis
        with mpmath.workdps(_DPS):
            b = mpmath.matrix(self.basis)
            gram = b * b.T
            rhs = b * mpmath.matrix(v)
            a = mpmath.lu_solve(gram, rhs)
            resid = mpmath.matrix(v) - b.T * a
            return [a[i] for i in range(len(self.basis))], mpmath.norm(resid)

    def add(self, v, exps):
        with mpmath.workdps(_DPS):
            if mpmath.norm(mpmath.matrix(v)) < self.tol:
                return
            if not self.basis:
                self.basis.append(list(v))
                self.exps.append(list(exps))
                return
            a, resid = self._coords(v)
            if resid > self.tol * (1 + mpmath.norm(mpmath.matrix(v))):
                if len(self.basis) >= self.u:
                    raise ArithmeticError("unit log vectors exceed the unit rank")
                self.basis.append(list(v))
                self.exps.append(list(exps))
                return
            fr = []
            for x in a:
                q = Fraction(str(mpmath.nstr(x, 50))).limit_denominator(10**12)
                if abs(x - mpmath.mpf(q.numerator) / q.denominator) > self.tol * 1e6:
                    raise ArithmeticError("unit coordinates are not rational")
                fr.append(q)
        den = 1
        for q in fr:
            den = den * q.denominator // math.gcd(den, q.denominator)
        if den == 1:
            return
        r = len(self.basis)
        gens = [[den * int(i == j) for j in range(r)] + [int(i == j) for j in range(r + 1)] for i in range(r)]
        gens.append([int(q * den) for q in fr] + [int(j == r) for j in range(r + 1)])
        h = linalg.hnf(gens)
        trans = [row[r:] for row in h[:r]]
        allv = self.basis + [list(v)]
        alle = self.exps + [list(exps)]
        with mpmath.workdps(_DPS):
            self.basis = [[sum(t[k] * allv[k][c] for k in range(r + 1)) for c in range(self.u)] for t in trans]
        self.exps = [[sum(t[k] * alle[k][c] for k in range(r + 1)) for c in range(len(exps))] for t in trans]

    def regulator(self):
        if len(self.basis) < self.u:
            return None
        with mpmath.workdps(_DPS):
            return abs(mpmath.det(mpmath.matrix(self.basis)))


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass
class UnitData:
    """Fundamental units in compact form over the relation elements."""

    exponents: list[list[int]]  # one exponent vector over relation elements per unit
    logs: list[list]
    regulator: float
    explicit: list[list[Fraction] | None]
    norms: list[int]

    @property
    def rank(self) -> int:
        return len(self.exponents)


@dataclass
class ClassGroupData:
    order: NumberFieldOrder
    factor_base: list[PrimeIdeal]
    relation_elements: list[tuple[int, ...]]
    relation_matrix: list[list[int]]
    hnf: list[list[int]]
    hnf_transform: list[list[int]]  # hnf = transform * relation_matrix
    diag: list[int]  # full Smith diagonal, length = len(factor_base)
    snf_v: list[list[int]]
    units: UnitData
    tag: str
    analytic_ratio: float
    bound: int
    aux_primes: list[PrimeIdeal] = field(default_factory=list)
    _prime_rel_cache: dict = field(default_factory=dict, repr=False)
    _elt_cache: dict = field(default_factory=dict, repr=False)

    # -- structure -----------------------------------------------------------
    @property
    def elementary_divisors(self) -> list[int]:
        """Invariants d_1 | d_2 | ... greater than one."""
        return [d for d in self.diag if d > 1]

    @property
    def class_number(self) -> int:
        return math.prod(self.diag)

    @property
    def regulator_estimate(self) -> float:
        return self.units.regulator

    @property
    def two_rank(self) -> int:
        return sum(1 for d in self.elementary_divisors if d % 2 == 0)

    @property
    def cl2_order(self) -> int:
        return 2**self.two_rank

    @property
    def two_part(self) -> list[int]:
        """Elementary divisors of the 2-primary part."""
        out = []
        for d in self.elementary_divisors:
            k = 1
            while d % 2 == 0:
                d //= 2
                k *= 2
            if k > 1:
                out.append(k)
        return out

    @property
    def fb_index(self) -> dict[PrimeIdeal, int]:
        return {P: i for i, P in enumerate(self.factor_base)}

    def _nontrivial(self) -> list[int]:
        return [i for i, d in enumerate(self.diag) if d > 1]

    def dlog_vector(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Class of the factor-base exponent vector in SNF coordinates."""
        n = len(self.factor_base)
        out = []
        for i in self._nontrivial():
            s = sum(vec[k] * self.snf_v[k][i] for k in range(n))
            out.append(s % self.diag[i])
        return tuple(out)

    def is_in_2cl(self, dlog: Sequence[int]) -> bool:
        """Whether a class given in SNF coordinates lies in 2 Cl."""
        return all(x % 2 == 0 for x, d in zip(dlog, self.elementary_divisors) if d % 2 == 0)

    # -- ideals --------------------------------------------------------------
    def ideal_from_vector(self, vec: Sequence[int]) -> FractionalIdeal:
        O = self.order
        out = O.unit_ideal()
        for P, k in zip(self.factor_base, vec):
            if k:
                out = out * (prime_ideal_as_ideal(O, P) ** k)
        return out

    def generators(self) -> list[FractionalIdeal]:
        """One ideal per nontrivial cyclic factor, small exponents modulo relations."""
        vinv = linalg.rat_inverse(self.snf_v)
        gens = []
        for i in self._nontrivial():
            vec = [int(x) for x in vinv[i]]
            gens.append(self.ideal_from_vector(self.reduce_vector(vec)))
        return gens

    def reduce_vector(self, vec: Sequence[int]) -> list[int]:
        """Reduce an exponent vector modulo the relation lattice (HNF rows)."""
        v = list(vec)
        for row in self.hnf:
            c = next(j for j, x in enumerate(row) if x)
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return v

    def prime_relation(self, P: PrimeIdeal) -> list[int]:
        """Factor-base vector y with [P] = [y] (P may lie outside the factor base)."""
        idx = self.fb_index
        if P in idx:
            vec = [0] * len(self.factor_base)
            vec[idx[P]] = 1
            return vec
        if P in self._prime_rel_cache:
            return self._prime_rel_cache[P]
        vec = _smooth_prime_relation(self, P)
        self._prime_rel_cache[P] = vec
        return vec

    def ideal_vector(self, ideal: FractionalIdeal) -> list[int]:
        """Factor-base vector with the same class as the ideal."""
        vec = [0] * len(self.factor_base)
        try:
            fact = ideal.factorization()
        except ArithmeticError as exc:
            raise UnfactorableSupportError(str(exc)) from exc
        for P, k in fact:
            pv = self.prime_relation(P)
            vec = [a + k * b for a, b in zip(vec, pv)]
        return vec

    def ideal_class_dlog(self, ideal: FractionalIdeal) -> tuple[int, ...]:
        return self.dlog_vector(self.ideal_vector(ideal))

    # -- compact elements ----------------------------------------------------
    def solve_relation(self, target: Sequence[int]) -> list[int]:
        """Integer c with c * relation_matrix = target; target must lie in the lattice."""
        z = []
        rem = list(target)
        for row in self.hnf:
            c = next(j for j, x in enumerate(row) if x)
            q, r = divmod(rem[c], row[c])
            if r:
                raise ValueError("vector is not in the relation lattice")
            z.append(q)
            rem = [a - q * b for a, b in zip(rem, row)]
        if any(rem):
            raise ValueError("vector is not in the relation lattice")
        m = len(self.relation_elements)
        return [sum(z[i] * self.hnf_transform[i][k] for i in range(len(z))) for k in range(m)]

    def element_data(self, k: int) -> dict:
        """Cached multiplicative data for relation element k."""
        if k in self._elt_cache:
            return self._elt_cache[k]
        O = self.order
        x = list(self.relation_elements[k])
        data = {"signs": O.real_signs(x), "chars": [character_value(O, Q, x) for Q in self.aux_primes]}
        self._elt_cache[k] = data
        return data

    def expand(self, exps: Sequence[int], max_bits: int = 200000) -> list[Fraction] | None:
        """Exact coordinates of prod x_k^{e_k}, or None when it would be too large."""
        O = self.order
        bits = 0
        for k, e in enumerate(exps):
            if e:
                size = max(abs(c) for c in self.relation_elements[k]) + 1
                bits += abs(e) * (size.bit_length() + abs(O.norm(self.relation_elements[k])).bit_length() + 8)
        if bits > max_bits:
            return None
        num = [1, 0, 0]
        den = [1, 0, 0]
        for k, e in enumerate(exps):
            if e > 0:
                num = O.mul(num, _power(O, self.relation_elements[k], e))
            elif e < 0:
                den = O.mul(den, _power(O, self.relation_elements[k], -e))
        inv = O.inverse(den)
        return [Fraction(x) for x in O.mul([Fraction(c) for c in num], inv)]

    def to_json(self) -> dict:
        return {
            "polynomial": list(self.order.f),
            "disc": self.order.disc,
            "elementary_divisors": self.elementary_divisors,
            "class_number": self.class_number,
            "two_part": self.two_part,
            "regulator": float(self.units.regulator),
            "factor_base": [{"p": P.p, "e": P.e, "f": P.f, "label": P.label} for P in self.factor_base],
            "relations": len(self.relation_elements),
            "tag": self.tag,
            "analytic_ratio": self.analytic_ratio,
            "fundamental_units": [None if e is None else [str(c) for c in e] for e in self.units.explicit],
        }


def _power(O, x, e):
    result = [1, 0, 0]
    base = list(x)
    while e:
        if e & 1:
            result = O.mul(result, base)
        base = O.mul(base, base)
        e >>= 1
    return result


def character_value(O: NumberFieldOrder, Q: PrimeIdeal, x: Sequence[int]) -> int:
    """Quadratic character of a degree-one prime Q at an element coprime to Q, as a bit."""
    lam = O.residue_map(Q)
    r = sum(a * b for a, b in zip(lam, x)) % Q.p
    s = legendre(r, Q.p)
    if s == 0:
        raise ValueError("element not coprime to the auxiliary prime")
    return 0 if s == 1 else 1


# ---------------------------------------------------------------------------
# relation harvesting
# ---------------------------------------------------------------------------

class _Harvester:
    def __init__(self, O: NumberFieldOrder, fb: list[PrimeIdeal]):
        self.O = O
        self.fb = fb
        self.idx = {P: i for i, P in enumerate(fb)}
        self.by_p: dict[int, list[PrimeIdeal]] = {}
        for P in fb:
            self.by_p.setdefault(P.p, []).append(P)
        self.fb_p = sorted(self.by_p)
        self.norm = _norm_evaluator(O)
        self.seen: set[tuple[int, ...]] = set()
        self.examined = 0

    def smooth_part(self, n: int) -> dict[int, int] | None:
        n = abs(n)
        if n == 0:
            return None
        out = {}
        for p in self.fb_p:
            if n % p == 0:
                k = 0
                while n % p == 0:
                    n //= p
                    k += 1
                out[p] = k
                if n == 1:
                    break
        return out if n == 1 else None

    def vector_for(self, x: Sequence[int], fact: dict[int, int]) -> list[int] | None:
        vec = [0] * len(self.fb)
        for p, k in fact.items():
            primes = self.by_p[p]
            if len(primes) == 1:
                P = primes[0]
                if k % P.f:
                    return None
                vec[self.idx[P]] = k // P.f
                continue
            used = 0
            for P in primes[:-1]:
                v = self.O.valuation(x, P)
                vec[self.idx[P]] = v
                used += v * P.f
            last = primes[-1]
            rest = k - used
            if rest < 0 or rest % last.f:
                raise ArithmeticError("inconsistent valuations")
            vec[self.idx[last]] = rest // last.f
        return vec

    def try_element(self, x: Sequence[int]) -> list[int] | None:
        self.examined += 1
        key = tuple(x)
        neg = tuple(-c for c in x)
        if key in self.seen or neg in self.seen or not any(x):
            return None
        n = self.norm(x)
        fact = self.smooth_part(n)
        if fact is None:
            return None
        self.seen.add(key)
        return self.vector_for(x, fact)


def _lattice_walk(O: NumberFieldOrder, rows, max_radius: int = 12):
    lat = reduced_basis(O, rows)
    for radius in range(1, max_radius + 1):
        for a, b, c in _shell(radius):
            yield [a * lat[0][k] + b * lat[1][k] + c * lat[2][k] for k in range(3)]


def _candidate_stream(O: NumberFieldOrder, fb: list[PrimeIdeal], rng: random.Random | None):
    """Round-robin over small elements of O, of factor-base primes and of products of two primes."""
    order = list(range(len(fb)))
    if rng is not None:
        rng.shuffle(order)
    walks = [_lattice_walk(O, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])]
    walks += [_lattice_walk(O, fb[i].hnf) for i in order]
    pairs = []
    for a in range(len(order)):
        i, j = order[a], order[(a + 1) % len(order)]
        if i != j:
            pairs.append((i, j))
    # products of two primes join the rotation after the first pass
    step = 0
    while walks:
        alive = []
        for w in walks:
            x = next(w, None)
            if x is not None:
                alive.append(w)
                yield x
        walks = alive
        step += 1
        if step == 8 and pairs:
            for i, j in pairs:
                prod = prime_ideal_as_ideal(O, fb[i]) * prime_ideal_as_ideal(O, fb[j])
                walks.append(_lattice_walk(O, prod.hnf))


def _factor_base(O: NumberFieldOrder, bound: int) -> list[PrimeIdeal]:
    fb = []
    for p in primes_up_to(bound):
        fb.extend(O.prime_decomposition(p))
    return fb


def _aux_primes(O: NumberFieldOrder, start: int, count: int) -> list[PrimeIdeal]:
    out = []
    q = start
    disc_f = O.poly_disc
    while len(out) < count:
        q += 1
        if not _is_small_prime(q) or disc_f % q == 0:
            continue
        for Q in O.prime_decomposition(q):
            if Q.f == 1:
                out.append(Q)
                break
    return out


def _is_small_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _smooth_prime_relation(cg: ClassGroupData, P: PrimeIdeal) -> list[int]:
    """Find x in P with (x) = P * (factor-base ideal); return the vector of P's class."""
    O = cg.order
    h = _Harvester(O, cg.factor_base)
    lat = reduced_basis(O, P.hnf)
    for radius in range(1, 13):
        for a, b, c in _shell(radius):
            x = [a * lat[0][k] + b * lat[1][k] + c * lat[2][k] for k in range(3)]
            n = abs(h.norm(x))
            if n == 0 or n % P.norm:
                continue
            rest = n // P.norm
            if rest % P.p == 0:
                continue
            fact = h.smooth_part(rest)
            if fact is None:
                continue
            vec = h.vector_for(x, fact)
            if vec is None:
                continue
            return [-v for v in vec]
    raise ClassGroupError(f"no smooth element found for {P}")


def _two_saturation_rank(O, elements, matrix, aux, n_fb) -> int:
    """F_2-rank of the sign/character image of relation combinations with even valuations."""
    r1 = O.signature[0]
    vals = [linalg.f2_pack([v & 1 for v in row]) for row in matrix] + [0]
    combos = linalg.f2_kernel(vals)
    images = []
    data = []
    for x in elements:
        signs = O.real_signs(list(x))
        bits = [0 if s > 0 else 1 for s in signs] + [character_value(O, Q, x) for Q in aux]
        data.append(linalg.f2_pack(bits))
    # -1: negative at every real place; character (-1 | q)
    data.append(linalg.f2_pack([1] * r1 + [0 if Q.p % 4 == 1 else 1 for Q in aux]))
    for mask in combos:
        images.append(linalg.f2_combine(mask, data))
    return linalg.f2_rank(images)


def _finish(O, fb, elements, rows, cfg, bound, aux):
    """Try to build the class group from the current relations; None if a gate fails."""
    n = len(fb)
    m = len(rows)
    aug = [list(rows[i]) + [int(i == j) for j in range(m)] for i in range(m)]
    h = linalg.hnf(aug)
    lead = [next(j for j, x in enumerate(r) if x) for r in h]
    top = [r for r, c in zip(h, lead) if c < n]
    if len(top) < n:
        return None, {"reason": "relation matrix not of full rank", "rank": len(top)}
    kernel = [r[n:] for r, c in zip(h, lead) if c >= n]
    hmat = [r[:n] for r in top]
    trans = [r[n:] for r in top]
    u = O.unit_rank
    lat = _UnitLattice(u, mpmath.mpf(10) ** (-30))
    logs = [_log_vector(O, x, u) for x in elements]
    for kv in kernel:
        with mpmath.workdps(_DPS):
            v = [sum(kv[k] * logs[k][c] for k in range(m) if kv[k]) for c in range(u)]
        lat.add(v, kv)
    reg = lat.regulator()
    if reg is None:
        return None, {"reason": "unit rank not reached", "found": len(lat.basis)}
    h_prime = 1
    for i in range(n):
        h_prime *= hmat[i][i]
    est = analytic_hR(O, cfg.euler_bound)
    ratio = float(h_prime * reg) / est
    if ratio > 1.45:
        return None, {"reason": "analytic ratio too large", "ratio": ratio, "h": h_prime}
    if ratio < 0.7:
        return "enlarge", {"reason": "analytic ratio too small", "ratio": ratio, "h": h_prime}
    diag, _, v = linalg.snf(hmat)
    two_rank = sum(1 for d in diag if d % 2 == 0)
    sat = _two_saturation_rank(O, elements, rows, aux, n)
    if sat != 1 + u + two_rank:
        return None, {"reason": "not 2-saturated", "observed": sat, "expected": 1 + u + two_rank}
    return (hmat, trans, diag, v, lat, ratio), {}


def _unit_data(O: NumberFieldOrder, lat: _UnitLattice, elements, cg_stub) -> UnitData:
    u = O.unit_rank
    exps = [list(e) for e in lat.exps]
    logs = [list(b) for b in lat.basis]
    if u == 1:
        # normalise so that |sigma_1(eps)| < 1
        if logs[0][0] > 0:
            exps[0] = [-c for c in exps[0]]
            logs[0] = [-c for c in logs[0]]
    explicit = []
    norms = []
    for e in exps:
        val = cg_stub.expand(e, max_bits=20000)
        if val is not None:
            if any(c.denominator != 1 for c in val):
                raise ArithmeticError("unit is not integral")
            nrm = O.norm([int(c) for c in val])
            if abs(nrm) != 1:
                raise ArithmeticError("unit norm is not +-1")
            signs = O.real_signs([int(c) for c in val])
            if signs[0] < 0:
                val = [-c for c in val]
                nrm = -nrm
            norms.append(int(nrm))
        else:
            norms.append(0)
        explicit.append(val)
    reg = float(lat.regulator())
    return UnitData(exps, logs, reg, explicit, norms)


_CACHE: OrderedDict = OrderedDict()
_CACHE_SIZE = 256


def class_group(O: NumberFieldOrder, config: ClassGroupConfig | None = None) -> ClassGroupData:
    cfg = config or ClassGroupConfig()
    key = (O.f, cfg)
    if key in _CACHE:
        _CACHE.move_to_end(key)
        return _CACHE[key]
    if abs(O.disc) > cfg.max_disc:
        raise ClassGroupError(f"|disc| = {abs(O.disc)} exceeds the configured bound {cfg.max_disc}")
    logd = math.log(abs(O.disc))
    bound = max(cfg.factor_base_min, int(cfg.factor_base_multiplier * logd * logd))
    rng = random.Random(cfg.shuffle_seed) if cfg.shuffle_seed is not None else None
    last_report: dict = {}
    for _attempt in range(4):
        fb = _factor_base(O, bound)
        if rng is not None:
            rng.shuffle(fb)
        harvester = _Harvester(O, fb)
        elements: list[tuple[int, ...]] = []
        rows: list[list[int]] = []
        # the rational primes themselves
        for p in sorted({P.p for P in fb}):
            vec = harvester.try_element([p, 0, 0])
            if vec is not None:
                elements.append((p, 0, 0))
                rows.append(vec)
        aux = _aux_primes(O, bound, cfg.aux_characters)
        target = len(fb) + cfg.extra_relations
        result = None
        stable_key = None
        stream = _candidate_stream(O, fb, rng)
        enlarge = False
        for x in stream:
            if harvester.examined > cfg.relation_budget:
                break
            vec = harvester.try_element(x)
            if vec is None:
                continue
            elements.append(tuple(x))
            rows.append(vec)
            if len(rows) < target:
                continue
            els, rs = elements, rows
            if rng is not None:
                perm = list(range(len(elements)))
                rng.shuffle(perm)
                els = [elements[i] for i in perm]
                rs = [rows[i] for i in perm]
            res, rep = _finish(O, fb, els, rs, cfg, bound, aux)
            last_report = rep
            if res == "enlarge":
                enlarge = True
                break
            if res is None:
                target = len(rows) + cfg.extra_relations
                stable_key = None
                continue
            hmat, trans, diag, v, lat, ratio = res
            key_now = (tuple(diag), round(float(lat.regulator()), 6))
            if stable_key == key_now:
                result = (els, rs, hmat, trans, diag, v, lat, ratio)
                break
            stable_key = key_now
            target = len(rows) + cfg.extra_relations
        if result is not None:
            break
        if not enlarge:
            raise ClassGroupError(
                f"relation budget exhausted for f = {O.f}", {"bound": bound, "relations": len(rows), **last_report})
        bound *= 2
    else:
        raise ClassGroupError(f"factor base enlargement failed for f = {O.f}", last_report)
    els, rs, hmat, trans, diag, v, lat, ratio = result
    mink = minkowski_bound(O)
    cg = ClassGroupData(order=O, factor_base=fb, relation_elements=list(els), relation_matrix=rs,
                        hnf=hmat, hnf_transform=trans, diag=diag, snf_v=v, units=None, tag="heuristic",
                        analytic_ratio=ratio, bound=bound, aux_primes=aux)
    cg.units = _unit_data(O, lat, els, cg)
    tag = "heuristic"
    if bound >= mink:
        tag = "certified"
    elif cfg.certify_flag:
        _verify_generation(cg, mink)
        tag = "certified"
    elif cfg.grh_flag:
        _verify_generation(cg, bach_bound(O))
        tag = "GRH-conditional"
    cg.tag = tag
    _CACHE[key] = cg
    while len(_CACHE) > _CACHE_SIZE:
        _CACHE.popitem(last=False)
    return cg


def _verify_generation(cg: ClassGroupData, limit: float) -> None:
    """Show every prime of norm at most limit has a class in the factor-base subgroup."""
    O = cg.order
    for p in primes_up_to(int(limit)):
        if p <= cg.bound:
            continue
        for P in O.prime_decomposition(p):
            if P.norm <= limit:
                cg.prime_relation(P)


def fundamental_units(O: NumberFieldOrder, config: ClassGroupConfig | None = None) -> UnitData:
    return class_group(O, config).units


def two_torsion_basis(cg: ClassGroupData) -> list[tuple[list[int], list[int]]]:
    """Pairs (factor-base vector a, exponents c) with 2a = c * relations, classes of a spanning Cl[2].

    The ideal is I = prod P^a and gamma = prod x_k^{c_k} satisfies I^2 = (gamma).
    """
    vinv = linalg.rat_inverse(cg.snf_v)
    out = []
    for i, d in enumerate(cg.diag):
        if d % 2:
            continue
        gen = [int(x) for x in vinv[i]]
        a = cg.reduce_vector([(d // 2) * x for x in gen])
        c = cg.solve_relation([2 * x for x in a])
        out.append((a, c))
    return out
