"""Exact linear algebra over Z, Q, F_p and F_2.

Integer matrices are lists of rows of Python ints.  Lattices are always
spanned by *rows*.  F_2 vectors are packed into Python ints (bit i is
coordinate i), which keeps the Monte Carlo model and the Selmer linear
algebra fast without numpy object arrays.
"""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v: Sequence, a: Sequence[Sequence]) -> list:
    n = len(a[0]) if a else 0
    out = [0] * n
    for c, row in zip(v, a):
        if c:
            for j in range(n):
                out[j] += c * row[j]
    return out


# ---------------------------------------------------------------------------
# Hermite normal form
# ---------------------------------------------------------------------------

def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows: upper echelon, positive pivots, entries above a
    pivot reduced into [0, pivot).
    """
    a = [list(map(int, r)) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    out: Matrix = []
    col = 0
    while a and col < ncols:
        nz = [r for r in a if r[col] != 0]
        zero = [r for r in a if r[col] == 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                if r2[col] != 0:
                    rest.append(r2)
                elif any(r2):
                    zero.append(r2)
            nz = [piv] + rest
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        a = zero
        col += 1
    # reduce above pivots
    for i in range(len(out)):
        c = next(j for j, x in enumerate(out[i]) if x)
        p = out[i][c]
        for k in range(i):
            q = out[k][c] // p
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def hnf_square(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """HNF of a full-rank sublattice of Z^n as an n x n upper triangular matrix."""
    h = hnf(rows)
    if len(h) != n or any(h[i][i] == 0 for i in range(n)):
        raise ValueError("lattice is not of full rank")
    return h


def hnf_mod(rows: Sequence[Sequence[int]], n: int, d: int) -> Matrix:
    """HNF of the lattice spanned by rows together with d Z^n (d > 0 a multiple of the det)."""
    gens = [list(r) for r in rows] + [[d * int(i == j) for j in range(n)] for i in range(n)]
    return hnf_square(gens, n)


def integer_kernel(a: Sequence[Sequence[int]]) -> Matrix:
    """Basis of {c in Z^R : c . A = 0} for an R x k integer matrix A."""
    r = len(a)
    if r == 0:
        return []
    k = len(a[0])
    aug = [list(map(int, a[i])) + [int(i == j) for j in range(r)] for i in range(r)]
    rows = aug
    for col in range(k):
        nz = [x for x in rows if x[col] != 0]
        zero = [x for x in rows if x[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda x: abs(x[col]))
            piv = nz[0]
            rest = []
            for x in nz[1:]:
                q = x[col] // piv[col]
                y = [s - q * t for s, t in zip(x, piv)]
                (rest if y[col] else zero).append(y)
            nz = [piv] + rest
        rows = zero  # the pivot row is not in the kernel; drop it
    return hnf([x[k:] for x in rows])


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def snf(a: Sequence[Sequence[int]]) -> tuple[list[int], Matrix, Matrix]:
    """Smith normal form U A V = D.

    Returns (diag, U, V) where diag lists the diagonal of D (length
    min(rows, cols), each dividing the next, nonnegative), U is rows x rows
    and V is cols x cols, both unimodular.
    """
    m = [list(map(int, r)) for r in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = identity(nr)
    v = identity(nc)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row dst += c * row src
        if c:
            m[dst] = [x + c * y for x, y in zip(m[dst], m[src])]
            u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, c):
        if c:
            for row in m:
                row[dst] += c * row[src]
            for row in v:
                row[dst] += c * row[src]

    t = 0
    while t < min(nr, nc):
        # choose the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, nr):
            row = m[i]
            for j in range(t, nc):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = m[t][t]
            done = True
            for i in range(t + 1, nr):
                if m[i][t]:
                    q = m[i][t] // piv
                    add_row(i, t, -q)
                    if m[i][t]:
                        done = False
            for j in range(t + 1, nc):
                if m[t][j]:
                    q = m[t][j] // piv
                    add_col(j, t, -q)
                    if m[t][j]:
                        done = False
            if done:
                # divisibility condition on the remaining block
                bad = None
                for i in range(t + 1, nr):
                    if any(x % piv for x in m[i][t + 1:]):
                        bad = i
                        break
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # move the smallest entry of row/col t to the pivot
            cands = [(abs(m[i][t]), i, t) for i in range(t, nr) if m[i][t]]
            cands += [(abs(m[t][j]), t, j) for j in range(t, nc) if m[t][j]]
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    diag = [m[i][i] for i in range(min(nr, nc))]
    return diag, u, v


# ---------------------------------------------------------------------------
# rational matrices
# ---------------------------------------------------------------------------

def rat_inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def int_det(a: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    m = [list(map(int, r)) for r in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k]), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det3(a) -> int:
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


# ---------------------------------------------------------------------------
# F_p
# ---------------------------------------------------------------------------

def rref_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form mod p; returns (nonzero rows, pivot columns)."""
    a = [[x % p for x in r] for r in rows]
    if not a:
        return [], []
    nc = len(a[0])
    piv_cols = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], piv_cols


def rank_mod_p(rows, p: int) -> int:
    return len(rref_mod_p(rows, p)[0])


def left_kernel_mod_p(a: Sequence[Sequence[int]], p: int) -> Matrix:
    """Basis of {x : x A = 0 mod p} for an R x k matrix A."""
    if not a:
        return []
    return right_kernel_mod_p(transpose(a), p)


def right_kernel_mod_p(a: Sequence[Sequence[int]], p: int) -> Matrix:
    """Basis of {x : A x = 0 mod p} (vectors as rows)."""
    if not a:
        return []
    nc = len(a[0])
    red, piv = rref_mod_p(a, p)
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for f in free:
        x = [0] * nc
        x[f] = 1
        for row, c in zip(red, piv):
            x[c] = (-row[f]) % p
        basis.append(x)
    return basis


def solve_mod_p(a: Sequence[Sequence[int]], b: Sequence[int], p: int) -> list[int] | None:
    """One solution x of x A = b mod p, or None."""
    r = len(a)
    rows = [list(col) + [bv] for col, bv in zip(transpose(a), b)]
    red, piv = rref_mod_p(rows, p)
    if r in piv:
        return None
    x = [0] * r
    for row, c in zip(red, piv):
        x[c] = row[r] % p
    return x


# ---------------------------------------------------------------------------
# F_2 with bit-packed rows
# ---------------------------------------------------------------------------

class F2Basis:
    """Incremental echelon basis of a subspace of F_2^n (vectors as ints).

    Each stored vector remembers the combination of inserted vectors that
    produced it, so membership tests can return an explicit witness.
    """

    def __init__(self):
        self.pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, combination)
        self.count = 0

    def reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        while v:
            top = v.bit_length() - 1
            ent = self.pivots.get(top)
            if ent is None:
                break
            v ^= ent[0]
            combo ^= ent[1]
        return v, combo

    def add(self, v: int) -> bool:
        """Insert v; return True if it was independent."""
        idx = self.count
        self.count += 1
        r, combo = self.reduce(v)
        if r:
            self.pivots[r.bit_length() - 1] = (r, combo ^ (1 << idx))
            return True
        return False

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def witness(self, v: int) -> int | None:
        """Bit mask of inserted vectors summing to v, or None if v is outside the span."""
        r, combo = self.reduce(v)
        return combo if r == 0 else None

    @property
    def rank(self) -> int:
        return len(self.pivots)


def f2_rank(vectors: Sequence[int]) -> int:
    b = F2Basis()
    for v in vectors:
        b.add(v)
    return b.rank


def f2_kernel(vectors: Sequence[int]) -> list[int]:
    """Basis (as index bit masks) of the relations sum_{i in S} vectors[i] = 0."""
    b = F2Basis()
    out = []
    for i, v in enumerate(vectors):
        r, combo = b.reduce(v)
        if r:
            b.pivots[r.bit_length() - 1] = (r, combo ^ (1 << i))
        else:
            out.append(combo ^ (1 << i))
        b.count += 1
    return out


def f2_pack(bits: Sequence[int]) -> int:
    v = 0
    for i, x in enumerate(bits):
        if x & 1:
            v |= 1 << i
    return v


def f2_unpack(v: int, n: int) -> list[int]:
    return [(v >> i) & 1 for i in range(n)]


def f2_combine(mask: int, vectors: Sequence[int]) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out ^= vectors[i]
        mask >>= 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# lattice reduction
# ---------------------------------------------------------------------------

def _nearest(x) -> int:
    if isinstance(x, (int, Fraction)):
        return round(x)
    import mpmath
    return int(mpmath.nint(x))


def lll_gram(gram: Sequence[Sequence], delta: Fraction = Fraction(3, 4), max_steps: int | None = None) -> Matrix:
    """LLL reduction for a positive definite Gram matrix.

    Entries may be Fractions (exact) or mpmath numbers (floating).  Returns
    the unimodular transform T (rows = new basis in old coordinates), so the
    reduced Gram matrix is T G T^t.  The Gram matrix is updated in place and
    the Gram-Schmidt data recomputed after every change; meant for small
    dimensions.  With ``max_steps`` the loop stops early and returns the
    partial transform, which callers can refine from exact data.
    """
    n = len(gram)
    g = [list(row) for row in gram]
    t = identity(n)
    if not all(isinstance(x, (int, Fraction)) for row in g for x in row):
        import mpmath
        delta = mpmath.mpf(delta.numerator) / delta.denominator

    def gso():
        mu = [[0] * n for _ in range(n)]
        bstar = [0] * n
        for i in range(n):
            for j in range(i):
                s = g[i][j] - sum(mu[j][k] * mu[i][k] * bstar[k] for k in range(j))
                mu[i][j] = s / bstar[j]
            bstar[i] = g[i][i] - sum(mu[i][k] ** 2 * bstar[k] for k in range(i))
        return mu, bstar

    k = 1
    steps = 0
    mu, bstar = gso()
    while k < n:
        steps += 1
        if max_steps is not None and steps > max_steps:
            break
        for j in range(k - 1, -1, -1):
            q = _nearest(mu[k][j])
            if q:
                t[k] = [x - q * y for x, y in zip(t[k], t[j])]
                g[k] = [x - q * y for x, y in zip(g[k], g[j])]
                for row in g:
                    row[k] -= q * row[j]
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            t[k], t[k - 1] = t[k - 1], t[k]
            g[k], g[k - 1] = g[k - 1], g[k]
            for row in g:
                row[k], row[k - 1] = row[k - 1], row[k]
            mu, bstar = gso()
            k = max(k - 1, 1)
    return t
