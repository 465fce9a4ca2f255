"""Dense univariate polynomials over Z/p^k as coefficient lists.

Coefficients are stored lowest degree first.  Only what the Kummer and cubic
code needs: arithmetic, gcd, factorization over prime fields (square-free,
distinct-degree, equal-degree splitting) and Hensel lifting of coprime
factorizations.
"""

from __future__ import annotations

import random
from collections.abc import Sequence

Poly = list[int]


def trim(f: Sequence[int], m: int) -> Poly:
    out = [c % m for c in f]
    while out and out[-1] == 0:
        out.pop()
    return out


def deg(f: Sequence[int]) -> int:
    return len(f) - 1


def add(f: Sequence[int], g: Sequence[int], m: int) -> Poly:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)], m)


def sub(f: Sequence[int], g: Sequence[int], m: int) -> Poly:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0) for i in range(n)], m)


def mul(f: Sequence[int], g: Sequence[int], m: int) -> Poly:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out, m)


def scale(f: Sequence[int], c: int, m: int) -> Poly:
    return trim([c * a for a in f], m)


def divmod_poly(f: Sequence[int], g: Sequence[int], m: int) -> tuple[Poly, Poly]:
    """Division with remainder; the leading coefficient of g must be a unit mod m."""
    g = trim(g, m)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(f, m)
    inv = pow(g[-1], -1, m)
    q = [0] * max(len(r) - len(g) + 1, 0)
    while len(r) >= len(g):
        c = r[-1] * inv % m
        shift = len(r) - len(g)
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = (r[shift + i] - c * b) % m
        r = trim(r, m)
    return trim(q, m), r


def mod(f: Sequence[int], g: Sequence[int], m: int) -> Poly:
    return divmod_poly(f, g, m)[1]


def monic(f: Sequence[int], p: int) -> Poly:
    f = trim(f, p)
    if not f:
        return f
    return scale(f, pow(f[-1], -1, p), p)


def gcd(f: Sequence[int], g: Sequence[int], p: int) -> Poly:
    a, b = trim(f, p), trim(g, p)
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p)


def xgcd(f: Sequence[int], g: Sequence[int], p: int) -> tuple[Poly, Poly, Poly]:
    """Return (d, s, t) with s f + t g = d monic, over the field F_p."""
    r0, r1 = trim(f, p), trim(g, p)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = divmod_poly(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return scale(r0, inv, p), scale(s0, inv, p), scale(t0, inv, p)


def powmod(f: Sequence[int], e: int, g: Sequence[int], m: int) -> Poly:
    result: Poly = [1]
    base = mod(f, g, m)
    while e:
        if e & 1:
            result = mod(mul(result, base, m), g, m)
        base = mod(mul(base, base, m), g, m)
        e >>= 1
    return mod(result, g, m)


def derivative(f: Sequence[int], m: int) -> Poly:
    return trim([i * f[i] for i in range(1, len(f))], m)


def evaluate(f: Sequence[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % m
    return acc


def _pth_root(f: Poly, p: int) -> Poly:
    # f' = 0 over F_p: f(x) = g(x^p) and g^p = f since coefficients are in F_p
    return [f[i] for i in range(0, len(f), p)]


def squarefree_factorization(f: Sequence[int], p: int) -> list[tuple[Poly, int]]:
    """Yun's algorithm over F_p: list of (square-free monic factor, multiplicity)."""
    f = monic(f, p)
    out: list[tuple[Poly, int]] = []
    if len(f) <= 1:
        return out
    df = derivative(f, p)
    if not df:
        return [(g, e * p) for g, e in squarefree_factorization(_pth_root(f, p), p)]
    c = gcd(f, df, p)
    w = divmod_poly(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = gcd(w, c, p)
        z = divmod_poly(w, y, p)[0]
        if len(z) > 1:
            out.append((monic(z, p), i))
        i += 1
        w = y
        c = divmod_poly(c, y, p)[0]
    if len(c) > 1:
        for g, e in squarefree_factorization(_pth_root(c, p), p):
            out.append((g, e * p))
    return out


def distinct_degree(f: Sequence[int], p: int) -> list[tuple[Poly, int]]:
    """For square-free monic f, the products of irreducible factors of each degree."""
    f = monic(f, p)
    out = []
    h = [0, 1]
    d = 0
    while 2 * (d + 1) <= deg(f):
        d += 1
        h = powmod(h, p, f, p)
        g = gcd(f, sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            f = divmod_poly(f, g, p)[0]
            h = mod(h, f, p)
    if len(f) > 1:
        out.append((f, deg(f)))
    return out


def equal_degree(f: Sequence[int], d: int, p: int, rng: random.Random | None = None) -> list[Poly]:
    """Cantor-Zassenhaus splitting of a product of degree-d irreducibles over F_p."""
    f = monic(f, p)
    n = deg(f)
    if n == d:
        return [f]
    if p <= 3 and p ** d <= 64:
        # tiny fields: brute force over monic degree-d polynomials
        out = []
        rest = f
        for cand in _monic_polys(d, p):
            if len(rest) == 1:
                break
            while True:
                q, r = divmod_poly(rest, cand, p)
                if r:
                    break
                out.append(cand)
                rest = q
        return out
    rng = rng or random.Random(12345 + p + n)
    while True:
        a = trim([rng.randrange(p) for _ in range(n)], p)
        if len(a) <= 1:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            t, b = list(a), list(a)
            for _ in range(d - 1):
                b = powmod(b, 2, f, p)
                t = add(t, b, p)
            g = gcd(f, t, p)
        else:
            b = powmod(a, (p**d - 1) // 2, f, p)
            g = gcd(f, sub(b, [1], p), p)
        if 1 < len(g) < len(f):
            return equal_degree(g, d, p, rng) + equal_degree(divmod_poly(f, g, p)[0], d, p, rng)


def _monic_polys(d: int, p: int):
    for k in range(p**d):
        coeffs = []
        for _ in range(d):
            coeffs.append(k % p)
            k //= p
        yield coeffs + [1]


def factor_mod_p(f: Sequence[int], p: int) -> list[tuple[Poly, int]]:
    """Complete factorization over F_p into monic irreducibles with multiplicities.

    Factors are sorted by (degree, coefficients) so the output is canonical.
    """
    out = []
    for g, e in squarefree_factorization(f, p):
        for h, d in distinct_degree(g, p):
            for irr in equal_degree(h, d, p):
                out.append((irr, e))
    out.sort(key=lambda t: (len(t[0]), t[0][::-1], t[1]))
    return out


def roots_mod_p(f: Sequence[int], p: int) -> list[int]:
    """Distinct roots in F_p, sorted."""
    f = monic(f, p)
    if len(f) <= 1:
        return []
    if p < 50:
        return [x for x in range(p) if evaluate(f, x, p) == 0]
    g = gcd(f, sub(powmod([0, 1], p, f, p), [0, 1], p), p)
    if len(g) <= 1:
        return []
    return sorted((-h[0]) % p for h in equal_degree(g, 1, p))


def hensel_lift(f: Sequence[int], factors: Sequence[Sequence[int]], p: int, k: int) -> list[Poly]:
    """Lift a factorization of monic f into pairwise coprime monic factors mod p to mod p^k."""
    factors = [monic(g, p) for g in factors]
    if len(factors) == 1:
        return [trim(f, p**k)]
    g = factors[0]
    h: Poly = [1]
    for other in factors[1:]:
        h = mul(h, other, p)
    g_lift, h_lift = _hensel_pair(f, g, h, p, k)
    return [g_lift] + hensel_lift(h_lift, factors[1:], p, k)


def _hensel_pair(f: Sequence[int], g: Poly, h: Poly, p: int, k: int) -> tuple[Poly, Poly]:
    d, s, t = xgcd(g, h, p)
    if d != [1]:
        raise ValueError("Hensel lifting needs coprime factors")
    m = p
    while m < p**k:
        m2 = min(m * m, p**k)
        e = sub(f, mul(g, h, m2), m2)
        q, r = divmod_poly(mul(s, e, m2), h, m2)
        g = add(g, add(mul(t, e, m2), mul(q, g, m2), m2), m2)
        h = add(h, r, m2)
        # lift the Bezout identity s g + t h = 1 as well
        b = sub(add(mul(s, g, m2), mul(t, h, m2), m2), [1], m2)
        c, d = divmod_poly(mul(s, b, m2), h, m2)
        s = sub(s, d, m2)
        t = sub(t, add(mul(t, b, m2), mul(c, g, m2), m2), m2)
        m = m2
    return trim(g, p**k), trim(h, p**k)


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    fac = factor_mod_p(f, p)
    return len(fac) == 1 and fac[0][1] == 1
