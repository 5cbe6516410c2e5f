"""Factorization of univariate rational polynomials.

Route: content/primitive part, Yun squarefree decomposition, factorization of
the squarefree primitive integer part by Berlekamp mod a good small prime,
quadratic Hensel lifting past the Mignotte bound, and subset recombination.
Degrees in this package stay at group-algebra scale, so the naive subset
search is fine.

Polynomials are coefficient lists in ascending order; rational polynomials
use Fraction entries, integer polynomials plain ints.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt

from .modp import berlekamp_factor, poly_gcd as fp_gcd, poly_mul as fp_mul, poly_trim

Q = Fraction


def qtrim(f: list[Q]) -> list[Q]:
    while f and f[-1] == 0:
        f.pop()
    return f


def qmul(f, g):
    if not f or not g:
        return []
    out = [Q(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] += a * b
    return qtrim(out)


def qdivmod(f, g):
    f = list(f)
    if not g:
        raise ZeroDivisionError
    q = [Q(0)] * max(len(f) - len(g) + 1, 0)
    inv = 1 / g[-1]
    while len(f) >= len(g) and f:
        c = f[-1] * inv
        d = len(f) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] -= c * b
        qtrim(f)
    return qtrim(q), f


def qgcd(f, g):
    f, g = qtrim(list(f)), qtrim(list(g))
    while g:
        f, g = g, qdivmod(f, g)[1]
    if f:
        inv = 1 / f[-1]
        f = [x * inv for x in f]
    return f


def qderiv(f):
    return qtrim([i * f[i] for i in range(1, len(f))])


def qmonic(f):
    if not f:
        return f
    inv = 1 / f[-1]
    return [x * inv for x in f]


def qeval(f, x: Q) -> Q:
    acc = Q(0)
    for c in reversed(f):
        acc = acc * x + c
    return acc


def _to_primitive_int(f: list[Q]) -> tuple[Q, list[int]]:
    """f = content * primitive with primitive an integer poly of positive lc."""
    den = 1
    for c in f:
        den = den * c.denominator // gcd(den, c.denominator)
    zi = [int(c * den) for c in f]
    g = 0
    for c in zi:
        g = gcd(g, abs(c))
    if g == 0:
        return Q(0), []
    if zi[-1] < 0:
        g = -g
    return Q(g, den), [c // g for c in zi]


def _iz_mul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] += a * b
    return out


def _iz_divides(f, g) -> list[int] | None:
    """Exact integer polynomial quotient f/g, or None."""
    f = list(f)
    if not g:
        return None
    q = [0] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and f:
        if f[-1] % g[-1] != 0:
            return None
        c = f[-1] // g[-1]
        d = len(f) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] -= c * b
        while f and f[-1] == 0:
            f.pop()
    return q if not f else None


def _primitive_int(f: list[int]) -> list[int]:
    g = 0
    for c in f:
        g = gcd(g, abs(c))
    if g == 0:
        return []
    if f[-1] < 0:
        g = -g
    return [c // g for c in f]


def _sym(x: int, m: int) -> int:
    x %= m
    return x - m if x > m // 2 else x


def _hensel_pair(f, g, h, s, t, p, steps):
    """Lift f ≡ g*h (mod p), s*g + t*h ≡ 1 (mod p), h monic, through `steps`
    quadratic steps.  Returns (g, h) mod p^(2^steps)."""
    m = p
    for _ in range(steps):
        m2 = m * m

        def red(poly):
            return [(_sym(c, m2)) for c in poly]

        def mul(a, b):
            return [_sym(c, m2) for c in _iz_mul(a, b)] if a and b else []

        def sub(a, b):
            n = max(len(a), len(b))
            return [
                _sym((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0), m2)
                for i in range(n)
            ]

        def trim(a):
            while a and a[-1] == 0:
                a.pop()
            return a

        def divmod_monic(a, b):
            # b monic mod m2 (leading coefficient invertible; here exactly 1)
            a = list(a)
            q = [0] * max(len(a) - len(b) + 1, 0)
            binv = pow(b[-1], -1, m2)
            while len(a) >= len(b) and a:
                c = _sym(a[-1] * binv, m2)
                d = len(a) - len(b)
                q[d] = c
                for i, bb in enumerate(b):
                    a[d + i] = _sym(a[d + i] - c * bb, m2)
                trim(a)
            return q, a

        e = trim(sub(f, _iz_mul(g, h)))
        qq, r = divmod_monic(trim([_sym(c, m2) for c in _iz_mul(s, e)]), h)
        h_new = trim(sub(h, [-c for c in r]))          # h + r
        g_new = trim(
            [
                _sym(a + b + c, m2)
                for a, b, c in _zip3(g, _iz_mul(t, e), _iz_mul(qq, g))
            ]
        )
        # lift the Bezout pair
        e2 = trim(sub(trim([_sym(c, m2) for c in _pluseq(_iz_mul(s, g_new), _iz_mul(t, h_new))]), [1]))
        q2, r2 = divmod_monic(trim([_sym(c, m2) for c in _iz_mul(s, e2)]), h_new)
        s_new = trim(sub(s, r2))
        t_new = trim(sub(t, trim([_sym(c, m2) for c in _pluseq(_iz_mul(t, e2), _iz_mul(q2, g_new))])))
        g, h, s, t = g_new, h_new, s_new, t_new
        m = m2
    return g, h, m


def _zip3(a, b, c):
    n = max(len(a), len(b), len(c))
    for i in range(n):
        yield (a[i] if i < len(a) else 0, b[i] if i < len(b) else 0, c[i] if i < len(c) else 0)


def _pluseq(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _lift_tree(f: list[int], factors: list[list[int]], p: int, steps: int) -> list[list[int]]:
    """Lift the mod-p factorization lc(f)*prod(factors) of f to mod p^(2^steps).

    Returns monic factors mod the lifted modulus.
    """
    m_target = p ** (2**steps)
    if len(factors) == 1:
        linv = pow(f[-1] % m_target, -1, m_target)
        return [[_sym(c * linv, m_target) if i < len(f) - 1 else 1 for i, c in enumerate(f)]]
    mid = len(factors) // 2
    g0 = [f[-1] % p]
    for fac in factors[:mid]:
        g0 = [c % p for c in _iz_mul(g0, fac)]
    h0 = [1]
    for fac in factors[mid:]:
        h0 = [c % p for c in _iz_mul(h0, fac)]
    s, t = _fp_bezout(g0, h0, p)
    g, h, m = _hensel_pair([_sym(c, m_target) for c in f], _symp(g0, p), _symp(h0, p), _symp(s, p), _symp(t, p), p, steps)
    out = []
    out.extend(_lift_tree(g, factors[:mid], p, steps))
    out.extend(_lift_tree(h, factors[mid:], p, steps))
    return out


def _symp(f, p):
    return [_sym(c, p) for c in f]


def _fp_bezout(g, h, p):
    """s, t with s*g + t*h ≡ 1 mod p for coprime g, h."""
    r0, r1 = [c % p for c in g], [c % p for c in h]
    s0, s1 = [1], []
    t0, t1 = [], [1]
    from .modp import poly_divmod as fpdivmod, poly_sub as fpsub

    while poly_trim(r1):
        q, r = fpdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, fpsub(s0, fp_mul(q, s1, p), p)
        t0, t1 = t1, fpsub(t0, fp_mul(q, t1, p), p)
    c = pow(r0[0], -1, p)
    return [x * c % p for x in s0], [x * c % p for x in t0]


def _factor_squarefree_primitive(f: list[int]) -> list[list[int]]:
    """Irreducible integer factors of a squarefree primitive integer poly."""
    n = len(f) - 1
    if n <= 1:
        return [f] if n == 1 else []
    # choose a prime keeping f squarefree with unit leading coefficient
    p = None
    for cand in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 2):
        if f[-1] % cand == 0:
            continue
        fp = [c % cand for c in f]
        dfp = poly_trim([(i * f[i]) % cand for i in range(1, len(f))])
        if fp_gcd(fp, dfp, cand) == [1]:
            p = cand
            break
    if p is None:
        raise ArithmeticError("no good prime found for factorization")
    modular = berlekamp_factor([c % p for c in f], p)
    if len(modular) == 1:
        return [f]
    # Mignotte-style bound on coefficients of lc(f) * (any true factor)
    norm2 = isqrt(sum(c * c for c in f)) + 1
    bound = 2 ** (n + 1) * norm2 * abs(f[-1])
    steps = 0
    while p ** (2**steps) <= 2 * bound:
        steps += 1
    lifted = _lift_tree(f, modular, p, steps)
    m = p ** (2**steps)

    result = []
    rest = list(f)
    avail = list(range(len(lifted)))
    size = 1
    while 2 * size <= len(avail):
        found = True
        while found:
            found = False
            for subset in combinations(avail, size):
                g = [rest[-1] % m]
                for i in subset:
                    g = [_sym(c, m) for c in _iz_mul(g, lifted[i])]
                g = _primitive_int(g)
                quot = _iz_divides(rest, g)
                if quot is not None and len(g) > 1:
                    result.append(g)
                    rest = quot
                    avail = [i for i in avail if i not in subset]
                    found = True
                    break
            if 2 * size > len(avail):
                break
        size += 1
    if len(rest) > 1:
        result.append(_primitive_int(rest))
    return result


def squarefree_decomposition(f: list[Q]) -> list[tuple[list[Q], int]]:
    """Yun's algorithm: f (monic) = prod_i part_i^i with squarefree parts."""
    f = qmonic(qtrim(list(f)))
    out = []
    g = qgcd(f, qderiv(f))
    c, _ = qdivmod(f, g)
    w, _ = qdivmod(qderiv(f), g)
    d = qtrim([a - b for a, b in _qzip(w, qderiv(c))])
    i = 1
    while qtrim(list(c)) != [Q(1)]:
        a = qgcd(c, d)
        if len(a) > 1:
            out.append((a, i))
        c, _ = qdivmod(c, a)
        d = qtrim([x - y for x, y in _qzip(qdivmod(d, a)[0], qderiv(c))])
        i += 1
    return out


def _qzip(a, b):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else Q(0), b[i] if i < len(b) else Q(0))


def factor_rational_poly(f) -> list[list[Q]]:
    """Monic irreducible factors over Q, with multiplicity, of a nonzero poly.

    The product of the returned factors times the content of f equals f.
    """
    f = qtrim([x if isinstance(x, Fraction) else Fraction(x) for x in f])
    if not f:
        raise ValueError("zero polynomial")
    if len(f) == 1:
        return []
    out: list[list[Q]] = []
    for part, mult in squarefree_decomposition(f):
        _, zi = _to_primitive_int(part)
        for fac in _factor_squarefree_primitive(zi):
            monic = [Q(c, fac[-1]) for c in fac]
            for _ in range(mult):
                out.append(monic)
    out.sort(key=lambda g: (len(g), [(c.numerator, c.denominator) for c in g]))
    # sanity: product * content == f
    prod = [Q(1)]
    for g in out:
        prod = qmul(prod, g)
    content = f[-1]
    check = [content * c for c in prod]
    if qtrim(check) != f:
        raise ArithmeticError("factorization self-check failed")
    return out
