"""Linear algebra over prime fields and small extensions.

Rows over F_2 are stored as integer bitmasks; other primes use plain lists.
Also hosts univariate polynomial arithmetic over F_p, Berlekamp factorization,
irreducibility tests and GF(p^l) element arithmetic used by the probabilistic
isomorphism test, plus kernel lifting modulo prime powers.
"""

from __future__ import annotations

from random import Random

# ---------------------------------------------------------------------------
# Row solvers


class F2RowSolver:
    """Echelonized view of an F_2 matrix given by row bitmasks."""

    def __init__(self, rows: list[int], ncols: int):
        m = len(rows)
        self.m = m
        self.ncols = ncols
        ech = list(rows)
        trf = [1 << i for i in range(m)]
        pivots = []
        r = 0
        for j in range(ncols):
            piv = None
            bit = 1 << j
            for i in range(r, m):
                if ech[i] & bit:
                    piv = i
                    break
            if piv is None:
                continue
            ech[r], ech[piv] = ech[piv], ech[r]
            trf[r], trf[piv] = trf[piv], trf[r]
            for i in range(m):
                if i != r and ech[i] & bit:
                    ech[i] ^= ech[r]
                    trf[i] ^= trf[r]
            pivots.append(j)
            r += 1
        self.rank = r
        self.ech = ech
        self.trf = trf
        self.pivots = pivots

    def solve(self, b: int) -> int | None:
        """x (bitmask over m rows) with x @ A = b, or None."""
        c = 0
        for i, j in enumerate(self.pivots):
            if b & (1 << j):
                b ^= self.ech[i]
                c ^= self.trf[i]
        return None if b else c

    def kernel(self) -> list[int]:
        return [self.trf[i] for i in range(self.rank, self.m)]


class FpRowSolver:
    """Echelonized view of an F_p matrix (general small prime)."""

    def __init__(self, rows: list[list[int]], p: int):
        self.p = p
        m = len(rows)
        n = len(rows[0]) if rows else 0
        self.m, self.ncols = m, n
        ech = [[x % p for x in r] for r in rows]
        trf = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
        pivots = []
        r = 0
        for j in range(n):
            piv = next((i for i in range(r, m) if ech[i][j]), None)
            if piv is None:
                continue
            ech[r], ech[piv] = ech[piv], ech[r]
            trf[r], trf[piv] = trf[piv], trf[r]
            inv = pow(ech[r][j], -1, p)
            ech[r] = [(x * inv) % p for x in ech[r]]
            trf[r] = [(x * inv) % p for x in trf[r]]
            for i in range(m):
                if i != r and ech[i][j]:
                    f = ech[i][j]
                    ech[i] = [(x - f * y) % p for x, y in zip(ech[i], ech[r])]
                    trf[i] = [(x - f * y) % p for x, y in zip(trf[i], trf[r])]
            pivots.append(j)
            r += 1
        self.rank = r
        self.ech = ech
        self.trf = trf
        self.pivots = pivots

    def solve(self, b: list[int]) -> list[int] | None:
        p = self.p
        b = [x % p for x in b]
        c = [0] * self.m
        for i, j in enumerate(self.pivots):
            if b[j]:
                f = b[j]
                b = [(x - f * y) % p for x, y in zip(b, self.ech[i])]
                c = [(x + f * y) % p for x, y in zip(c, self.trf[i])]
        if any(b):
            return None
        return c

    def kernel(self) -> list[list[int]]:
        return [self.trf[i] for i in range(self.rank, self.m)]


def rows_to_bits(rows: list[list[int]]) -> list[int]:
    out = []
    for r in rows:
        v = 0
        for j, x in enumerate(r):
            if x & 1:
                v |= 1 << j
        out.append(v)
    return out


def bits_to_row(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


def fp_left_kernel(rows: list[list[int]], p: int) -> list[list[int]]:
    """Basis of {x in F_p^m : x @ A = 0}."""
    if not rows:
        return []
    if p == 2:
        n = len(rows[0])
        sol = F2RowSolver(rows_to_bits(rows), n)
        return [bits_to_row(v, len(rows)) for v in sol.kernel()]
    return FpRowSolver(rows, p).kernel()


def fp_rank(rows: list[list[int]], p: int) -> int:
    if not rows:
        return 0
    if p == 2:
        return F2RowSolver(rows_to_bits(rows), len(rows[0])).rank
    return FpRowSolver(rows, p).rank


def fp_det(rows: list[list[int]], p: int) -> int:
    """Determinant of a square matrix over F_p."""
    a = [[x % p for x in r] for r in rows]
    n = len(a)
    det = 1
    for j in range(n):
        piv = next((i for i in range(j, n) if a[i][j]), None)
        if piv is None:
            return 0
        if piv != j:
            a[j], a[piv] = a[piv], a[j]
            det = p - det if det else 0
        det = (det * a[j][j]) % p
        inv = pow(a[j][j], -1, p)
        for i in range(j + 1, n):
            if a[i][j]:
                f = (a[i][j] * inv) % p
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[j])]
    return det % p


def fp_mat_mul(a: list[list[int]], b: list[list[int]], p: int) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) % p for c in bt] for r in a]


def fp_mat_inv(a: list[list[int]], p: int) -> list[list[int]] | None:
    n = len(a)
    aug = [[x % p for x in r] + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(a)]
    for j in range(n):
        piv = next((i for i in range(j, n) if aug[i][j]), None)
        if piv is None:
            return None
        aug[j], aug[piv] = aug[piv], aug[j]
        inv = pow(aug[j][j], -1, p)
        aug[j] = [(x * inv) % p for x in aug[j]]
        for i in range(n):
            if i != j and aug[i][j]:
                f = aug[i][j]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[j])]
    return [r[n:] for r in aug]


# ---------------------------------------------------------------------------
# Kernel lifting modulo p^k


def kernel_mod_prime_power(rows: list[list[int]], p: int, k: int) -> list[tuple[int, ...]]:
    """Spanning set of {x : x @ A = 0 mod p^k}, complete over Z/p^k.

    Built by lifting the F_p kernel level by level; each returned vector g
    satisfies g @ A = 0 mod p^k exactly.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    pk = p**k
    a_modp = [[x % p for x in r] for r in rows]
    base = fp_left_kernel(a_modp, p)
    gens = [list(g) for g in base]
    cols = list(zip(*rows)) if rows else []

    def apply(g):  # g @ A over Z
        return [sum(x * y for x, y in zip(g, col)) for col in cols]

    pj = p
    for _ in range(k - 1):
        if not gens:
            break
        t = len(gens)
        rho = [[(x // pj) % p for x in apply(g)] for g in gens]
        stacked = rho + a_modp
        kern = fp_left_kernel(stacked, p)
        new_gens = []
        for vec in kern:
            acc = [0] * m
            for c, g in zip(vec[:t], gens):
                if c:
                    acc = [x + c * y for x, y in zip(acc, g)]
            for c, j in zip(vec[t:], range(m)):
                if c:
                    acc[j] += pj * c
            new_gens.append(acc)
        gens = new_gens
        pj *= p
    out = []
    seen = set()
    for g in gens:
        tg = tuple(x % pk for x in g)
        if any(tg) and tg not in seen:
            seen.add(tg)
            out.append(tg)
    return out


# ---------------------------------------------------------------------------
# Polynomials over F_p (ascending coefficient lists, normalized)


def poly_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_add(f, g, p):
    n = max(len(f), len(g))
    return poly_trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)])


def poly_sub(f, g, p):
    n = max(len(f), len(g))
    return poly_trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def poly_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
    return poly_trim(out)


def poly_divmod(f, g, p):
    f = list(f)
    if not g:
        raise ZeroDivisionError("poly division by zero")
    inv = pow(g[-1], -1, p)
    q = [0] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g) and f:
        c = (f[-1] * inv) % p
        d = len(f) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] = (f[d + i] - c * b) % p
        poly_trim(f)
    return poly_trim(q), f


def poly_mod(f, g, p):
    return poly_divmod(f, g, p)[1]


def poly_gcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        f, g = g, poly_mod(f, g, p)
    if f:
        inv = pow(f[-1], -1, p)
        f = [(x * inv) % p for x in f]
    return f


def poly_pow_mod(f, e: int, mod, p):
    result = [1]
    base = poly_mod(list(f), mod, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), mod, p)
        base = poly_mod(poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def poly_monic(f, p):
    if not f:
        return f
    inv = pow(f[-1], -1, p)
    return [(x * inv) % p for x in f]


def poly_deriv(f, p):
    return poly_trim([(i * f[i]) % p for i in range(1, len(f))])


def poly_is_irreducible(f: list[int], p: int) -> bool:
    """Rabin irreducibility test over F_p for monic f."""
    n = len(f) - 1
    if n <= 0:
        return False
    if n == 1:
        return True
    x = [0, 1]
    # x^(p^n) = x mod f required
    h = x
    for _ in range(n):
        h = poly_pow_mod(h, p, f, p)
    if poly_trim([a - b for a, b in zip_pad(h, x, p)]) != []:
        return False
    for q in _prime_divisors(n):
        h = x
        for _ in range(n // q):
            h = poly_pow_mod(h, p, f, p)
        g = poly_gcd(poly_sub(h, x, p), f, p)
        if g != [1]:
            return False
    return True


def zip_pad(f, g, p):
    n = max(len(f), len(g))
    return [((f[i] if i < len(f) else 0) % p, (g[i] if i < len(g) else 0) % p) for i in range(n)]


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def berlekamp_factor(f: list[int], p: int) -> list[list[int]]:
    """Irreducible factors of a *squarefree* monic polynomial over F_p."""
    f = poly_monic(list(f), p)
    n = len(f) - 1
    if n <= 1:
        return [f] if n == 1 else []
    # Berlekamp Q matrix: rows are x^(p*i) mod f.
    q_rows = []
    xp = poly_pow_mod([0, 1], p, f, p)
    cur = [1]
    for i in range(n):
        row = cur + [0] * (n - len(cur))
        q_rows.append(row[:n])
        cur = poly_mod(poly_mul(cur, xp, p), f, p)
    qmi = [[(q_rows[i][j] - (1 if i == j else 0)) % p for j in range(n)] for i in range(n)]
    basis = fp_left_kernel(qmi, p)
    r = len(basis)
    if r == 1:
        return [f]
    factors = [f]
    for v in basis:
        vpoly = poly_trim(list(v))
        if len(vpoly) <= 1:
            continue  # constant subalgebra element splits nothing
        new_factors = []
        for g in factors:
            if len(g) - 1 <= 1:
                new_factors.append(g)
                continue
            pieces = []
            rem = g
            for c in range(p):
                if len(rem) - 1 <= 0:
                    break
                d = poly_gcd(poly_sub(vpoly, [c], p), rem, p)
                if len(d) > 1:
                    pieces.append(d)
                    rem = poly_divmod(rem, d, p)[0]
            if len(rem) > 1:
                pieces.append(rem)
            new_factors.extend(pieces if pieces else [g])
        factors = new_factors
        if len(factors) == r:
            break
    return [poly_monic(g, p) for g in factors]


def random_irreducible(p: int, degree: int, rng: Random) -> list[int]:
    """Monic irreducible polynomial of given degree over F_p, by trial."""
    while True:
        f = [rng.randrange(p) for _ in range(degree)] + [1]
        if poly_is_irreducible(f, p):
            return f


# ---------------------------------------------------------------------------
# GF(p^l)


class GF:
    """Finite field F_{p^l} with a fixed irreducible modulus polynomial.

    Elements are coefficient tuples of length l (ascending powers).
    """

    def __init__(self, p: int, l: int = 1, modpoly: list[int] | None = None, seed: int = 0):
        self.p = p
        self.l = l
        self.q = p**l
        if l == 1:
            self.modpoly = [0, 1]
        else:
            if modpoly is None:
                modpoly = random_irreducible(p, l, Random(seed))
            if len(modpoly) - 1 != l:
                raise ValueError("modulus degree mismatch")
            self.modpoly = [x % p for x in modpoly]
        self.zero = (0,) * l
        self.one = (1,) + (0,) * (l - 1)

    def el(self, coeffs) -> tuple[int, ...]:
        c = [x % self.p for x in coeffs][: self.l]
        return tuple(c + [0] * (self.l - len(c)))

    def from_int(self, a: int) -> tuple[int, ...]:
        return self.el([a])

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        if self.l == 1:
            return ((a[0] * b[0]) % self.p,)
        prod = poly_mul(list(a), list(b), self.p)
        rem = poly_mod(prod, self.modpoly, self.p)
        return self.el(rem)

    def inv(self, a):
        if self.l == 1:
            return (pow(a[0], -1, self.p),)
        # extended Euclid in F_p[x]
        r0, r1 = self.modpoly, poly_trim(list(a))
        t0, t1 = [], [1]
        while r1:
            q, r = poly_divmod(r0, r1, self.p)
            r0, r1 = r1, r
            t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, self.p), self.p)
        if len(r0) != 1:
            raise ZeroDivisionError("non-invertible element")
        c = pow(r0[0], -1, self.p)
        return self.el([x * c % self.p for x in t0])

    def is_zero(self, a) -> bool:
        return not any(a)

    def random(self, rng: Random):
        return tuple(rng.randrange(self.p) for _ in range(self.l))

    def elements(self):
        def rec(i, acc):
            if i == self.l:
                yield tuple(acc)
                return
            for c in range(self.p):
                acc.append(c)
                yield from rec(i + 1, acc)
                acc.pop()

        yield from rec(0, [])


def fq_det(rows, field: GF):
    """Determinant over GF(p^l); rows are lists of field elements."""
    n = len(rows)
    a = [list(r) for r in rows]
    det = field.one
    for j in range(n):
        piv = next((i for i in range(j, n) if not field.is_zero(a[i][j])), None)
        if piv is None:
            return field.zero
        if piv != j:
            a[j], a[piv] = a[piv], a[j]
            det = field.neg(det)
        det = field.mul(det, a[j][j])
        inv = field.inv(a[j][j])
        for i in range(j + 1, n):
            if not field.is_zero(a[i][j]):
                f = field.mul(a[i][j], inv)
                a[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(a[i], a[j])]
    return det


def fp_charpoly(a: list[list[int]], p: int) -> list[int]:
    """Characteristic polynomial (ascending, monic) of a square matrix over F_p.

    Hessenberg reduction followed by the leading-minor recurrence; valid in any
    characteristic.
    """
    n = len(a)
    h = [[x % p for x in row] for row in a]
    for j in range(n - 2):
        piv = next((i for i in range(j + 1, n) if h[i][j]), None)
        if piv is None:
            continue
        if piv != j + 1:
            h[piv], h[j + 1] = h[j + 1], h[piv]
            for r in range(n):
                h[r][piv], h[r][j + 1] = h[r][j + 1], h[r][piv]
        inv = pow(h[j + 1][j], -1, p)
        for i in range(j + 2, n):
            if h[i][j]:
                f = (h[i][j] * inv) % p
                h[i] = [(x - f * y) % p for x, y in zip(h[i], h[j + 1])]
                for r in range(n):
                    h[r][j + 1] = (h[r][j + 1] + f * h[r][i]) % p
    polys = [[1]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        cur = [0] + list(prev)
        d = h[m - 1][m - 1] % p
        for idx in range(len(prev)):
            cur[idx] = (cur[idx] - d * prev[idx]) % p
        prod = 1
        for i in range(1, m):
            prod = (prod * h[m - i][m - i - 1]) % p
            if prod == 0:
                break
            c = (h[m - 1 - i][m - 1] * prod) % p
            if c:
                sub = polys[m - 1 - i]
                for idx in range(len(sub)):
                    cur[idx] = (cur[idx] - c * sub[idx]) % p
        polys.append([x % p for x in cur])
    return polys[n]


class SmallGF:
    """Table-based arithmetic for F_{p^l} with small q; elements are ints.

    Element i corresponds to the coefficient tuple of i in base p (ascending).
    """

    def __init__(self, p: int, l: int, modpoly: list[int] | None = None, seed: int = 0):
        self.p = p
        self.l = l
        self.q = p**l
        if self.q > 4096:
            raise ValueError("SmallGF is for small fields")
        if modpoly is None:
            modpoly = [0, 1] if l == 1 else random_irreducible(p, l, Random(seed))
        self.modpoly = modpoly

        def to_tuple(i):
            out = []
            for _ in range(l):
                out.append(i % p)
                i //= p
            return out

        def to_int(c):
            v = 0
            for x in reversed(c[:l] + [0] * (l - len(c))):
                v = v * p + (x % p)
            return v

        els = [to_tuple(i) for i in range(self.q)]
        self.add_table = [
            [to_int([(a + b) % p for a, b in zip(x, y)]) for y in els] for x in els
        ]
        self.mul_table = [
            [to_int(poly_mod(poly_mul(list(x), list(y), p), modpoly, p)) for y in els]
            for x in els
        ]
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return self.add_table[a][b]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        row = self.mul_table[a]
        return row.index(1)

    def neg(self, a):
        row = self.add_table[a]
        return row.index(0)

    def from_int(self, x):
        return x % self.p

    def random(self, rng: Random):
        return rng.randrange(self.q)

    def is_prime_field(self, a) -> bool:
        return a < self.p

    def det(self, rows):
        """Determinant of a square matrix with SmallGF integer elements."""
        a = [list(r) for r in rows]
        n = len(a)
        det = 1
        add, mul = self.add_table, self.mul_table
        for j in range(n):
            piv = next((i for i in range(j, n) if a[i][j]), None)
            if piv is None:
                return 0
            if piv != j:
                a[j], a[piv] = a[piv], a[j]
                det = self.neg(det)
            det = mul[det][a[j][j]]
            inv = self.inv(a[j][j])
            for i in range(j + 1, n):
                if a[i][j]:
                    f = mul[a[i][j]][inv]
                    nf = self.neg(f)
                    ai, aj = a[i], a[j]
                    for k in range(j, n):
                        if aj[k]:
                            ai[k] = add[ai[k]][mul[nf][aj[k]]]
        return det
