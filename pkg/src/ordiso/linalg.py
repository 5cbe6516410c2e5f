"""Exact rational/integer linear algebra: matrices, HNF/SNF with transforms,
pseudo-Hermite normal forms, saturation, module indices and residue kernels.

Everything is exact; no floating point.  Vectors are rows throughout the
package: a lattice basis is a matrix whose rows are the basis vectors, and a
linear map is applied as ``v @ F``.

Pseudo-matrix convention: a pseudo-matrix is a pair (ideals, mat) where the
coefficient ideals are attached to the *columns* of ``mat``.  ``pseudo_hnf``
produces ``mat @ U = (0 | T)`` with ``T`` upper triangular with unit diagonal
(the zero block sits on the left); the pivot magnitudes are absorbed into the
output ideals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import (
    CompositeModulus,
    DimensionMismatch,
    NonFullRank,
    NotSublattice,
    UnequalSpan,
)

Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    """Positive generator of the fractional ideal a*Z + b*Z."""
    a, b = abs(a), abs(b)
    if a == 0:
        return b
    if b == 0:
        return a
    den = a.denominator * b.denominator
    return Q(gcd(a.numerator * b.denominator, b.numerator * a.denominator), den)


def frac_bezout(a: Fraction, b: Fraction) -> tuple[Fraction, int, int]:
    """Return (g, s, t) with g = frac_gcd(a, b) and s*a + t*b = g, s, t integers."""
    if a == 0:
        return abs(b), 0, (1 if b > 0 else -1) if b else 0
    if b == 0:
        return abs(a), (1 if a > 0 else -1), 0
    den = a.denominator * b.denominator
    na, nb = a.numerator * b.denominator, b.numerator * a.denominator
    g, s, t = _xgcd(na, nb)
    # s*na + t*nb = g, so s*a + t*b = g/den
    return Q(g, den), s, t


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def v_p(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


class FracIdl:
    """Fractional ideal of Z inside Q: a positive rational generator."""

    __slots__ = ("gen",)

    def __init__(self, gen):
        g = _frac(gen)
        if g <= 0:
            raise ValueError(f"ideal generator must be positive, got {g}")
        self.gen = g

    def __mul__(self, other: "FracIdl") -> "FracIdl":
        return FracIdl(self.gen * other.gen)

    def __truediv__(self, other: "FracIdl") -> "FracIdl":
        return FracIdl(self.gen / other.gen)

    def inverse(self) -> "FracIdl":
        return FracIdl(1 / self.gen)

    def __add__(self, other: "FracIdl") -> "FracIdl":
        return FracIdl(frac_gcd(self.gen, other.gen))

    def contains(self, x) -> bool:
        x = _frac(x)
        return (x / self.gen).denominator == 1

    def v_p(self, p: int) -> int:
        return v_p(self.gen, p)

    def is_one(self) -> bool:
        return self.gen == 1

    def __eq__(self, other) -> bool:
        return isinstance(other, FracIdl) and self.gen == other.gen

    def __hash__(self):
        return hash(("FracIdl", self.gen))

    def __repr__(self):
        return f"({self.gen})"


IDL_ONE = FracIdl(1)


class MatQ:
    """Immutable exact rational matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        self.rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix")

    @staticmethod
    def identity(n: int) -> "MatQ":
        return MatQ([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(r: int, c: int) -> "MatQ":
        return MatQ([[ZERO] * c for _ in range(r)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "MatQ") -> "MatQ":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.ncols} vs {other.nrows}")
        bt = list(zip(*other.rows)) if other.rows else []
        return MatQ([[_dot(r, c) for c in bt] for r in self.rows])

    def __add__(self, other: "MatQ") -> "MatQ":
        return MatQ([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "MatQ") -> "MatQ":
        return MatQ([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "MatQ":
        return MatQ([[-a for a in r] for r in self.rows])

    def scale(self, q) -> "MatQ":
        q = _frac(q)
        return MatQ([[q * a for a in r] for r in self.rows])

    def transpose(self) -> "MatQ":
        return MatQ(list(zip(*self.rows))) if self.rows else MatQ([])

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return self.is_square() and all(
            x == (ONE if i == j else ZERO) for i, r in enumerate(self.rows) for j, x in enumerate(r)
        )

    def det(self) -> Fraction:
        if not self.is_square():
            raise DimensionMismatch("det of non-square matrix")
        n = self.nrows
        a = [list(r) for r in self.rows]
        det = ONE
        for j in range(n):
            piv = next((i for i in range(j, n) if a[i][j] != 0), None)
            if piv is None:
                return ZERO
            if piv != j:
                a[j], a[piv] = a[piv], a[j]
                det = -det
            det *= a[j][j]
            inv = 1 / a[j][j]
            for i in range(j + 1, n):
                if a[i][j]:
                    f = a[i][j] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        return det

    def inv(self) -> "MatQ":
        if not self.is_square():
            raise DimensionMismatch("inverse of non-square matrix")
        n = self.nrows
        a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for j in range(n):
            piv = next((i for i in range(j, n) if a[i][j] != 0), None)
            if piv is None:
                raise NonFullRank("singular matrix")
            a[j], a[piv] = a[piv], a[j]
            inv = 1 / a[j][j]
            a[j] = [x * inv for x in a[j]]
            for i in range(n):
                if i != j and a[i][j]:
                    f = a[i][j]
                    a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        return MatQ([r[n:] for r in a])

    def rank(self) -> int:
        a = [list(r) for r in self.rows]
        rk = 0
        for j in range(self.ncols):
            piv = next((i for i in range(rk, self.nrows) if a[i][j] != 0), None)
            if piv is None:
                continue
            a[rk], a[piv] = a[piv], a[rk]
            inv = 1 / a[rk][j]
            for i in range(rk + 1, self.nrows):
                if a[i][j]:
                    f = a[i][j] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
            rk += 1
            if rk == self.nrows:
                break
        return rk

    def key(self):
        return (self.nrows, self.ncols, self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatQ) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "MatQ(" + repr([[str(x) for x in r] for r in self.rows]) + ")"


def _dot(r, c) -> Fraction:
    s = ZERO
    for a, b in zip(r, c):
        if a and b:
            s += a * b
    return s


def mat_from_int(rows) -> MatQ:
    return MatQ([[Q(x) for x in r] for r in rows])


def solve_row(basis: MatQ, v) -> tuple[Fraction, ...] | None:
    """Solve x @ basis = v; None if v is outside the row space.

    ``basis`` need not be square but must have independent rows.
    """
    m, n = basis.nrows, basis.ncols
    v = [_frac(x) for x in v]
    if len(v) != n:
        raise DimensionMismatch("vector length mismatch")
    # Solve basis^T y = v^T by elimination.
    a = [[basis.rows[j][i] for j in range(m)] + [v[i]] for i in range(n)]
    piv_cols = []
    r = 0
    for j in range(m):
        piv = next((i for i in range(r, n) if a[i][j] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][j]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][j]:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(j)
        r += 1
    # Consistency: rows beyond rank must have zero RHS.
    for i in range(r, n):
        if a[i][m] != 0:
            return None
    if r < m:
        raise NonFullRank("dependent basis rows in solve_row")
    x = [ZERO] * m
    for i, j in enumerate(piv_cols):
        x[j] = a[i][m]
    return tuple(x)


class RowSolver:
    """Reusable solver for x @ B = v with a fixed independent-row basis B.

    Precomputes the inverse of a pivot column block; each solve is O(m^2)
    plus a consistency check on the remaining columns.
    """

    __slots__ = ("basis", "pivots", "inv", "others")

    def __init__(self, basis: MatQ):
        m, n = basis.nrows, basis.ncols
        a = [list(r) for r in basis.rows]
        pivots = []
        r = 0
        work = [list(row) for row in a]
        for j in range(n):
            piv = next((i for i in range(r, m) if work[i][j] != 0), None)
            if piv is None:
                continue
            work[r], work[piv] = work[piv], work[r]
            inv = 1 / work[r][j]
            work[r] = [x * inv for x in work[r]]
            for i in range(m):
                if i != r and work[i][j]:
                    f = work[i][j]
                    work[i] = [x - f * y for x, y in zip(work[i], work[r])]
            pivots.append(j)
            r += 1
            if r == m:
                break
        if r < m:
            raise NonFullRank("basis rows are dependent")
        self.basis = basis
        self.pivots = pivots
        block = MatQ([[a[i][j] for j in pivots] for i in range(m)])
        self.inv = block.inv()
        self.others = [j for j in range(n) if j not in set(pivots)]

    def solve(self, v):
        v = [_frac(x) for x in v]
        vj = [v[j] for j in self.pivots]
        x = [_dot(vj, col) for col in zip(*self.inv.rows)]
        if self.others:
            basis = self.basis.rows
            for j in self.others:
                s = ZERO
                for xi, row in zip(x, basis):
                    if xi:
                        s += xi * row[j]
                if s != v[j]:
                    return None
        return tuple(x)


def left_kernel(mat: MatQ) -> list[tuple[Fraction, ...]]:
    """Basis of {x : x @ mat = 0} over Q."""
    m, n = mat.nrows, mat.ncols
    # Row reduce mat^T augmented implicitly: kernel of mat^T as column map.
    a = [[mat.rows[i][j] for i in range(m)] for j in range(n)]  # n x m, columns = original rows
    piv_of_col: dict[int, int] = {}
    r = 0
    for j in range(m):
        piv = next((i for i in range(r, n) if a[i][j] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][j]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][j]:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_of_col[j] = r
        r += 1
    free = [j for j in range(m) if j not in piv_of_col]
    out = []
    for j in free:
        x = [ZERO] * m
        x[j] = ONE
        for pc, ri in piv_of_col.items():
            x[pc] = -a[ri][j]
        out.append(tuple(x))
    return out


# ---------------------------------------------------------------------------
# Integer normal forms


def hnf_int(rows: list[list[int]], transform: bool = False):
    """Row Hermite normal form of an integer matrix.

    Returns (H, U, pivots) with U @ A = H when ``transform`` else (H, None,
    pivots).  H is in row-echelon HNF: positive pivots moving right, entries
    above each pivot reduced into [0, pivot), zero rows at the bottom.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if transform else None
    pivots = []
    r = 0
    for j in range(n):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv][j])):
                piv = i
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        if u is not None:
            u[r], u[piv] = u[piv], u[r]
        # Clear below with gcd steps.
        for i in range(r + 1, m):
            while a[i][j]:
                q = a[i][j] // a[r][j]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if u is not None:
                        u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                if a[i][j]:
                    a[r], a[i] = a[i], a[r]
                    if u is not None:
                        u[r], u[i] = u[i], u[r]
        if a[r][j] < 0:
            a[r] = [-x for x in a[r]]
            if u is not None:
                u[r] = [-x for x in u[r]]
        # Reduce above.
        for i in range(r):
            q = a[i][j] // a[r][j]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                if u is not None:
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        pivots.append(j)
        r += 1
    return a, u, pivots


def left_kernel_int(rows: list[list[int]]) -> list[list[int]]:
    """Basis of the saturated integer left kernel {x in Z^m : x @ A = 0}."""
    h, u, pivots = hnf_int(rows, transform=True)
    rank = len(pivots)
    return [u[i] for i in range(rank, len(rows))]


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form D = U @ A @ V with unimodular transforms."""

    D: MatQ
    U: MatQ
    V: MatQ

    @property
    def divisors(self) -> tuple[int, ...]:
        k = min(self.D.nrows, self.D.ncols)
        return tuple(int(self.D[i, i]) for i in range(k))


def snf_int(rows: list[list[int]], want_u: bool = True, want_v: bool = True):
    """Smith normal form of an integer matrix.

    Returns (d, U, V) where d is the list of diagonal entries (d_i >= 0,
    d_i | d_{i+1}) and U @ A @ V = diag(d).  U or V is None when not requested.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if want_u else None
    v = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if want_v else None

    def row_op(i, k, q):  # row_i -= q*row_k
        a[i] = [x - q * y for x, y in zip(a[i], a[k])]
        if u is not None:
            u[i] = [x - q * y for x, y in zip(u[i], u[k])]

    def col_op(j, k, q):  # col_j -= q*col_k
        for row in a:
            row[j] -= q * row[k]
        if v is not None:
            for row in v:
                row[j] -= q * row[k]

    def row_swap(i, k):
        a[i], a[k] = a[k], a[i]
        if u is not None:
            u[i], u[k] = u[k], u[i]

    def col_swap(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        if v is not None:
            for row in v:
                row[j], row[k] = row[k], row[j]

    t = 0
    while t < min(m, n):
        # Find smallest nonzero entry in the remaining block.
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        row_swap(t, piv[0])
        col_swap(t, piv[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                while a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t]:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, n):
                while a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j]:
                        col_swap(t, j)
                        dirty = True
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        t += 1

    # Divisibility chain.
    k = min(m, n)
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if dj % max(di, 1) != 0 if di else dj != 0:
                # Fold d_{i+1} into position i: col_i += col_{i+1}, re-eliminate.
                for row in a:
                    row[i] += row[i + 1]
                if v is not None:
                    for row in v:
                        row[i] += row[i + 1]
                # 2x2 block gcd cleanup.
                while a[i + 1][i]:
                    q = a[i + 1][i] // a[i][i] if a[i][i] else 0
                    if a[i][i]:
                        row_op(i + 1, i, q)
                    if a[i + 1][i]:
                        row_swap(i, i + 1)
                while a[i][i + 1]:
                    q = a[i][i + 1] // a[i][i]
                    col_op(i + 1, i, q)
                if a[i][i] < 0:
                    a[i] = [-x for x in a[i]]
                    if u is not None:
                        u[i] = [-x for x in u[i]]
                if a[i + 1][i + 1] < 0:
                    a[i + 1] = [-x for x in a[i + 1]]
                    if u is not None:
                        u[i + 1] = [-x for x in u[i + 1]]
                changed = True
    d = [a[i][i] for i in range(k)]
    return d, u, v


def snf(A: MatQ) -> SnfResult:
    """Smith normal form with transforms of an integer matrix."""
    if not A.is_integral():
        raise ValueError("snf requires integer entries")
    rows = [[int(x) for x in r] for r in A.rows]
    d, u, v = snf_int(rows, want_u=True, want_v=True)
    m, n = A.nrows, A.ncols
    dm = [[Q(d[i]) if i == j and i < len(d) else ZERO for j in range(n)] for i in range(m)]
    return SnfResult(D=MatQ(dm), U=mat_from_int(u), V=mat_from_int(v))


# ---------------------------------------------------------------------------
# Pseudo-Hermite normal form


@dataclass(frozen=True)
class PseudoHnf:
    H: MatQ                       # n x m, shape (0 | T), T upper triangular, unit diagonal
    ideals: tuple[FracIdl, ...]   # m output column ideals
    U: MatQ                       # m x m column transform: input_mat @ U = H
    U_inv: MatQ


def pseudo_hnf(ideals, mat: MatQ) -> PseudoHnf:
    """Pseudo-HNF of a column pseudo-matrix over Z (ideals = positive rationals).

    ``mat`` is n x m with column j carrying coefficient ideal ideals[j]; the
    module it presents is sum_j ideals[j] * col_j.  Requires row rank n (else
    NonFullRank).  Output satisfies mat @ U = H = (0 | T) with T upper
    triangular and unit diagonal, and the transform entries obey
    U[i][j] in ideals[i] * out_ideals[j]^{-1}.
    """
    ideals = [idl if isinstance(idl, FracIdl) else FracIdl(idl) for idl in ideals]
    n, m = mat.nrows, mat.ncols
    if len(ideals) != m:
        raise DimensionMismatch("one ideal per column required")
    if m < n:
        raise NonFullRank("fewer columns than rows")
    cols = [[mat.rows[i][j] for i in range(n)] for j in range(m)]
    q = [idl.gen for idl in ideals]
    u = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]   # columns of U
    w = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]   # rows of U^{-1}

    def col_scale(j, factor):
        # col_j *= factor, ideal_j /= |factor| is wrong; module term q_j*c_j
        # must be preserved: c_j *= factor, q_j *= 1/|factor| keeps q_j*c_j.
        cols[j] = [x * factor for x in cols[j]]
        u[j] = [x * factor for x in u[j]]
        inv = 1 / factor
        w[j] = [x * inv for x in w[j]]

    def col_swap(j, k):
        cols[j], cols[k] = cols[k], cols[j]
        q[j], q[k] = q[k], q[j]
        u[j], u[k] = u[k], u[j]
        w[j], w[k] = w[k], w[j]

    for i in range(n - 1, -1, -1):
        jp = m - n + i
        active = [j for j in range(jp + 1) if cols[j][i] != 0]
        if not active:
            raise NonFullRank(f"no pivot available for row {i}")
        if cols[jp][i] == 0:
            col_swap(jp, active[-1])
        for j in range(jp):
            if cols[j][i] == 0:
                continue
            a, b = cols[j][i], cols[jp][i]
            g, s, t = frac_bezout(a * q[j], b * q[jp])
            uu, vv = s * q[j], t * q[jp]          # uu in (q_j), vv in (q_jp), uu*a + vv*b = g
            cj, cp = cols[j], cols[jp]
            new_p = [(uu * x + vv * y) / g for x, y in zip(cj, cp)]
            new_o = [(-b * x + a * y) / g for x, y in zip(cj, cp)]
            cols[jp], cols[j] = new_p, new_o
            uj, up = u[j], u[jp]
            u[jp] = [(uu * x + vv * y) / g for x, y in zip(uj, up)]
            u[j] = [(-b * x + a * y) / g for x, y in zip(uj, up)]
            # Inverse transform: (c_j, c_p) = (o, p) @ [[-vv, uu], [a/g*g?...]]
            # Verified identity: c_j = -vv*o + a*p ; c_p = uu*o + b*p  (all over g absorbed).
            wj, wp = w[j], w[jp]
            w[j] = [-vv * x + uu * y for x, y in zip(wj, wp)]
            w[jp] = [a * x + b * y for x, y in zip(wj, wp)]
            q[j], q[jp] = q[j] * q[jp], g
        piv = cols[jp][i]
        if piv != 1:
            # Scale pivot column to unit diagonal; keep ideals positive.
            col_scale(jp, 1 / piv)
            q[jp] = q[jp] * abs(piv)
            if piv < 0:
                pass  # sign folded into the column; ideal stays positive
    # Normalize the zero-block columns to coefficient ideal (1); the scale is
    # absorbed into U so the determinant/product identity is preserved.
    for j in range(m - n):
        f = q[j]
        if f != 1:
            u[j] = [x * f for x in u[j]]
            inv = 1 / f
            w[j] = [x * inv for x in w[j]]
            cols[j] = [x * f for x in cols[j]]
            q[j] = ONE
    # Reduce entries right of each pivot into canonical representatives.
    for jj in range(m - n + 1, m):
        i_col = jj - (m - n)          # column jj is the pivot column of row i_col-1 (0-based row jj-(m-n))
        for ii in range(jj - (m - n) - 1, -1, -1):
            jp = m - n + ii
            val = cols[jj][ii]
            ratio = q[jp] / q[jj]
            lam = (val / ratio).__floor__() * ratio
            if lam:
                cols[jj] = [x - lam * y for x, y in zip(cols[jj], cols[jp])]
                u[jj] = [x - lam * y for x, y in zip(u[jj], u[jp])]
                w[jp] = [x + lam * y for x, y in zip(w[jp], w[jj])]
    h = MatQ([[cols[j][i] for j in range(m)] for i in range(n)])
    umat = MatQ([[u[j][i] for j in range(m)] for i in range(m)])
    winv = MatQ(w)
    return PseudoHnf(H=h, ideals=tuple(FracIdl(x) for x in q), U=umat, U_inv=winv)


# ---------------------------------------------------------------------------
# Pseudo-lattices


class PseudoLattice:
    """Full-rank-in-its-span lattice in Q^ambient_dim given by a pseudo-basis.

    The module is sum_i ideals[i] * basis[i] with Q-linearly independent basis
    rows.  The zero lattice has an empty basis.
    """

    __slots__ = ("ambient_dim", "ideals", "basis", "_canon", "_solver")

    def __init__(self, ambient_dim: int, ideals, basis, check: bool = True):
        self.ambient_dim = int(ambient_dim)
        self.ideals = tuple(i if isinstance(i, FracIdl) else FracIdl(i) for i in ideals)
        self.basis = tuple(tuple(_frac(x) for x in row) for row in basis)
        self._canon = None
        self._solver = None
        if len(self.ideals) != len(self.basis):
            raise DimensionMismatch("ideal/basis length mismatch")
        for row in self.basis:
            if len(row) != self.ambient_dim:
                raise DimensionMismatch("basis vector of wrong length")
        if check and self.basis:
            if MatQ(self.basis).rank() != len(self.basis):
                raise NonFullRank("pseudo-basis rows are dependent")

    @staticmethod
    def from_rows(rows, ambient_dim: int | None = None, ideals=None) -> "PseudoLattice":
        rows = [tuple(_frac(x) for x in r) for r in rows]
        if ambient_dim is None:
            if not rows:
                raise ValueError("ambient_dim required for empty basis")
            ambient_dim = len(rows[0])
        if ideals is None:
            ideals = [IDL_ONE] * len(rows)
        return PseudoLattice(ambient_dim, ideals, rows)

    @staticmethod
    def standard(n: int) -> "PseudoLattice":
        return PseudoLattice.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(ambient_dim: int) -> "PseudoLattice":
        return PseudoLattice(ambient_dim, (), ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def basis_matrix(self) -> MatQ:
        return MatQ(self.basis) if self.basis else MatQ([])

    def zbasis_matrix(self) -> MatQ:
        """Basis with ideals absorbed (all coefficient ideals become (1))."""
        return MatQ([[idl.gen * x for x in row] for idl, row in zip(self.ideals, self.basis)])

    def absorb_ideals(self) -> "PseudoLattice":
        if all(i.is_one() for i in self.ideals):
            return self
        return PseudoLattice(
            self.ambient_dim,
            [IDL_ONE] * self.rank,
            [[idl.gen * x for x in row] for idl, row in zip(self.ideals, self.basis)],
            check=False,
        )

    def scale(self, q) -> "PseudoLattice":
        q = _frac(q)
        if q <= 0:
            raise ValueError("scale factor must be positive")
        return PseudoLattice(
            self.ambient_dim, [FracIdl(i.gen * q) for i in self.ideals], self.basis, check=False
        )

    def coords(self, v):
        """Coordinates of v in the basis (ignoring ideals); None if outside the span."""
        if self.is_zero():
            return None if any(_frac(x) != 0 for x in v) else ()
        if self._solver is None:
            self._solver = RowSolver(self.basis_matrix())
        return self._solver.solve(v)

    def contains(self, v) -> bool:
        c = self.coords(v)
        if c is None:
            return False
        return all(idl.contains(x) for idl, x in zip(self.ideals, c))

    def contains_lattice(self, other: "PseudoLattice") -> bool:
        if other.is_zero():
            return True
        for idl, row in zip(other.ideals, other.basis):
            c = self.coords(row)
            if c is None:
                return False
            # need idl * row inside self: coordinate-wise idl*c_j in self.ideals[j]
            for own, x in zip(self.ideals, c):
                if x and not own.contains(x * idl.gen):
                    return False
        return True

    def canonical(self) -> "PseudoLattice":
        """Unique HNF-normalized presentation (unit ideals, canonical basis)."""
        if self._canon is not None:
            return self._canon
        if self.is_zero():
            canon = self
        else:
            z = self.zbasis_matrix()
            den = lcm(*[x.denominator for r in z.rows for x in r]) if z.rows else 1
            int_rows = [[int(x * den) for x in r] for r in z.rows]
            h, _, pivots = hnf_int(int_rows)
            rows = [[Q(x, den) for x in h[i]] for i in range(len(pivots))]
            canon = PseudoLattice(self.ambient_dim, [IDL_ONE] * len(rows), rows, check=False)
        self._canon = canon
        canon._canon = canon
        return canon

    def key(self):
        c = self.canonical()
        return (c.ambient_dim, c.basis)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PseudoLattice)
            and self.ambient_dim == other.ambient_dim
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PseudoLattice(dim={self.ambient_dim}, rank={self.rank})"


def zmodule_from_rows(rows, ambient_dim: int) -> PseudoLattice:
    """The Z-module generated by (possibly dependent) rational row vectors."""
    rows = [tuple(_frac(x) for x in r) for r in rows]
    rows = [r for r in rows if any(r)]
    if not rows:
        return PseudoLattice.zero(ambient_dim)
    den = lcm(*[x.denominator for r in rows for x in r])
    int_rows = [[int(x * den) for x in r] for r in rows]
    h, _, pivots = hnf_int(int_rows)
    basis = [[Q(x, den) for x in h[i]] for i in range(len(pivots))]
    return PseudoLattice(ambient_dim, [IDL_ONE] * len(basis), basis, check=False)


def module_index(M: PseudoLattice, N: PseudoLattice) -> FracIdl:
    """Module index [M : N] of two lattices spanning the same Q-space."""
    if M.ambient_dim != N.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if M.rank != N.rank:
        raise UnequalSpan("ranks differ")
    if M.is_zero():
        return IDL_ONE
    bm = M.basis_matrix()
    t_rows = []
    for row in N.basis:
        c = solve_row(bm, row)
        if c is None:
            raise UnequalSpan("spans differ")
        t_rows.append(c)
    d = MatQ(t_rows).det()
    if d == 0:
        raise UnequalSpan("degenerate coordinate change")
    idx = abs(d)
    for i in N.ideals:
        idx *= i.gen
    for i in M.ideals:
        idx /= i.gen
    return FracIdl(idx)


def saturate(N: PseudoLattice, M: PseudoLattice) -> PseudoLattice:
    """Saturation QN ∩ M of a sublattice N inside M.

    Computed through the pseudo-HNF of the coordinate pseudo-matrix; the last
    rank(N) transformed pseudo-columns give the saturation.
    """
    if N.ambient_dim != M.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if N.is_zero():
        return PseudoLattice.zero(M.ambient_dim)
    bm = M.basis_matrix()
    m, n = M.rank, N.rank
    cols = []
    for idl, row in zip(N.ideals, N.basis):
        c = M.coords(row)
        if c is None:
            raise NotSublattice("generator outside QM")
        for own, x in zip(M.ideals, c):
            if x and not own.contains(x * idl.gen):
                raise NotSublattice("generator fails membership in M")
        cols.append(c)
    # A is m x n with columns the coordinates; the pseudo-matrix to reduce is
    # (inverse ideals of M, A^t) of size n x m.
    at = MatQ([[cols[j][i] for i in range(m)] for j in range(n)])
    ph = pseudo_hnf([idl.inverse() for idl in M.ideals], at)
    # omega_j = sum_k Uinv[j][k] * alpha_k in ambient coordinates.
    sat_rows = []
    sat_ideals = []
    for j in range(m - n, m):
        coeffs = ph.U_inv.rows[j]
        vec = [ZERO] * M.ambient_dim
        for k, c in enumerate(coeffs):
            if c:
                brow = M.basis[k]
                vec = [x + c * y for x, y in zip(vec, brow)]
        sat_rows.append(vec)
        sat_ideals.append(ph.ideals[j].inverse())
    return PseudoLattice(M.ambient_dim, sat_ideals, sat_rows, check=False)


def intersect(L1: PseudoLattice, L2: PseudoLattice) -> PseudoLattice:
    """Exact intersection of two pseudo-lattices in the same ambient space."""
    if L1.ambient_dim != L2.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if L1.is_zero() or L2.is_zero():
        return PseudoLattice.zero(L1.ambient_dim)
    b1 = L1.zbasis_matrix()
    b2 = L2.zbasis_matrix()
    den = lcm(
        *[x.denominator for r in b1.rows for x in r],
        *[x.denominator for r in b2.rows for x in r],
    )
    i1 = [[int(x * den) for x in r] for r in b1.rows]
    i2 = [[int(x * den) for x in r] for r in b2.rows]
    stack = i1 + [[-x for x in r] for r in i2]
    kern = left_kernel_int(stack)
    r1 = len(i1)
    rows = []
    for k in kern:
        vec = [ZERO] * L1.ambient_dim
        for c, row in zip(k[:r1], b1.rows):
            if c:
                vec = [x + c * y for x, y in zip(vec, row)]
        if any(vec):
            rows.append(vec)
    if not rows:
        return PseudoLattice.zero(L1.ambient_dim)
    return PseudoLattice.from_rows(rows).canonical()


def integral_preimage_lattice(C: MatQ) -> list[tuple[Fraction, ...]]:
    """Basis rows of the lattice {t in Q^s : C @ t is integral}.

    C is N x s with full column rank s (its columns are the images of the
    coordinate directions).
    """
    nrows, s = C.nrows, C.ncols
    if s == 0:
        return []
    den = lcm(*[x.denominator for r in C.rows for x in r]) if C.rows else 1
    p_rows = [[int(x * den) for x in r] for r in C.rows]
    d, _, v = snf_int(p_rows, want_u=False, want_v=True)
    if len(d) < s or any(di == 0 for di in d[:s]):
        raise NonFullRank("preimage of a rank-deficient map is not a lattice")
    out = []
    for i in range(s):
        f = Q(den, d[i])
        out.append(tuple(f * Q(v[j][i]) for j in range(s)))
    return out


# ---------------------------------------------------------------------------
# Kernels over Z/p^k


def _prime_power(m: int) -> tuple[int, int]:
    if m < 2:
        raise CompositeModulus(f"modulus {m} is not a prime power")
    p = None
    mm = m
    for cand in range(2, m + 1):
        if cand * cand > mm:
            p = mm
            break
        if mm % cand == 0:
            p = cand
            break
    k = 0
    while mm % p == 0:
        mm //= p
        k += 1
    if mm != 1:
        raise CompositeModulus(f"modulus {m} is not a prime power")
    return p, k


@dataclass(frozen=True)
class ModPkMat:
    """Integer matrix with entries reduced modulo a prime power."""

    modulus: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        p, k = _prime_power(self.modulus)
        object.__setattr__(
            self, "entries", tuple(tuple(x % self.modulus for x in r) for r in self.entries)
        )

    @property
    def nrows(self):
        return len(self.entries)

    @property
    def ncols(self):
        return len(self.entries[0]) if self.entries else 0


def kernel_mod(A: ModPkMat) -> list[tuple[int, ...]]:
    """Howell-complete spanning set of {x : x @ A = 0 mod p^k}.

    Every solution is a Z/p^k-combination of the returned vectors.
    """
    p, k = _prime_power(A.modulus)
    rows = [list(r) for r in A.entries]
    m = len(rows)
    if m == 0:
        return []
    if A.ncols == 0 or all(x == 0 for r in rows for x in r):
        return [tuple(1 if i == j else 0 for j in range(m)) for i in range(m)]
    if m * A.ncols <= 600:
        return _kernel_mod_snf(rows, p, k)
    from .modp import kernel_mod_prime_power

    return kernel_mod_prime_power(rows, p, k)


def _kernel_mod_snf(rows: list[list[int]], p: int, k: int) -> list[tuple[int, ...]]:
    pk = p**k
    m = len(rows)
    d, u, _ = snf_int(rows, want_u=True, want_v=False)
    out = []
    for i in range(m):
        di = d[i] if i < len(d) else 0
        if di == 0:
            e = 0
        else:
            vp = 0
            while di % p == 0:
                di //= p
                vp += 1
            # The unit part of d_i is invertible mod p^k, so only the p-part counts.
            e = max(k - vp, 0)
        vec = tuple((u[i][j] * pow(p, e)) % pk for j in range(m))
        if any(vec):
            out.append(vec)
    return out
