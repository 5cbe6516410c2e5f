"""Finite-dimensional Q-algebras by structure constants: group algebras,
centers, central primitive idempotents, and explicit splitting of the simple
components into the supported kinds (matrices over Q; Q itself; imaginary
quadratic fields of class number one; totally definite rational quaternion
algebras of one-sided class number one).

Row convention: the matrix of left multiplication by x has row i equal to
x * b_i, so lmat is anti-multiplicative; `regular_embedding` returns the
transposed (column-convention, multiplicative) matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from random import Random

from .errors import SplitFailure, UnsupportedComponent
from .groups import GroupData
from .linalg import MatQ, left_kernel, solve_row
from .polyfactor import factor_rational_poly, qdivmod, qmul, qtrim

Q = Fraction

SPLIT_BUDGET = 64

# class-number-one discriminants
IMAG_QUADRATIC_H1 = {-3, -4, -7, -8, -11, -19, -43, -67, -163}
DEFINITE_QUATERNION_H1 = {2, 3, 5, 7, 13}


class SCAlgebra:
    """Associative unital Q-algebra given by basis and structure constants."""

    def __init__(self, table, one, labels=None, check: bool = True):
        self.table = tuple(
            tuple(tuple(Q(x) for x in cell) for cell in row) for row in table
        )
        self.dim = len(self.table)
        self.one = tuple(Q(x) for x in one)
        self.labels = tuple(labels) if labels else tuple(str(i) for i in range(self.dim))
        if check:
            self.verify_structure()

    def verify_structure(self):
        for i in range(self.dim):
            bi = self.basis_vec(i)
            if self.mul(self.one, bi) != bi or self.mul(bi, self.one) != bi:
                raise ValueError("unity fails on basis")
        for i in range(self.dim):
            for j in range(self.dim):
                ij = self.table[i][j]
                for k in range(self.dim):
                    left = self.mul(ij, self.basis_vec(k))
                    right = self.mul(self.basis_vec(i), self.table[j][k])
                    if left != right:
                        raise ValueError("structure constants are not associative")

    def basis_vec(self, i: int) -> tuple[Q, ...]:
        return tuple(Q(1) if j == i else Q(0) for j in range(self.dim))

    def zero(self) -> tuple[Q, ...]:
        return tuple(Q(0) for _ in range(self.dim))

    def mul(self, x, y) -> tuple[Q, ...]:
        out = [Q(0)] * self.dim
        for i, xi in enumerate(x):
            if xi:
                row = self.table[i]
                for j, yj in enumerate(y):
                    if yj:
                        c = xi * yj
                        cell = row[j]
                        for k, ck in enumerate(cell):
                            if ck:
                                out[k] += c * ck
        return tuple(out)

    def lmat(self, x) -> MatQ:
        """Row-convention matrix of a -> x*a (row i = x * b_i)."""
        return MatQ([self.mul(x, self.basis_vec(i)) for i in range(self.dim)])

    def rmat(self, x) -> MatQ:
        return MatQ([self.mul(self.basis_vec(i), x) for i in range(self.dim)])

    def power(self, x, e: int):
        r = self.one
        b = tuple(x)
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def min_poly(self, x, unit=None) -> list[Q]:
        """Monic minimal polynomial of x (w.r.t. the given unit, default 1)."""
        unit = tuple(unit) if unit is not None else self.one
        rows = [list(unit)]
        cur = tuple(unit)
        while True:
            cur = self.mul(cur, x)
            sol = solve_row(MatQ(rows), cur)
            if sol is not None:
                return qtrim([-c for c in sol] + [Q(1)])
            rows.append(list(cur))

    def eval_poly(self, f, x, unit=None):
        unit = tuple(unit) if unit is not None else self.one
        acc = self.zero()
        for c in reversed(f):
            acc = self.mul(acc, x)
            if c:
                acc = tuple(a + c * u for a, u in zip(acc, unit))
        return acc

    def inverse(self, x):
        """Two-sided inverse of x, or None."""
        target = self.one
        try:
            y = solve_row(self.lmat(x), target)
        except Exception:
            return None
        if y is None:
            return None
        y = tuple(y)
        if self.mul(y, x) != self.one or self.mul(x, y) != self.one:
            return None
        return y

    def is_central(self, x) -> bool:
        return all(
            self.mul(x, self.basis_vec(i)) == self.mul(self.basis_vec(i), x)
            for i in range(self.dim)
        )

    def trace_lmul(self, x) -> Q:
        t = Q(0)
        for i, xi in enumerate(x):
            if xi:
                t += xi * sum(self.table[i][j][j] for j in range(self.dim))
        return t


def group_algebra(G: GroupData) -> SCAlgebra:
    """Q[G] with basis indexed by group elements and 0/1 structure constants."""
    n = G.order
    table = [
        [tuple(Q(1) if k == G.table[i][j] else Q(0) for k in range(n)) for j in range(n)]
        for i in range(n)
    ]
    one = tuple(Q(1) if k == G.identity else Q(0) for k in range(n))
    return SCAlgebra(table, one, labels=[f"g{i}" for i in range(n)], check=False)


def regular_embedding(A: SCAlgebra) -> list[MatQ]:
    """Column-convention left multiplications: L(a)L(b) = L(ab), L(1) = I."""
    return [A.lmat(A.basis_vec(i)).transpose() for i in range(A.dim)]


# ---------------------------------------------------------------------------
# rational span helpers


def _echelon_q(rows: list) -> list[tuple[Q, ...]]:
    out: list[tuple[Q, ...]] = []
    for r in rows:
        r = tuple(Q(x) for x in r)
        if not any(r):
            continue
        if out and solve_row(MatQ(out), r) is not None:
            continue
        out.append(r)
    return out


def _in_span_q(rows, v):
    if not rows:
        return not any(v)
    return solve_row(MatQ(rows), v) is not None


# ---------------------------------------------------------------------------
# Wedderburn data


@dataclass(frozen=True)
class ComponentKind:
    """Detected isomorphism type of a simple component."""

    tag: str                       # matrix_over_Q | rational_field | imag_quadratic | definite_quaternion
    n: int = 1                     # matrix size over the skew field
    disc: int | None = None        # field discriminant / quaternion discriminant
    quat_params: tuple | None = None  # (a, b) with i^2=a, j^2=b
    cancellation: str = "guaranteed"   # guaranteed | unknown

    def describe(self) -> str:
        if self.tag == "matrix_over_Q":
            return f"Mat_{self.n}(Q)"
        if self.tag == "rational_field":
            return "Q"
        if self.tag == "imag_quadratic":
            return f"Q(sqrt({self.disc}))" if self.disc % 4 == 0 else f"Q(sqrt(d)), disc {self.disc}"
        return f"quaternion({self.quat_params[0]},{self.quat_params[1]}), disc {self.disc}"


@dataclass(frozen=True)
class SplittingData:
    """Verified explicit splitting of a simple component.

    matrix_units: dict (k,l) -> element coords (matrix_over_Q)
    quat_basis:   (one, i, j, ij) element coords with i^2=a, j^2=b, ij=-ji
    primitive_element / min_poly: field case
    """

    matrix_units: dict | None = None
    quat_basis: tuple | None = None
    primitive_element: tuple | None = None
    min_poly: tuple | None = None


@dataclass
class Component:
    idempotent: tuple            # central primitive idempotent, coords in A
    algebra: SCAlgebra           # component with induced structure constants
    embed: tuple                 # rows: component basis expressed in A coords
    center_rows: tuple           # center basis in component coords
    kind: ComponentKind | None = None
    splitting: SplittingData | None = None

    def to_parent(self, x) -> tuple:
        out = [Q(0)] * len(self.embed[0])
        for c, row in zip(x, self.embed):
            if c:
                out = [a + c * b for a, b in zip(out, row)]
        return tuple(out)

    def from_parent(self, v):
        return solve_row(MatQ(self.embed), v)


@dataclass
class WedderburnDecomp:
    algebra: SCAlgebra
    components: list[Component]

    @property
    def idempotents(self):
        return [c.idempotent for c in self.components]

    def cancellation_ok(self) -> bool:
        return all(c.kind is not None and c.kind.cancellation == "guaranteed" for c in self.components)


def algebra_center(A: SCAlgebra) -> list[tuple[Q, ...]]:
    rows = []
    for s in range(A.dim):
        row = []
        bs = A.basis_vec(s)
        for i in range(A.dim):
            bi = A.basis_vec(i)
            diff = tuple(a - b for a, b in zip(A.mul(bs, bi), A.mul(bi, bs)))
            row.extend(diff)
        rows.append(row)
    return left_kernel(MatQ(rows))


def _sample_element(A: SCAlgebra, basis_rows, rng: Random, attempt: int):
    """Deterministic-then-sparse-random sampling inside a subspace."""
    k = len(basis_rows)
    if attempt < k:
        return tuple(basis_rows[attempt])
    nterms = min(2 + attempt // 8, 4, k)
    out = [Q(0)] * len(basis_rows[0])
    for _ in range(nterms):
        idx = rng.randrange(k)
        c = rng.choice([-2, -1, 1, 2, 3])
        out = [a + c * b for a, b in zip(out, basis_rows[idx])]
    return tuple(out)


def _group_factors(factors: list[list[Q]]):
    """Group repeated irreducible factors into (distinct poly, multiplicity)."""
    seen = []
    for f in factors:
        for entry in seen:
            if entry[0] == f:
                entry[1] += 1
                break
        else:
            seen.append([f, 1])
    return seen


def _q_poly_inverse_mod(a, mod):
    r0, r1 = list(mod), qtrim(list(a))
    t0, t1 = [], [Q(1)]
    while r1:
        q, r = qdivmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, qtrim([x - y for x, y in _qzip(t0, qmul(q, t1))])
    if len(r0) != 1:
        raise SplitFailure("polynomial inverse does not exist")
    inv = 1 / r0[0]
    return [x * inv for x in t0]


def _qzip(a, b):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else Q(0), b[i] if i < len(b) else Q(0))


def _poly_power(f, e):
    out = [Q(1)]
    for _ in range(e):
        out = qmul(out, f)
    return out


def central_idempotents(A: SCAlgebra, seed: int = 0) -> WedderburnDecomp:
    """Primitive central idempotents and the induced simple components."""
    rng = Random(seed)
    zen = algebra_center(A)
    blocks = [A.one]
    final = []
    guard = 0
    while blocks:
        guard += 1
        if guard > 64 * (len(zen) + 2):
            raise SplitFailure("central idempotent computation does not converge")
        e = blocks.pop()
        zb = _echelon_q([A.mul(e, z) for z in zen])
        if len(zb) == 1:
            final.append(e)
            continue
        progressed = False
        for attempt in range(SPLIT_BUDGET):
            z = _sample_element(A, zb, rng, attempt)
            m = A.min_poly(z, unit=e)
            if len(m) - 1 < 1:
                continue
            grouped = _group_factors(factor_rational_poly(m))
            if any(mult > 1 for _, mult in grouped):
                raise SplitFailure("center is not etale: input algebra not semisimple")
            if len(grouped) == 1:
                if len(m) - 1 == len(zb):
                    final.append(e)
                    progressed = True
                    break
                continue
            for f, _ in grouped:
                cof, _ = qdivmod(m, f)
                comb = qmul(_q_poly_inverse_mod(cof, f), cof)
                ek = A.eval_poly(comb, z, unit=e)
                if A.mul(ek, ek) != ek:
                    raise SplitFailure("idempotent construction failed verification")
                blocks.append(ek)
            progressed = True
            break
        if not progressed:
            raise SplitFailure("central splitting budget exhausted")
    final.sort(key=lambda v: tuple((c.numerator, c.denominator) for c in v))
    comps = []
    for e in final:
        comps.append(_build_component(A, e))
    comps.sort(key=lambda c: (c.algebra.dim, c.embed))
    return WedderburnDecomp(algebra=A, components=comps)


def _build_component(A: SCAlgebra, e) -> Component:
    rows = _echelon_q([A.mul(e, A.basis_vec(i)) for i in range(A.dim)])
    bm = MatQ(rows)
    dim = len(rows)
    table = []
    for i in range(dim):
        ri = []
        for j in range(dim):
            prod = A.mul(rows[i], rows[j])
            ri.append(solve_row(bm, prod))
        table.append(ri)
    one_c = solve_row(bm, e)
    comp_alg = SCAlgebra(table, one_c, check=False)
    zen = algebra_center(comp_alg)
    return Component(
        idempotent=tuple(e),
        algebra=comp_alg,
        embed=tuple(tuple(r) for r in rows),
        center_rows=tuple(tuple(z) for z in zen),
    )


# ---------------------------------------------------------------------------
# number-theoretic helpers


def _factor_int(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(x: Q) -> tuple[int, Q]:
    """(m, c) with x = m * c^2, m a squarefree integer of the same sign."""
    if x == 0:
        raise ValueError("squarefree part of zero")
    n = x.numerator * x.denominator
    sign = 1 if n > 0 else -1
    fac = _factor_int(n)
    m = 1
    for p, e in fac.items():
        if e % 2:
            m *= p
    m *= sign
    c2 = x / m
    num_r, den_r = isqrt(c2.numerator), isqrt(c2.denominator)
    assert num_r * num_r == c2.numerator and den_r * den_r == c2.denominator
    return m, Q(num_r, den_r)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def hilbert_symbol(a: Q, b: Q, place) -> int:
    """Hilbert symbol (a, b) at a finite prime or at infinity (place=None)."""
    a, b = Q(a), Q(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol of zero")
    if place is None:
        return -1 if a < 0 and b < 0 else 1
    p = place
    av, bv = 0, 0
    an = a
    while (an.numerator % p == 0) or (an.denominator % p == 0):
        if an.numerator % p == 0:
            an = an / p
            av += 1
        else:
            an = an * p
            av -= 1
    bn = b
    while (bn.numerator % p == 0) or (bn.denominator % p == 0):
        if bn.numerator % p == 0:
            bn = bn / p
            bv += 1
        else:
            bn = bn * p
            bv -= 1
    # unit parts as integers mod p (or mod 8 for p=2)
    if p != 2:
        u = (an.numerator * pow(an.denominator, -1, p)) % p
        v = (bn.numerator * pow(bn.denominator, -1, p)) % p
        s = 1
        if bv % 2:
            s *= legendre(u, p)
        if av % 2:
            s *= legendre(v, p)
        if (av % 2) and (bv % 2) and legendre(-1, p) == -1:
            s *= -1
        return s
    u = (an.numerator * pow(an.denominator, -1, 8)) % 8
    v = (bn.numerator * pow(bn.denominator, -1, 8)) % 8
    eps_u = ((u - 1) // 2) % 2
    eps_v = ((v - 1) // 2) % 2
    om_u = ((u * u - 1) // 8) % 2
    om_v = ((v * v - 1) // 8) % 2
    exp = (eps_u * eps_v + av * om_v + bv * om_u) % 2
    return -1 if exp else 1


def quaternion_ramified_primes(a: Q, b: Q) -> tuple[list[int], bool]:
    """(finite ramified primes, ramified at infinity) of the algebra (a,b)_Q."""
    cands = {2}
    for x in (a, b):
        for p in _factor_int(x.numerator * x.denominator):
            cands.add(p)
    finite = sorted(p for p in cands if hilbert_symbol(a, b, p) == -1)
    return finite, hilbert_symbol(a, b, None) == -1


# ---------------------------------------------------------------------------
# component splitting


def _find_idempotent_split(A: SCAlgebra, e, corner_rows, rng: Random):
    """Proper idempotent below e, or None after the budget."""
    for attempt in range(SPLIT_BUDGET):
        x = _sample_element(A, corner_rows, rng, attempt)
        m = A.min_poly(x, unit=e)
        if len(m) - 1 < 1:
            continue
        grouped = _group_factors(factor_rational_poly(m))
        if len(grouped) < 2:
            continue
        f, mult = grouped[0]
        fpow = _poly_power(f, mult)
        cof, _ = qdivmod(m, fpow)
        comb = qmul(_q_poly_inverse_mod(cof, fpow), cof)
        e1 = A.eval_poly(comb, x, unit=e)
        if not any(e1) or e1 == tuple(e):
            continue
        if A.mul(e1, e1) != e1:
            raise SplitFailure("idempotent failed verification")
        return e1
    return None


def _corner_rows(A: SCAlgebra, e):
    return _echelon_q([A.mul(e, A.mul(A.basis_vec(i), e)) for i in range(A.dim)])


def _primitive_idempotent_q(A: SCAlgebra, rng: Random):
    """Idempotent whose Peirce corner is a division algebra (dim 1 or 4 here)."""
    e = tuple(A.one)
    while True:
        corner = _corner_rows(A, e)
        d = len(corner)
        if d == 1:
            return e, corner
        if d == 4:
            # division quaternion or an unsplit Mat_2(Q); decide by symbols
            quat = _quaternion_basis(A, e, corner)
            if quat is not None:
                a, b = quat[4], quat[5]
                finite, at_inf = quaternion_ramified_primes(a, b)
                if finite or at_inf:
                    return e, corner
        if d in (9, 16) and d == len(corner):
            # could be division of degree 3/4 over Q; only detectable by
            # failing to split within budget, handled below
            pass
        e1 = _find_idempotent_split(A, e, corner, rng)
        if e1 is None:
            if d == 4:
                raise SplitFailure("failed to split a matrix quaternion corner")
            raise UnsupportedComponent(f"division algebra of Q-dimension {d} over Q")
        e = e1


def _quaternion_basis(A: SCAlgebra, e, corner_rows):
    """(one, u, v, uv, a, b) with u^2 = a e, v^2 = b e, uv = -vu; None if the
    corner is visibly not quaternion shaped."""
    # reduced trace on the corner: trd(x) = tr(left mult on corner)/2
    cm = MatQ(corner_rows)
    d = len(corner_rows)
    if d != 4:
        return None

    def corner_coords(x):
        return solve_row(cm, x)

    def trd(x):
        # reduced trace = (trace of left multiplication on the corner) / 2
        t = Q(0)
        for i in range(d):
            img = A.mul(x, corner_rows[i])
            cc = corner_coords(img)
            t += cc[i]
        return t / 2

    u = None
    a = None
    for row in corner_rows[1:]:
        cand = tuple(x - (trd(row) / 2) * ee for x, ee in zip(row, e))
        sq = A.mul(cand, cand)
        cc = corner_coords(sq)
        ec = corner_coords(e)
        # sq must be a scalar multiple of e
        scal = None
        ok = True
        for ci, eci in zip(cc, ec):
            if eci:
                scal = ci / eci
        for ci, eci in zip(cc, ec):
            if ci != (scal if scal is not None else Q(0)) * eci:
                ok = False
        if ok and scal and any(cand):
            u, a = cand, scal
            break
    if u is None:
        return None
    # v: trace-zero, anticommuting with u
    rows_cond = []
    for r in corner_rows:
        anti = tuple(x + y for x, y in zip(A.mul(u, r), A.mul(r, u)))
        rows_cond.append(list(anti) + [trd(r)])
    kern = left_kernel(MatQ(rows_cond))
    v = None
    b = None
    for k in kern:
        cand = [Q(0)] * A.dim
        for c, r in zip(k, corner_rows):
            if c:
                cand = [x + c * y for x, y in zip(cand, r)]
        cand = tuple(cand)
        if not any(cand):
            continue
        sq = A.mul(cand, cand)
        cc = corner_coords(sq)
        ec = corner_coords(e)
        scal = None
        for ci, eci in zip(cc, ec):
            if eci:
                scal = ci / eci
        if all(ci == (scal or Q(0)) * eci for ci, eci in zip(cc, ec)) and scal:
            v, b = cand, scal
            break
    if v is None:
        return None
    # squarefree-normalize a and b
    ma, ca = squarefree_part(a)
    u = tuple(x / ca for x in u)
    a = Q(ma)
    mb, cb = squarefree_part(b)
    v = tuple(x / cb for x in v)
    b = Q(mb)
    uv = A.mul(u, v)
    if A.mul(u, u) != tuple(a * x for x in e) or A.mul(v, v) != tuple(b * x for x in e):
        return None
    if A.mul(v, u) != tuple(-x for x in uv):
        return None
    return (tuple(e), u, v, uv, a, b)


def split_component(comp: Component, seed: int = 0) -> tuple[ComponentKind, SplittingData]:
    """Explicit kind and splitting data of a simple component (verified)."""
    A = comp.algebra
    rng = Random(seed)
    c = len(comp.center_rows)
    d = A.dim
    if d == c:
        # commutative field component
        if c == 1:
            kind = ComponentKind(tag="rational_field")
            return kind, SplittingData(primitive_element=A.one, min_poly=(Q(-1), Q(1)))
        if c == 2:
            theta = None
            for attempt in range(SPLIT_BUDGET):
                cand = _sample_element(A, [A.basis_vec(i) for i in range(d)], rng, attempt)
                m = A.min_poly(cand)
                if len(m) - 1 == 2:
                    theta = cand
                    break
            if theta is None:
                raise SplitFailure("no primitive element found for quadratic field")
            m = A.min_poly(theta)
            disc0 = m[1] ** 2 - 4 * m[0]
            if disc0 > 0:
                raise UnsupportedComponent("real quadratic field component")
            mm, _ = squarefree_part(disc0)
            dk = mm if mm % 4 == 1 else 4 * mm
            if dk not in IMAG_QUADRATIC_H1:
                raise UnsupportedComponent(
                    f"imaginary quadratic field of discriminant {dk} (class number > 1)"
                )
            kind = ComponentKind(tag="imag_quadratic", disc=dk)
            return kind, SplittingData(primitive_element=theta, min_poly=tuple(m))
        raise UnsupportedComponent(f"field component of degree {c} over Q")
    if c != 1:
        raise UnsupportedComponent(
            f"matrix component over a field of degree {c} > 1 (center not Q)"
        )
    e, corner = _primitive_idempotent_q(A, rng)
    cd = len(corner)
    if cd == 1:
        n = isqrt(d)
        if n * n != d:
            raise SplitFailure("component dimension is not a square")
        units = _matrix_units_from_idempotent(A, e, n)
        kind = ComponentKind(tag="matrix_over_Q", n=n)
        return kind, SplittingData(matrix_units=units)
    if cd == 4:
        if d != 4:
            raise UnsupportedComponent(
                f"matrix algebra of size {isqrt(d // 4)} over a quaternion division algebra"
            )
        quat = _quaternion_basis(A, e, corner)
        if quat is None:
            raise SplitFailure("quaternion basis construction failed")
        one, u, v, uv, a, b = quat
        finite, at_inf = quaternion_ramified_primes(a, b)
        if not at_inf:
            raise UnsupportedComponent(f"indefinite quaternion algebra ({a},{b})")
        disc = 1
        for p in finite:
            disc *= p
        if disc not in DEFINITE_QUATERNION_H1:
            raise UnsupportedComponent(
                f"definite quaternion algebra of discriminant {disc} (class number > 1)"
            )
        kind = ComponentKind(tag="definite_quaternion", disc=disc, quat_params=(a, b))
        return kind, SplittingData(quat_basis=(one, u, v, uv))
    raise UnsupportedComponent(f"division algebra of Q-dimension {cd} over Q")


def _matrix_units_from_idempotent(A: SCAlgebra, e, n: int) -> dict:
    """Matrix units from a rank-one idempotent via the left module A*e."""
    w_rows = _echelon_q([A.mul(A.basis_vec(i), e) for i in range(A.dim)])
    if len(w_rows) != n:
        raise SplitFailure("left ideal of primitive idempotent has wrong dimension")
    wm = MatQ(w_rows)

    def action_cols(x):
        """Column-convention (multiplicative) action of x on A*e."""
        rows = []
        for w in w_rows:
            img = A.mul(x, w)
            rows.append(solve_row(wm, img))
        return MatQ(rows).transpose()

    # Solve action_cols(x) = E_kl for each matrix unit; the map is linear in x.
    cond_rows = []
    for i in range(A.dim):
        m = action_cols(A.basis_vec(i))
        cond_rows.append([m[r, c] for r in range(n) for c in range(n)])
    cond = MatQ(cond_rows)
    units = {}
    for k in range(n):
        for l in range(n):
            target = [Q(1) if (r == k and c == l) else Q(0) for r in range(n) for c in range(n)]
            x = solve_row(cond, target)
            if x is None:
                raise SplitFailure("matrix unit solve failed")
            units[(k, l)] = tuple(x)
    # verify relations exactly
    for (k, l), x in units.items():
        for (m_, o), y in units.items():
            prod = A.mul(x, y)
            expected = units[(k, o)] if l == m_ else A.zero()
            if prod != tuple(expected):
                raise SplitFailure("matrix unit relations failed")
    s = A.zero()
    for k in range(n):
        s = tuple(a + b for a, b in zip(s, units[(k, k)]))
    if s != A.one:
        raise SplitFailure("matrix units do not sum to the identity")
    return units


def wedderburn(A: SCAlgebra, seed: int = 0) -> WedderburnDecomp:
    """Full decomposition: idempotents, components, kinds, splitting data."""
    wd = central_idempotents(A, seed=seed)
    for i, comp in enumerate(wd.components):
        kind, data = split_component(comp, seed=seed + 101 * (i + 1))
        comp.kind = kind
        comp.splitting = data
    return wd
