"""Structure theory for finite-dimensional algebras over prime fields.

Radical computation uses the trace-form kernel for p > dim and the iterated
Frobenius-power trace chain for small characteristic.  Semisimple algebras are
split into simple components through minimal polynomials of random central
elements; simple modules are certified via primitive idempotents whose Peirce
corner is a finite field.

Module convention (as everywhere in the package): modules are row spaces, the
action of an algebra element with coordinates x is the matrix sum(x_s * M_s)
acting on the right, and M is anti-multiplicative: M(ab) = M(b) @ M(a).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random

from .errors import AlgebraStructureError, SplitFailure
from .modp import (
    FpRowSolver,
    berlekamp_factor,
    fp_left_kernel,
    fp_mat_mul,
    fp_rank,
    poly_trim,
)

RETRY_BUDGET = 64


class FpAlgebra:
    """Associative unital algebra over F_p by structure constants."""

    def __init__(self, p: int, table: list[list[list[int]]], one: list[int]):
        self.p = p
        self.table = [[[x % p for x in cell] for cell in row] for row in table]
        self.dim = len(table)
        self.one = [x % p for x in one]
        self._lmats: dict[int, list[list[int]]] = {}

    def mul(self, x: list[int], y: list[int]) -> list[int]:
        p = self.p
        out = [0] * self.dim
        for i, xi in enumerate(x):
            if xi:
                row = self.table[i]
                for j, yj in enumerate(y):
                    if yj:
                        c = (xi * yj) % p
                        cell = row[j]
                        for k, ck in enumerate(cell):
                            if ck:
                                out[k] = (out[k] + c * ck) % p
        return out

    def lmat_basis(self, i: int) -> list[list[int]]:
        """Matrix of a -> b_i * a in row convention (row j = b_i * b_j)."""
        if i not in self._lmats:
            self._lmats[i] = [self.table[i][j] for j in range(self.dim)]
        return self._lmats[i]

    def lmat(self, x: list[int]) -> list[list[int]]:
        p = self.p
        out = [[0] * self.dim for _ in range(self.dim)]
        for i, xi in enumerate(x):
            if xi:
                m = self.lmat_basis(i)
                for j in range(self.dim):
                    rowm = m[j]
                    rowo = out[j]
                    for k in range(self.dim):
                        if rowm[k]:
                            rowo[k] = (rowo[k] + xi * rowm[k]) % p
        return out

    def trace_lmul(self, x: list[int]) -> int:
        """Trace of left multiplication by x."""
        p = self.p
        t = 0
        for i, xi in enumerate(x):
            if xi:
                s = sum(self.table[i][j][j] for j in range(self.dim)) % p
                t = (t + xi * s) % p
        return t

    def power(self, x: list[int], e: int) -> list[int]:
        r = list(self.one)
        b = list(x)
        while e:
            if e & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            e >>= 1
        return r

    def min_poly(self, x: list[int]) -> list[int]:
        """Minimal polynomial of x over F_p (ascending, monic)."""
        rows = [list(self.one)]
        cur = list(self.one)
        while True:
            cur = self.mul(cur, x)
            solver = FpRowSolver(rows, self.p)
            sol = solver.solve(cur)
            if sol is not None:
                return poly_trim([(-c) % self.p for c in sol] + [1])
            rows.append(cur)

    def eval_poly(self, f: list[int], x: list[int]) -> list[int]:
        acc = [0] * self.dim
        for c in reversed(f):
            acc = self.mul(acc, x)
            if c % self.p:
                acc = [(a + c * o) % self.p for a, o in zip(acc, self.one)]
        return acc


def group_table_mod_p(mult_table: list[list[int]], p: int) -> FpAlgebra:
    n = len(mult_table)
    table = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            table[i][j][mult_table[i][j]] = 1
    one = [0] * n
    # identity index: e with e*x = x for all x
    for e in range(n):
        if all(mult_table[e][x] == x for x in range(n)):
            one[e] = 1
            break
    return FpAlgebra(p, table, one)


def algebra_from_matrices(p: int, mats: list[list[list[int]]], unit: list[list[int]]) -> tuple[FpAlgebra, list[list[int]]]:
    """Structure constants for the span of closed-under-product matrices.

    Returns (algebra, basis) where basis rows are flattened matrices giving
    the embedding; ``unit`` must lie in the span.
    """
    n = len(unit)
    flat = [[x % p for row in m for x in row] for m in mats]
    solver_rows = []
    basis = []
    for v in flat:
        if fp_rank(solver_rows + [v], p) > len(solver_rows):
            solver_rows.append(v)
            basis.append(v)
    solver = FpRowSolver(basis, p)
    dim = len(basis)

    def unflatten(v):
        return [v[i * n : (i + 1) * n] for i in range(dim and n)]

    def coords(mat_flat):
        c = solver.solve(mat_flat)
        if c is None:
            raise AlgebraStructureError("matrix outside algebra span")
        return c

    table = []
    for i in range(dim):
        brow = []
        mi = unflatten(basis[i])
        for j in range(dim):
            mj = unflatten(basis[j])
            prod = fp_mat_mul(mi, mj, p)
            brow.append(coords([x for row in prod for x in row]))
        table.append(brow)
    one = coords([x % p for row in unit for x in row])
    return FpAlgebra(p, table, one), basis


# ---------------------------------------------------------------------------
# Radical


def radical(B: FpAlgebra) -> list[list[int]]:
    """Basis of the Jacobson radical of B."""
    p, n = B.p, B.dim
    if n == 0:
        return []
    if p > n:
        gram = [
            [B.trace_lmul(B.mul(bi, bj)) for bj in _unit_vectors(n)]
            for bi in _unit_vectors(n)
        ]
        return fp_left_kernel(gram, p)
    # Small characteristic: chain of conditions by the elementary symmetric
    # functions e_{p^i} of the eigenvalues of left multiplication, read off
    # the characteristic polynomial (these are linear on each successive
    # subspace, and the chain terminates at the radical).
    from .modp import fp_charpoly

    space = _unit_vectors(n)
    l = 0
    while p ** (l + 1) <= n:
        l += 1
    for i in range(l + 1):
        if not space:
            break
        pi = p**i
        sign = 1 if pi % 2 == 0 else p - 1
        cond = []
        for v in space:
            row = []
            for y in space:
                chi = fp_charpoly(B.lmat(B.mul(v, y)), p)
                row.append((sign * chi[n - pi]) % p)
            cond.append(row)
        kern = fp_left_kernel(cond, p)
        space = [_combine(kern_row, space, p, n) for kern_row in kern]
    return [v for v in space if any(v)]


def _unit_vectors(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _combine(coeffs, vecs, p, n):
    out = [0] * n
    for c, v in zip(coeffs, vecs):
        if c:
            for k in range(n):
                if v[k]:
                    out[k] = (out[k] + c * v[k]) % p
    return out


def is_nilpotent_ideal(B: FpAlgebra, rows: list[list[int]]) -> bool:
    """Check rows span a two-sided ideal with some vanishing power."""
    p = B.p
    if not rows:
        return True
    basis = _echelon(rows, p)
    for i in range(B.dim):
        bi = [1 if k == i else 0 for k in range(B.dim)]
        for j in basis:
            if not _in_span(basis, B.mul(bi, j), p):
                return False
            if not _in_span(basis, B.mul(j, bi), p):
                return False
    cur = basis
    for _ in range(B.dim + 1):
        nxt_rows = []
        for x in cur:
            for y in basis:
                nxt_rows.append(B.mul(x, y))
        nxt = _echelon(nxt_rows, p)
        if not nxt:
            return True
        if len(nxt) == len(cur) and all(_in_span(cur, v, p) for v in nxt):
            return False
        cur = nxt
    return False


def _echelon(rows, p):
    out = []
    for r in rows:
        if fp_rank(out + [list(r)], p) > len(out):
            out.append(list(r))
    return out


def _in_span(basis, v, p):
    if not basis:
        return not any(x % p for x in v)
    return FpRowSolver(basis, p).solve(list(v)) is not None


def quotient_algebra(B: FpAlgebra, ideal_rows: list[list[int]]):
    """Quotient of B by a two-sided ideal.

    Returns (Bbar, project, lift) with project/lift mapping coordinate vectors.
    """
    p = B.p
    ideal = _echelon(ideal_rows, p)
    comp = []
    for v in _unit_vectors(B.dim):
        if fp_rank(ideal + comp + [v], p) > len(ideal) + len(comp):
            comp.append(v)
    full = ideal + comp
    solver = FpRowSolver(full, p)
    k = len(ideal)

    def project(x):
        c = solver.solve(list(x))
        return [ci % p for ci in c[k:]]

    def lift(xbar):
        out = [0] * B.dim
        for c, v in zip(xbar, comp):
            if c:
                for i in range(B.dim):
                    out[i] = (out[i] + c * v[i]) % p
        return out

    dim = len(comp)
    table = []
    for i in range(dim):
        row = []
        for j in range(dim):
            row.append(project(B.mul(comp[i], comp[j])))
        table.append(row)
    qb = FpAlgebra(p, table, project(B.one))
    return qb, project, lift


def jacobson_radical_fp(B: FpAlgebra) -> list[list[int]]:
    """Radical with full verification: two-sided nilpotent, semisimple quotient."""
    j = radical(B)
    if not is_nilpotent_ideal(B, j):
        raise AlgebraStructureError("radical candidate is not a nilpotent ideal")
    qb, _, _ = quotient_algebra(B, j)
    if radical(qb):
        raise AlgebraStructureError("quotient of radical candidate is not semisimple")
    return _echelon(j, B.p)


# ---------------------------------------------------------------------------
# Semisimple structure


def center(B: FpAlgebra) -> list[list[int]]:
    p, n = B.p, B.dim
    cond = []
    for s in range(n):
        row = []
        for i in range(n):
            comm = [
                (a - b) % p for a, b in zip(B.table[s][i], B.table[i][s])
            ]
            row.extend(comm)
        cond.append(row)
    return fp_left_kernel(cond, p)


@dataclass
class FpSimpleComponent:
    """One simple component of a semisimple F_p-algebra."""

    idempotent: list[int]               # central idempotent in B coords
    basis: list[list[int]]              # component basis rows in B coords
    algebra: FpAlgebra                  # component with its own structure constants
    prim_idempotent: list[int]          # primitive idempotent, component coords
    endo_deg: int                       # l with End(simple) = F_{p^l}
    matrix_size: int = 0                # n with component ≅ Mat_n(F_{p^l})
    simple_dim: int = 0                 # dim_Fp of the simple module = n*l


@dataclass
class FpSemisimple:
    algebra: FpAlgebra
    components: list[FpSimpleComponent] = field(default_factory=list)


def split_semisimple(B: FpAlgebra, seed: int = 0) -> FpSemisimple:
    """Central primitive idempotents and component data of a semisimple algebra."""
    p = B.p
    rng = Random(seed)
    zen = center(B)
    blocks = [B.one]
    final = []
    budget = RETRY_BUDGET * (len(zen) + 1)
    while blocks:
        e = blocks.pop()
        zbasis = _echelon([B.mul(e, z) for z in zen], p)
        if len(zbasis) == 1:
            final.append(e)
            continue
        split_done = False
        for _ in range(RETRY_BUDGET):
            budget -= 1
            if budget < 0:
                raise SplitFailure("central splitting budget exhausted")
            z = _random_combo(zbasis, p, rng)
            mp = _min_poly_unit(B, z, e)
            if len(mp) - 1 < 1:
                continue
            factors = berlekamp_factor(mp, p) if _squarefree(mp, p) else None
            if factors is None:
                raise SplitFailure("central element with non-squarefree minimal polynomial")
            if len(factors) == 1:
                if len(mp) - 1 == len(zbasis):
                    final.append(e)  # center of the block is a field
                    split_done = True
                    break
                continue
            for f in factors:
                cof = _poly_div(mp, f, p)
                inv = _poly_inverse_mod(cof, f, p)
                comb = _poly_mul_mod(inv, cof, p)
                ek = _eval_poly_unit(B, comb, z, e)
                blocks.append(ek)
            split_done = True
            break
        if not split_done:
            raise SplitFailure("central splitting made no progress")
    comps = []
    for e in final:
        comps.append(_component_data(B, e, rng))
    return FpSemisimple(algebra=B, components=comps)


def _component_data(B: FpAlgebra, e: list[int], rng: Random) -> FpSimpleComponent:
    p = B.p
    rows = _echelon([B.mul(e, B.mul(v, e)) for v in _unit_vectors(B.dim)], p)
    solver = FpRowSolver(rows, p)
    dim = len(rows)
    table = [
        [solver.solve(B.mul(rows[i], rows[j])) for j in range(dim)] for i in range(dim)
    ]
    comp = FpAlgebra(p, table, solver.solve(list(e)))
    prim = _primitive_idempotent(comp, rng)
    corner = _echelon(
        [comp.mul(prim, comp.mul(v, prim)) for v in _unit_vectors(dim)], p
    )
    l = len(corner)
    if dim % l != 0 or _isqrt_exact(dim // l) is None:
        raise AlgebraStructureError("component dimension inconsistent with corner field")
    n = _isqrt_exact(dim // l)
    return FpSimpleComponent(
        idempotent=e,
        basis=rows,
        algebra=comp,
        prim_idempotent=prim,
        endo_deg=l,
        matrix_size=n,
        simple_dim=n * l,
    )


def _isqrt_exact(x: int) -> int | None:
    from math import isqrt

    r = isqrt(x)
    return r if r * r == x else None


def _primitive_idempotent(comp: FpAlgebra, rng: Random) -> list[int]:
    """Idempotent e with e*comp*e a commutative field (certified)."""
    p = comp.p
    e = list(comp.one)
    for _ in range(RETRY_BUDGET * 4):
        corner = _echelon(
            [comp.mul(e, comp.mul(v, e)) for v in _unit_vectors(comp.dim)], p
        )
        if _corner_is_field(comp, corner, e, rng):
            return e
        x = _random_combo(corner, p, rng)
        mp = _min_poly_unit(comp, x, e)
        if len(mp) - 1 < 1 or not _squarefree(mp, p):
            continue
        factors = berlekamp_factor(mp, p)
        if len(factors) == 1:
            continue
        f = factors[0]
        cof = _poly_div(mp, f, p)
        inv = _poly_inverse_mod(cof, f, p)
        comb = _poly_mul_mod(inv, cof, p)
        e1 = _eval_poly_unit(comp, comb, x, e)
        if any(e1) and e1 != e:
            e = e1
    raise SplitFailure("primitive idempotent search exhausted")


def _corner_is_field(comp: FpAlgebra, corner: list[list[int]], e: list[int], rng: Random) -> bool:
    p = comp.p
    for a in corner:
        for b in corner:
            if comp.mul(a, b) != comp.mul(b, a):
                return False
    d = len(corner)
    for _ in range(RETRY_BUDGET):
        x = _random_combo(corner, p, rng)
        mp = _min_poly_unit(comp, x, e)
        if len(mp) - 1 == d and len(berlekamp_factor(mp, p) if _squarefree(mp, p) else [1, 1]) == 1:
            return True
    return False


def _random_combo(basis, p, rng):
    n = len(basis[0]) if basis else 0
    out = [0] * n
    while not any(out):
        out = [0] * n
        for v in basis:
            c = rng.randrange(p)
            if c:
                for i in range(n):
                    out[i] = (out[i] + c * v[i]) % p
    return out


def _min_poly_unit(B: FpAlgebra, x: list[int], unit: list[int]) -> list[int]:
    """Minimal polynomial of x in the unital algebra with identity `unit`."""
    rows = [list(unit)]
    cur = list(unit)
    while True:
        cur = B.mul(cur, x)
        sol = FpRowSolver(rows, B.p).solve(cur)
        if sol is not None:
            return poly_trim([(-c) % B.p for c in sol] + [1])
        rows.append(cur)


def _eval_poly_unit(B: FpAlgebra, f: list[int], x: list[int], unit: list[int]) -> list[int]:
    acc = [0] * B.dim
    for c in reversed(f):
        acc = B.mul(acc, x)
        if c % B.p:
            acc = [(a + c * u) % B.p for a, u in zip(acc, unit)]
    return acc


def _squarefree(f, p):
    from .modp import poly_deriv, poly_gcd

    return poly_gcd(f, poly_deriv(f, p), p) == [1]


def _poly_div(f, g, p):
    from .modp import poly_divmod

    q, r = poly_divmod(list(f), list(g), p)
    if poly_trim(r):
        raise AlgebraStructureError("inexact polynomial division")
    return q


def _poly_mul_mod(a, b, p):
    from .modp import poly_mul

    return poly_mul(a, b, p)


def _poly_inverse_mod(a, mod, p):
    from .modp import poly_divmod, poly_mul, poly_sub

    r0, r1 = list(mod), poly_trim([x % p for x in a])
    t0, t1 = [], [1]
    while r1:
        q, r = poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, p), p)
    if len(r0) != 1:
        raise AlgebraStructureError("polynomial not invertible modulo factor")
    c = pow(r0[0], -1, p)
    return [x * c % p for x in t0]


# ---------------------------------------------------------------------------
# Modules over F_p-algebras


def module_hom_space(mats_src: list[list[list[int]]], mats_dst: list[list[list[int]]], p: int) -> list[list[list[int]]]:
    """Basis of {F : M_src[s] @ F = F @ M_dst[s] for all s} over F_p."""
    m = len(mats_src[0]) if mats_src else 0
    n = len(mats_dst[0]) if mats_dst else 0
    if m == 0 or n == 0:
        return []
    cond_cols = []
    rows = []
    for a in range(m):
        for b in range(n):
            row = []
            for ms, md in zip(mats_src, mats_dst):
                # entry (i,j) of Ms@F - F@Md as linear function of F[a][b]
                for i in range(m):
                    for j in range(n):
                        c = 0
                        if j == b:
                            c += ms[i][a]
                        if i == a:
                            c -= md[b][j]
                        row.append(c % p)
            rows.append(row)
    kern = fp_left_kernel(rows, p)
    out = []
    for v in kern:
        out.append([[v[a * n + b] % p for b in range(n)] for a in range(m)])
    return out


def module_action_of(coords: list[int], mats: list[list[list[int]]], p: int) -> list[list[int]]:
    """Action matrix of the algebra element with the given basis coordinates."""
    n = len(mats[0])
    out = [[0] * n for _ in range(n)]
    for c, m in zip(coords, mats):
        if c % p:
            for i in range(n):
                for j in range(n):
                    if m[i][j]:
                        out[i][j] = (out[i][j] + c * m[i][j]) % p
    return out


def isotypic_multiplicity(compo: FpSimpleComponent, mats: list[list[list[int]]], p: int, embed=None) -> int:
    """Multiplicity of the component's simple module in the module given by mats.

    ``embed`` maps component coordinates to full-algebra coordinates (rows);
    identity when the module is over the component algebra itself.
    """
    prim_full = compo.prim_idempotent if embed is None else embed(compo.prim_idempotent)
    act = module_action_of(prim_full, mats, p)
    return fp_rank(act, p) // compo.endo_deg
