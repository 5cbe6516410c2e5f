"""Isomorphism testing of lattices over maximal orders in simple components.

Covers the supported skew fields (Q, imaginary quadratic with class number
one, totally definite rational quaternion algebras of one-sided class number
one).  Matrix components are normalized so the maximal order becomes the full
integral matrix ring, after which the first-column idempotent performs the
Morita reduction; Steinitz forms plus the principal ideal solver finish the
job.  All certificates are verified exactly before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .algebra import Component, ComponentKind, SCAlgebra
from .errors import NotAnIso, NotPrincipalPair, UnsupportedComponent
from .linalg import (
    MatQ,
    PseudoLattice,
    hnf_int,
    module_index,
    solve_row,
    zmodule_from_rows,
)
from .orders import OrderZ

Q = Fraction


# ---------------------------------------------------------------------------
# skew fields


class SkewField:
    """A supported skew field D with a fixed maximal order.

    deg is dim_Q(D); the reduced norm is a positive definite form of rank deg
    (ranks 1, 2, 4 occur).
    """

    def __init__(self, algebra: SCAlgebra, kind: ComponentKind, delta: OrderZ):
        self.algebra = algebra
        self.kind = kind
        self.delta = delta
        self.deg = algebra.dim
        if self.deg not in (1, 2, 4):
            raise UnsupportedComponent(f"skew field of dimension {self.deg}")

    def trd(self, x) -> Q:
        t = self.algebra.trace_lmul(x)
        return t / 2 if self.deg == 4 else t

    def conj(self, x):
        if self.deg == 1:
            return tuple(x)
        t = self.trd(x)
        return tuple(t * o - xi for xi, o in zip(x, self.algebra.one))

    def nrd(self, x) -> Q:
        if self.deg == 1:
            one = self.algebra.one
            idx = next(i for i, o in enumerate(one) if o)
            return x[idx] / one[idx]
        prod = self.algebra.mul(x, self.conj(x))
        one = self.algebra.one
        idx = next(i for i, o in enumerate(one) if o)
        scal = prod[idx] / one[idx]
        if prod != tuple(scal * o for o in one):
            raise ValueError("norm is not scalar; element outside a quaternion/field")
        return scal

    def index_to_norm(self, idx: Q) -> Q | None:
        """Solve |det of right multiplication| = idx for the reduced norm."""
        if self.deg == 1:
            return idx
        if self.deg == 2:
            return idx
        r = _sqrt_rational(idx)
        return r

    def norm_gram(self, rows) -> MatQ:
        n = len(rows)
        g = [[Q(0)] * n for _ in range(n)]
        nr = [self.nrd(r) for r in rows]
        for i in range(n):
            for j in range(i, n):
                s = self.nrd(tuple(a + b for a, b in zip(rows[i], rows[j])))
                val = (s - nr[i] - nr[j]) / 2
                g[i][j] = g[j][i] = val
        return MatQ(g)

    def verify_norm_form(self, rng) -> bool:
        for _ in range(20):
            x = tuple(Q(rng.randrange(-5, 6)) for _ in range(self.deg))
            y = tuple(Q(rng.randrange(-5, 6)) for _ in range(self.deg))
            if self.nrd(self.algebra.mul(x, y)) != self.nrd(x) * self.nrd(y):
                return False
            if any(x) and self.nrd(x) <= 0:
                return False
        return True


def _sqrt_rational(x: Q) -> Q | None:
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Q(a, b)
    return None


# standalone fixtures ---------------------------------------------------------


def quaternion_algebra(a, b) -> SCAlgebra:
    """Basis (1, i, j, ij) with i^2 = a, j^2 = b, ij = -ji."""
    a, b = Q(a), Q(b)
    z = Q(0)
    o = Q(1)

    def vec(c0=z, c1=z, c2=z, c3=z):
        return (c0, c1, c2, c3)

    table = [[None] * 4 for _ in range(4)]
    table[0] = [vec(o), vec(c1=o), vec(c2=o), vec(c3=o)]
    table[1] = [vec(c1=o), vec(a), vec(c3=o), vec(c2=a)]
    table[2] = [vec(c2=o), vec(c3=-o), vec(b), vec(c1=-b)]
    table[3] = [vec(c3=o), vec(c2=-a), vec(c1=b), vec(-a * b)]
    return SCAlgebra(table, vec(o), labels=["1", "i", "j", "k"], check=True)


def hurwitz_order() -> tuple[SCAlgebra, OrderZ]:
    alg = quaternion_algebra(-1, -1)
    h = Q(1, 2)
    lat = PseudoLattice.from_rows(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [h, h, h, h]]
    )
    return alg, OrderZ(alg, lat, is_maximal=True)


def quadratic_field(disc: int) -> tuple[SCAlgebra, OrderZ]:
    """Q(sqrt(d)) with its maximal order, for a fundamental discriminant."""
    if disc % 4 == 1:
        # basis (1, w) with w = (1+sqrt(disc))/2: w^2 = w + (disc-1)/4
        c = Q(disc - 1, 4)
        table = [
            [(Q(1), Q(0)), (Q(0), Q(1))],
            [(Q(0), Q(1)), (c, Q(1))],
        ]
    elif disc % 4 == 0:
        m = disc // 4
        table = [
            [(Q(1), Q(0)), (Q(0), Q(1))],
            [(Q(0), Q(1)), (Q(m), Q(0))],
        ]
    else:
        raise ValueError("not a discriminant")
    alg = SCAlgebra(table, (Q(1), Q(0)), labels=["1", "w"], check=True)
    return alg, OrderZ(alg, PseudoLattice.standard(2), is_maximal=True)


def gaussian_integers():
    return quadratic_field(-4)


def eisenstein_integers():
    return quadratic_field(-3)


def rational_field_order() -> tuple[SCAlgebra, OrderZ]:
    alg = SCAlgebra([[(Q(1),)]], (Q(1),), labels=["1"], check=True)
    return alg, OrderZ(alg, PseudoLattice.standard(1), is_maximal=True)


def skewfield_for(kind: ComponentKind, algebra: SCAlgebra, delta: OrderZ) -> SkewField:
    return SkewField(algebra=algebra, kind=kind, delta=delta)


# ---------------------------------------------------------------------------
# short vectors (exact Fincke-Pohst)


def short_vectors_exact(gram: MatQ, target: Q) -> list[tuple[int, ...]]:
    """All integer vectors with q(x) = target for a positive definite Gram."""
    n = gram.nrows
    if target < 0:
        return []
    # rational LDL^T
    g = [list(r) for r in gram.rows]
    L = [[Q(0)] * n for _ in range(n)]
    D = [Q(0)] * n
    for i in range(n):
        L[i][i] = Q(1)
        s = g[i][i]
        for k in range(i):
            s -= D[k] * L[i][k] * L[i][k]
        D[i] = s
        if s <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            t = g[j][i]
            for k in range(i):
                t -= D[k] * L[j][k] * L[i][k]
            L[j][i] = t / D[i]
    out = []
    x = [0] * n

    def floor_sqrt_ratio(num: Q) -> int:
        if num < 0:
            return -1
        return isqrt(num.numerator * num.denominator) // num.denominator

    def rec(i: int, rem: Q):
        if i < 0:
            if rem == 0:
                out.append(tuple(x))
            return
        c = sum(L[j][i] * x[j] for j in range(i + 1, n))
        s = floor_sqrt_ratio(rem / D[i])
        # |xi + c| <= sqrt(rem/D_i); widen the integer window by one on each
        # side and filter with the exact inequality.
        for xi in range(_ceil_q(-c) - s - 1, _floor_q(-c) + s + 2):
            val = D[i] * (Q(xi) + c) ** 2
            if val <= rem:
                x[i] = xi
                rec(i - 1, rem - val)
        x[i] = 0

    rec(n - 1, target)
    return sorted(out)


def _ceil_q(q: Q) -> int:
    return -((-q.numerator) // q.denominator)


def _floor_q(q: Q) -> int:
    return q.numerator // q.denominator


# ---------------------------------------------------------------------------
# one-sided ideals over a maximal order


@dataclass
class DeltaIdeal:
    """Full one-sided fractional ideal over the skew field's maximal order."""

    skew: SkewField
    side: str                      # 'left' or 'right'
    lattice: PseudoLattice         # rank deg, in D coordinates

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if self.lattice.rank != self.skew.deg:
            raise ValueError("ideal lattice must be full in D")

    def verify_stable(self) -> bool:
        A = self.skew.algebra
        for d in self.skew.delta.zbasis():
            for idl, row in zip(self.lattice.ideals, self.lattice.basis):
                v = tuple(idl.gen * x for x in row)
                prod = A.mul(d, v) if self.side == "left" else A.mul(v, d)
                if not self.lattice.contains(prod):
                    return False
        return True

    def norm_index(self) -> Q:
        """Module index [Delta : ideal] as a positive rational."""
        return module_index(self.skew.delta.lattice, self.lattice).gen


def ideal_times_element(skew: SkewField, lattice: PseudoLattice, xi) -> PseudoLattice:
    """The lattice {c * xi : c in lattice} (right multiplication by xi)."""
    A = skew.algebra
    rows = []
    for idl, row in zip(lattice.ideals, lattice.basis):
        v = tuple(idl.gen * x for x in row)
        rows.append(A.mul(v, xi))
    return zmodule_from_rows(rows, skew.deg)


def principal_ideal_solve(b_ideal: DeltaIdeal, c_ideal: DeltaIdeal):
    """xi in D^x with b = c * xi, found by norm-targeted short vectors.

    Raises NotPrincipalPair when no generator exists at the predicted norm
    (impossible for full ideals over the supported class-number-one orders
    unless the inputs are inconsistent).
    """
    skew = b_ideal.skew
    if skew is not c_ideal.skew and skew.algebra is not c_ideal.skew.algebra:
        raise ValueError("ideals over different skew fields")
    if b_ideal.side != "left" or c_ideal.side != "left":
        raise ValueError("principal ideal solver works on left ideals")
    A = skew.algebra
    # candidate xi live in L = {x : c x ⊆ b}
    bm = b_ideal.lattice.basis_matrix()
    c_gens = [tuple(i.gen * x for x in row) for i, row in zip(c_ideal.lattice.ideals, c_ideal.lattice.basis)]
    cols = []
    for s in range(skew.deg):
        bs = A.basis_vec(s)
        col = []
        for g in c_gens:
            cc = solve_row(bm, A.mul(g, bs))
            col.extend(ci / idl.gen for ci, idl in zip(cc, b_ideal.lattice.ideals))
        cols.append(col)
    from .linalg import integral_preimage_lattice

    t_rows = integral_preimage_lattice(MatQ(cols).transpose())
    L = PseudoLattice.from_rows(t_rows, ambient_dim=skew.deg)
    # predicted reduced norm from the index ratio
    idx_c = module_index(skew.delta.lattice, c_ideal.lattice).gen
    idx_b = module_index(skew.delta.lattice, b_ideal.lattice).gen
    target = skew.index_to_norm(idx_b / idx_c)
    if target is None:
        raise NotPrincipalPair("index ratio is not a norm")
    # scale: elements of L have rational coords; enumerate via the norm Gram
    zb = L.zbasis_matrix()
    if skew.deg == 1:
        gen = zb.rows[0][0]
        ratio = target / abs(gen)
        cands = [(int(ratio),), (-int(ratio),)] if ratio.denominator == 1 else []
    else:
        gram = skew.norm_gram([tuple(r) for r in zb.rows])
        cands = short_vectors_exact(gram, target)
    for cand in cands:
        xi = tuple(sum(Q(c) * zb.rows[k][j] for k, c in enumerate(cand)) for j in range(skew.deg))
        if not any(xi):
            continue
        if ideal_times_element(skew, c_ideal.lattice, xi) == b_ideal.lattice:
            return xi
    raise NotPrincipalPair("no generator found at the predicted norm")


def _is_int(q: Q) -> bool:
    return q.denominator == 1


# ---------------------------------------------------------------------------
# Steinitz form


@dataclass
class SteinitzData:
    """M = Delta m_1 + ... + Delta m_{r-1} + b m_r (direct), verified."""

    rank: int
    vectors: list[tuple]           # r ambient row vectors m_1..m_r
    ideal: DeltaIdeal              # left ideal b attached to m_r
    block_dim: int                 # dim_Q of D

    def recombined_lattice(self, skew: SkewField, ambient_dim: int) -> PseudoLattice:
        A = skew.algebra
        rows = []
        deg = skew.deg
        for v in self.vectors[:-1]:
            for d in skew.delta.zbasis():
                rows.append(_d_scale_vec(A, d, v, deg))
        last = self.vectors[-1]
        for idl, brow in zip(self.ideal.lattice.ideals, self.ideal.lattice.basis):
            beta = tuple(idl.gen * x for x in brow)
            rows.append(_d_scale_vec(A, beta, last, deg))
        return zmodule_from_rows(rows, ambient_dim)


def _d_scale_vec(A: SCAlgebra, d, v, deg: int):
    """Left-multiply a blockwise D^r row vector by d in D."""
    r = len(v) // deg
    out = []
    for blk in range(r):
        seg = tuple(v[blk * deg : (blk + 1) * deg])
        out.extend(A.mul(d, seg))
    return out


def steinitz_form(M: PseudoLattice, skew: SkewField) -> SteinitzData:
    """Steinitz form of a full Delta-lattice in D^r (blockwise coordinates)."""
    deg = skew.deg
    amb = M.ambient_dim
    if amb % deg != 0:
        raise ValueError("ambient dimension is not a multiple of deg(D)")
    r = amb // deg
    A = skew.algebra
    zb = [tuple(row) for row in M.zbasis_matrix().rows]
    vectors = []
    current_rows = zb
    offset = 0
    while r - len(vectors) > 1:
        # left ideal of first-block coordinates
        proj = [row[offset : offset + deg] for row in current_rows]
        den = 1
        for prow in proj:
            for x in prow:
                den = den * x.denominator // __import__("math").gcd(den, x.denominator)
        int_proj = [[int(x * den) for x in prow] for prow in proj]
        h, u, pivots = hnf_int(int_proj, transform=True)
        if len(pivots) != deg:
            raise ValueError("projection ideal is not full; lattice not full rank")
        c1_rows = [[Q(x, den) for x in h[i]] for i in range(deg)]
        c1 = PseudoLattice.from_rows(c1_rows, ambient_dim=deg)
        c1_ideal = DeltaIdeal(skew=skew, side="left", lattice=c1)
        delta_ideal = DeltaIdeal(skew=skew, side="left", lattice=skew.delta.lattice)
        xi = principal_ideal_solve(c1_ideal, delta_ideal)  # c1 = Delta * xi
        # member of the current lattice with first block xi
        coords = solve_row(MatQ(c1_rows), xi)
        m1 = [Q(0)] * len(current_rows[0])
        for ci, urow in zip(coords, u[: len(pivots)]):
            if ci:
                for uj, row in zip(urow, current_rows):
                    if uj:
                        m1 = [a + ci * uj * b for a, b in zip(m1, row)]
        vectors.append(tuple(m1))
        # kernel part: combinations with zero first block
        kern_rows = []
        for urow in u[len(pivots) :]:
            vec = [Q(0)] * len(current_rows[0])
            for uj, row in zip(urow, current_rows):
                if uj:
                    vec = [a + uj * b for a, b in zip(vec, row)]
            kern_rows.append(vec)
        current_rows = kern_rows
        offset += deg
    # the last block: remaining rows projected to the final D-coordinate block
    proj = [tuple(row[offset : offset + deg]) for row in current_rows]
    last_lat = zmodule_from_rows(proj, deg)
    ideal = DeltaIdeal(skew=skew, side="left", lattice=last_lat)
    m_last = [Q(0)] * amb
    for j in range(deg):
        m_last[offset + j] = A.one[j]
    vectors.append(tuple(m_last))
    data = SteinitzData(rank=r, vectors=vectors, ideal=ideal, block_dim=deg)
    if data.recombined_lattice(skew, amb) != M.canonical():
        raise ValueError("Steinitz recombination failed verification")
    return data


# ---------------------------------------------------------------------------
# maximal order normalization and Morita reduction


def normalize_max_order(comp: Component, m_order: OrderZ):
    """Conjugate a maximal order in Mat_n(Q) onto the integral matrix ring.

    Returns (S, units) where S is the change of basis on the simple module and
    units are new matrix units (component coordinates) with the maximal order
    equal to their exact Z-span.  Verified by order equality.
    """
    kind = comp.kind
    if kind is None or kind.tag != "matrix_over_Q":
        raise UnsupportedComponent("normalization requires a matrix-over-Q component")
    n = kind.n
    A = comp.algebra
    units0 = comp.splitting.matrix_units
    if n == 1:
        return MatQ.identity(1), {(0, 0): tuple(A.one)}

    def phi(x) -> MatQ:
        # column-convention coordinates of x on the simple module basis u_k1
        cols = []
        for k in range(n):
            prod = A.mul(x, units0[(k, 0)])
            col = []
            # prod = sum_l c_l * u_l0
            basis_rows = MatQ([units0[(l, 0)] for l in range(n)])
            c = solve_row(basis_rows, prod)
            cols.append(list(c))
        return MatQ(cols).transpose()

    # lattice L = m_order . u_00 inside the simple module
    rows = []
    for b in m_order.zbasis():
        m = phi(b)
        # column image of u_00-generator: first column of phi(b)
        rows.append([m[i, 0] for i in range(n)])
    lat = zmodule_from_rows(rows, n)
    s = lat.zbasis_matrix().transpose()
    s_inv = s.inv()
    # new matrix units: u'_kl = phi^{-1}(S E_kl S^{-1})
    basis_rows = MatQ([_flatten(phi(A.basis_vec(i))) for i in range(A.dim)])
    units = {}
    for k in range(n):
        for l in range(n):
            e_kl = MatQ([[Q(1) if (i == k and j == l) else Q(0) for j in range(n)] for i in range(n)])
            target = s @ e_kl @ s_inv
            x = solve_row(basis_rows, _flatten(target))
            if x is None:
                raise ValueError("normalization solve failed")
            units[(k, l)] = tuple(x)
    # verification: Z-span of units equals the maximal order
    span = zmodule_from_rows([units[(k, l)] for k in range(n) for l in range(n)], A.dim)
    if span != m_order.lattice.canonical():
        raise ValueError("normalized maximal order does not match")
    return s, units


def _flatten(m: MatQ):
    return [x for row in m.rows for x in row]


@dataclass
class ComponentContext:
    """Everything needed to test lattices over one component's maximal order."""

    comp: Component
    m_order: OrderZ                      # maximal order, component coordinates
    skew: SkewField
    n: int                               # matrix size (1 for skew-field components)
    units: dict | None                   # normalized matrix units (n >= 2)
    act: callable                        # component coords -> ambient MatQ


def make_component_context(comp: Component, m_comp: OrderZ, module) -> ComponentContext:
    kind = comp.kind
    if kind is None:
        raise UnsupportedComponent("component kind not determined")

    def act(coords) -> MatQ:
        return module.act_element(comp.to_parent(coords))

    if kind.tag == "matrix_over_Q" and kind.n >= 2:
        _, units = normalize_max_order(comp, m_comp)
        alg, delta = rational_field_order()
        skew = SkewField(algebra=alg, kind=ComponentKind(tag="rational_field"), delta=delta)
        return ComponentContext(comp=comp, m_order=m_comp, skew=skew, n=kind.n, units=units, act=act)
    skew = SkewField(algebra=comp.algebra, kind=kind, delta=m_comp)
    return ComponentContext(comp=comp, m_order=m_comp, skew=skew, n=1, units=None, act=act)


def morita_reduce(ctx: ComponentContext, lat: PseudoLattice) -> PseudoLattice:
    """e_11 * lattice (ambient coordinates); identity for n = 1."""
    if ctx.n == 1:
        return lat
    e11 = ctx.act(ctx.units[(0, 0)])
    rows = []
    for idl, row in zip(lat.ideals, lat.basis):
        rows.append([idl.gen * v for v in _row_mul(row, e11)])
    return zmodule_from_rows(rows, lat.ambient_dim)


def _row_mul(row, m: MatQ):
    return [sum(row[i] * m.rows[i][j] for i in range(len(row)) if row[i]) for j in range(m.ncols)]


def _d_structure(ctx: ComponentContext, span_rows):
    """D-basis of a D-stable subspace and the coordinate solve matrix."""
    A = ctx.skew.algebra
    deg = ctx.skew.deg
    if ctx.n == 1:
        d_mats = [ctx.act(ctx.comp.algebra.basis_vec(i)) for i in range(deg)]
    else:
        # D = Q acting by scalars
        d_mats = [MatQ.identity(len(span_rows[0]))]
    basis = []
    span: list = []

    def in_span(v):
        return bool(span) and solve_row(MatQ(span), v) is not None

    for w in span_rows:
        if in_span(w):
            continue
        basis.append(tuple(w))
        for dm in d_mats:
            img = _row_mul(list(w), dm)
            if not in_span(img):
                span.append(tuple(img))
    t_rows = []
    for w in basis:
        for dm in d_mats:
            t_rows.append(_row_mul(list(w), dm))
    return basis, MatQ(t_rows)


def _lattice_to_dcoords(ctx: ComponentContext, lat: PseudoLattice, t_matrix: MatQ) -> PseudoLattice:
    deg = ctx.skew.deg
    r = t_matrix.nrows // deg
    rows = []
    for row in lat.zbasis_matrix().rows:
        c = solve_row(t_matrix, row)
        if c is None:
            raise ValueError("lattice vector outside the D-span")
        rows.append(c)
    return zmodule_from_rows(rows, r * deg)


def _dcoords_to_ambient(coords, basis, ctx: ComponentContext):
    deg = ctx.skew.deg
    amb = len(basis[0])
    out = [Q(0)] * amb
    for j, w in enumerate(basis):
        block = coords[j * deg : (j + 1) * deg]
        if not any(block):
            continue
        if ctx.n == 1:
            m = ctx.act(tuple(block))
            img = _row_mul(list(w), m)
        else:
            img = [block[0] * x for x in w]
        out = [a + b for a, b in zip(out, img)]
    return out


@dataclass
class ComponentIsoResult:
    status: str                      # iso | not_iso | inconclusive
    map_ambient: MatQ | None = None
    reason: str = ""


def iso_over_max_component(
    ctx_x: ComponentContext,
    ctx_y: ComponentContext,
    Xi: PseudoLattice,
    Yi: PseudoLattice,
) -> ComponentIsoResult:
    """Isomorphism of two lattices over the component's maximal order, or a
    reasoned refusal.  Returned maps are ambient matrices verified to send
    Xi exactly onto Yi."""
    if Xi.rank != Yi.rank:
        return ComponentIsoResult(status="not_iso", reason="component ranks differ")
    if Xi.is_zero():
        return ComponentIsoResult(status="iso", map_ambient=MatQ.identity(Xi.ambient_dim))
    m1 = morita_reduce(ctx_x, Xi)
    n1 = morita_reduce(ctx_y, Yi)
    wx, tx = _d_structure(ctx_x, [list(r) for r in m1.zbasis_matrix().rows])
    wy, ty = _d_structure(ctx_y, [list(r) for r in n1.zbasis_matrix().rows])
    deg = ctx_x.skew.deg
    if tx.nrows != ty.nrows:
        return ComponentIsoResult(status="not_iso", reason="reduced ranks differ")
    m1d = _lattice_to_dcoords(ctx_x, m1, tx)
    n1d = _lattice_to_dcoords(ctx_y, n1, ty)
    st_m = steinitz_form(m1d, ctx_x.skew)
    st_n = steinitz_form(n1d, ctx_y.skew)
    if st_m.rank != st_n.rank:
        return ComponentIsoResult(status="not_iso", reason="Steinitz ranks differ")
    try:
        xi = principal_ideal_solve(st_n.ideal, st_m.ideal)  # ideal(N) = ideal(M) * xi
    except NotPrincipalPair:
        r = st_m.rank
        kind = ctx_x.comp.kind
        if ctx_x.n == 1 and r == 1:
            # rank-one exception: the ideal-class comparison is itself decisive
            return ComponentIsoResult(status="not_iso", reason="ideal classes differ (rank one)")
        if kind is not None and kind.cancellation != "guaranteed":
            return ComponentIsoResult(
                status="inconclusive", reason="no cancellation guarantee for this component"
            )
        # class number one with guaranteed cancellation: a failed solve is a bug
        raise
    # xi satisfies ideal(N) = ideal(M) xi; the map m_r -> xi n_r ... build g on
    # Steinitz coordinates: m_k -> n_k (k < r), m_r |-> x * xi applied on the right
    A = ctx_x.skew.algebra
    r = st_m.rank
    g_rows = []
    # Q-basis of the source D^r: blocks of D-basis elements at each Steinitz vector
    src_vectors = st_m.vectors
    dst_vectors = st_n.vectors
    src_rows = []
    images = []
    for k in range(r):
        for s in range(deg):
            bs = A.basis_vec(s) if deg > 1 else (Q(1),)
            src_rows.append(_d_scale_vec(A, bs, src_vectors[k], deg))
            if k < r - 1:
                images.append(_d_scale_vec(A, bs, dst_vectors[k], deg))
            else:
                coef = A.mul(bs, xi) if deg > 1 else (bs[0] * xi[0],)
                images.append(_d_scale_vec(A, coef, dst_vectors[k], deg))
    src_m = MatQ(src_rows)
    g_on_coords = src_m.inv() @ MatQ(images)
    # ambient version on the reduced subspaces
    g_amb = _subspace_map_to_ambient(ctx_x, ctx_y, tx, ty, wx, wy, g_on_coords)
    if ctx_x.n == 1:
        f_amb = g_amb
    else:
        f_amb = _morita_lift_matrix(ctx_x, ctx_y, g_amb)
    image = zmodule_from_rows(
        [[idl.gen * v for v in _row_mul(list(row), f_amb)] for idl, row in zip(Xi.ideals, Xi.basis)],
        Yi.ambient_dim,
    )
    if image != Yi.canonical():
        raise NotAnIso("component isomorphism failed the exact image check")
    return ComponentIsoResult(status="iso", map_ambient=f_amb)


def morita_lift(ctx_x: ComponentContext, ctx_y: ComponentContext, g_amb: MatQ) -> MatQ:
    """Lift a Delta-isomorphism of the reduced lattices to the full component."""
    return _morita_lift_matrix(ctx_x, ctx_y, g_amb)


def _morita_lift_matrix(ctx_x, ctx_y, g_amb: MatQ) -> MatQ:
    n = ctx_x.n
    total = None
    for k in range(n):
        lft = ctx_x.act(ctx_x.units[(0, k)])
        rgt = ctx_y.act(ctx_y.units[(k, 0)])
        term = lft @ g_amb @ rgt
        total = term if total is None else total + term
    return total


def _subspace_map_to_ambient(ctx_x, ctx_y, tx: MatQ, ty: MatQ, wx, wy, g_on_coords: MatQ) -> MatQ:
    """Extend a map given on D-coordinates of a subspace to an ambient matrix
    (zero on a complement)."""
    amb = len(wx[0])
    # rows of tx span the source subspace (as Q-space)
    src_rows = [list(r) for r in tx.rows]
    # images: coords row i of g_on_coords expressed in ambient via ty/wy
    img_rows = []
    for row in g_on_coords.rows:
        img_rows.append(_dcoords_to_ambient(list(row), wy, ctx_y))
    # complete src_rows to a basis of Q^amb with kernel complement
    basis = [list(r) for r in src_rows]
    comp_rows = []
    for i in range(amb):
        cand = [Q(1) if j == i else Q(0) for j in range(amb)]
        trial = basis + comp_rows + [cand]
        if MatQ(trial).rank() == len(trial):
            comp_rows.append(cand)
        if len(basis) + len(comp_rows) == amb:
            break
    full = MatQ(basis + comp_rows)
    images_full = img_rows + [[Q(0)] * amb for _ in comp_rows]
    return full.inv() @ MatQ(images_full)
