"""Z-orders in semisimple Q-algebras and lattices over them.

Maximal orders are computed componentwise by the radical-idealizer iteration
after central splitting; the bad-prime set comes from the Smith form of the
basis change.  Conductors and left/right orders reduce to integral-preimage
lattices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .algebra import SCAlgebra, WedderburnDecomp, algebra_center, wedderburn
from .errors import DimensionMismatch, NotSuborder, UnsupportedComponent
from .fpalgebra import FpAlgebra, radical as fp_radical
from .linalg import (
    MatQ,
    PseudoLattice,
    left_kernel_int,
    integral_preimage_lattice,
    module_index,
    snf_int,
    solve_row,
    zmodule_from_rows,
)

Q = Fraction


class OrderZ:
    """A Z-order: a full lattice in a Q-algebra closed under multiplication."""

    def __init__(self, algebra: SCAlgebra, lattice: PseudoLattice, is_maximal: bool = False, check: bool = True):
        self.algebra = algebra
        self.lattice = lattice.canonical()
        self.is_maximal = is_maximal
        self._mult_table = None
        self._gens = None
        if check:
            self.verify_order()

    @property
    def dim(self) -> int:
        return self.lattice.rank

    def zbasis(self) -> list[tuple[Q, ...]]:
        return [tuple(r) for r in self.lattice.basis]

    def verify_order(self):
        A = self.algebra
        if self.lattice.rank != A.dim:
            raise ValueError("order lattice is not full in the algebra")
        if not self.lattice.contains(A.one):
            raise ValueError("order does not contain the unity")
        basis = self.zbasis()
        for x in basis:
            for y in basis:
                if not self.lattice.contains(A.mul(x, y)):
                    raise ValueError("order lattice is not closed under multiplication")

    def mult_table(self) -> list[list[list[int]]]:
        """Integer structure constants w.r.t. the lattice basis."""
        if self._mult_table is None:
            from .linalg import RowSolver

            basis = self.zbasis()
            solver = RowSolver(self.lattice.basis_matrix())
            table = []
            for x in basis:
                row = []
                for y in basis:
                    c = solver.solve(self.algebra.mul(x, y))
                    row.append([int(v) for v in c])
                table.append(row)
            self._mult_table = table
        return self._mult_table

    def one_coords(self) -> list[int]:
        c = solve_row(self.lattice.basis_matrix(), self.algebra.one)
        return [int(v) for v in c]

    def mod_p_algebra(self, p: int) -> FpAlgebra:
        table = self.mult_table()
        return FpAlgebra(p, [[[c % p for c in cell] for cell in row] for row in table], [c % p for c in self.one_coords()])

    def ring_generators(self) -> list[int]:
        """Indices of lattice basis elements generating the order as a ring."""
        if self._gens is not None:
            return self._gens
        A = self.algebra
        basis = self.zbasis()
        span = [tuple(A.one)]
        gens: list[int] = []

        def in_span(v):
            return solve_row(MatQ(span), v) is not None if span else False

        def close():
            changed = True
            while changed:
                changed = False
                cur = list(span)
                for g in gens:
                    for v in cur:
                        for prod in (A.mul(basis[g], v), A.mul(v, basis[g])):
                            if not in_span(prod):
                                span.append(tuple(prod))
                                changed = True

        for j in range(len(basis)):
            if not in_span(basis[j]):
                gens.append(j)
                close()
            if len(span) == A.dim:
                break
        self._gens = gens
        return gens


class ModuleSpace:
    """An A-module presented by the action of an order's lattice basis.

    Action matrices are row-convention (vectors are rows, v -> v @ M) and
    anti-multiplicative in the algebra element.
    """

    def __init__(self, order: OrderZ, action: list[MatQ], is_regular: bool = False):
        self.order = order
        self.action = list(action)
        self.dim = action[0].nrows if action else 0
        self.is_regular = is_regular
        if len(action) != order.dim:
            raise DimensionMismatch("one action matrix per order basis element")
        from .linalg import RowSolver

        self._solver_basis = RowSolver(MatQ(order.zbasis()))

    @staticmethod
    def regular(order: OrderZ) -> "ModuleSpace":
        A = order.algebra
        return ModuleSpace(order, [A.lmat(b) for b in order.zbasis()], is_regular=True)

    def act_coords(self, coords) -> MatQ:
        """Action of sum_j coords[j] * basis_j."""
        out = None
        for c, m in zip(coords, self.action):
            if c:
                term = m.scale(c)
                out = term if out is None else out + term
        return out if out is not None else MatQ.zeros(self.dim, self.dim)

    def act_element(self, a) -> MatQ:
        """Action of an arbitrary algebra element (coords in the algebra basis)."""
        c = self._solver_basis.solve(a)
        if c is None:
            raise ValueError("element outside the order's span")
        return self.act_coords(c)

    def generator_indices(self) -> list[int]:
        return self.order.ring_generators()


@dataclass
class LatticeMod:
    """A lattice inside a module over an order."""

    module: ModuleSpace
    lattice: PseudoLattice

    def verify_stable(self) -> bool:
        lat = self.lattice
        for j, m in enumerate(self.module.action):
            for idl, row in zip(lat.ideals, lat.basis):
                img = tuple(x * idl.gen for x in _row_times(row, m))
                if not lat.contains(img):
                    return False
        return True

    def action_on_basis(self, j: int) -> MatQ:
        """Action matrix of basis element j written w.r.t. the lattice basis."""
        b = self.lattice.basis_matrix()
        return b @ self.module.action[j] @ b.inv() if self.lattice.rank == self.lattice.ambient_dim else _restrict(b, self.module.action[j])


def _restrict(b: MatQ, m: MatQ) -> MatQ:
    rows = []
    for r in b.rows:
        img = _row_times(r, m)
        c = solve_row(b, img)
        rows.append(c)
    return MatQ(rows)


def _row_times(row, m: MatQ):
    return tuple(
        sum(row[i] * m.rows[i][j] for i in range(len(row)) if row[i]) for j in range(m.ncols)
    )


@dataclass(frozen=True)
class BadPrimes:
    primes: tuple[int, ...]


def _primes_of(n: int) -> list[int]:
    n = abs(n)
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


# ---------------------------------------------------------------------------
# radical preimage and idealizer


def radical_mod_p(order: OrderZ, p: int) -> PseudoLattice:
    """Preimage in the order of the Jacobson radical of order/p*order."""
    B = order.mod_p_algebra(p)
    rad_rows = fp_radical(B)
    basis = order.zbasis()
    amb = order.lattice.ambient_dim
    gens = []
    for v in rad_rows:
        vec = [Q(0)] * amb
        for c, b in zip(v, basis):
            if c:
                vec = [x + c * y for x, y in zip(vec, b)]
        gens.append(vec)
    for b in basis:
        gens.append([p * x for x in b])
    return zmodule_from_rows(gens, amb)


def left_order(I: PseudoLattice, A: SCAlgebra) -> OrderZ:
    return _side_order(I, A, left=True)


def right_order(I: PseudoLattice, A: SCAlgebra) -> OrderZ:
    return _side_order(I, A, left=False)


def _side_order(I: PseudoLattice, A: SCAlgebra, left: bool) -> OrderZ:
    if I.rank != A.dim:
        raise DimensionMismatch("ideal must be a full lattice in the algebra")
    gens = [tuple(idl.gen * x for x in row) for idl, row in zip(I.ideals, I.basis)]
    bm = I.basis_matrix()
    cols = []
    for s in range(A.dim):
        bs = A.basis_vec(s)
        col = []
        for g in gens:
            prod = A.mul(bs, g) if left else A.mul(g, bs)
            c = solve_row(bm, prod)
            col.extend(qi / idl.gen for qi, idl in zip(c, I.ideals))
        cols.append(col)
    c_mat = MatQ(cols).transpose()
    t_rows = integral_preimage_lattice(c_mat)
    lat = PseudoLattice.from_rows(t_rows, ambient_dim=A.dim).canonical()
    return OrderZ(A, lat, check=True)


def _idealizer_step(order: OrderZ, p: int) -> OrderZ:
    j = radical_mod_p(order, p)
    return left_order(j, order.algebra)


def _order_disc(order: OrderZ) -> int:
    A = order.algebra
    gram = [
        [A.trace_lmul(A.mul(x, y)) for y in order.zbasis()] for x in order.zbasis()
    ]
    d = MatQ(gram).det()
    if d.denominator != 1:
        raise ValueError("trace form of an order must be integral")
    return int(d)


def _idealizer_closure(order: OrderZ) -> OrderZ:
    disc = _order_disc(order)
    if disc == 0:
        raise UnsupportedComponent("degenerate trace form: algebra not separable")
    cur = order
    for p in _primes_of(disc):
        while True:
            nxt = _idealizer_step(cur, p)
            if nxt.lattice == cur.lattice:
                break
            cur = nxt
    return cur


def _maximal_order_component(order: OrderZ, comp) -> OrderZ:
    """Maximal order of a simple component, certified per component kind."""
    A = order.algebra
    kind = comp.kind
    if kind.tag == "rational_field":
        # the only order in Q is Z itself
        return OrderZ(A, order.lattice, is_maximal=True, check=False)
    if kind.tag == "matrix_over_Q":
        # endomorphism order of a stable lattice in the simple module: always
        # maximal (it is conjugate to the full integral matrix ring), and it
        # contains the input order since the lattice is stable under it.
        units = comp.splitting.matrix_units
        n = kind.n
        wbasis = MatQ([units[(l, 0)] for l in range(n)])
        rows = []
        for b in order.zbasis():
            c = solve_row(wbasis, _project_left_ideal(A, b, units, n))
            rows.append(c)
        lat = zmodule_from_rows(rows, n)
        gens = [tuple(i.gen * x for x in row) for i, row in zip(lat.ideals, lat.basis)]
        bm = lat.basis_matrix()
        cols = []
        for s in range(A.dim):
            col = []
            for g in gens:
                amb = [Q(0)] * A.dim
                for cg, wrow in zip(g, wbasis.rows):
                    if cg:
                        amb = [x + cg * y for x, y in zip(amb, wrow)]
                prod = A.mul(A.basis_vec(s), tuple(amb))
                c = solve_row(wbasis, prod)
                cc = solve_row(bm, c)
                col.extend(ci / idl.gen for ci, idl in zip(cc, lat.ideals))
            cols.append(col)
        t_rows = integral_preimage_lattice(MatQ(cols).transpose())
        m_lat = PseudoLattice.from_rows(t_rows, ambient_dim=A.dim).canonical()
        m = OrderZ(A, m_lat, is_maximal=True, check=True)
        if not m.lattice.contains_lattice(order.lattice):
            raise ValueError("matrix-component maximal order lost the input order")
        return m
    if kind.tag == "imag_quadratic":
        theta = comp.splitting.primitive_element
        mp = comp.splitting.min_poly
        b, c = mp[1], mp[0]
        disc0 = b * b - 4 * c
        from .algebra import squarefree_part

        m0, c0 = squarefree_part(disc0)
        dk = m0 if m0 % 4 == 1 else 4 * m0
        f2 = disc0 / dk
        from math import isqrt

        f = Q(isqrt(f2.numerator), isqrt(f2.denominator))
        delta = tuple(2 * t + b * o for t, o in zip(theta, A.one))
        omega = tuple((dk * o + d / f) / 2 for o, d in zip(A.one, delta))
        lat = zmodule_from_rows([list(A.one), list(omega)], A.dim)
        m = OrderZ(A, lat, is_maximal=True, check=True)
        if not m.lattice.contains_lattice(order.lattice):
            raise ValueError("ring of integers lost the input order")
        return m
    if kind.tag == "definite_quaternion":
        cur = _idealizer_closure(order)
        # certification: |disc of the regular trace form| = 16 * disc(D)^2
        got = abs(_order_disc(cur))
        want = 16 * kind.disc * kind.disc
        if got != want:
            raise UnsupportedComponent(
                f"quaternion maximal order certification failed (disc {got} != {want})"
            )
        return OrderZ(A, cur.lattice, is_maximal=True, check=False)
    raise UnsupportedComponent(f"maximal order for kind {kind.tag}")


def _project_left_ideal(A, b, units, n):
    """b * u_00 as an element of the left ideal A*u_00."""
    return A.mul(b, units[(0, 0)])


def maximal_order(order: OrderZ, wd: WedderburnDecomp | None = None, seed: int = 0) -> tuple[OrderZ, BadPrimes]:
    """Maximal order containing the given one, plus the set of bad primes."""
    A = order.algebra
    if wd is None:
        wd = wedderburn(A, seed=seed)
    rows = []
    amb = A.dim
    for comp in wd.components:
        if comp.kind is None:
            from .algebra import split_component

            comp.kind, comp.splitting = split_component(comp, seed=seed)
        e = comp.idempotent
        comp_gens = []
        for b in order.zbasis():
            prod = A.mul(e, b)
            c = comp.from_parent(prod)
            comp_gens.append(c)
        lat_i = zmodule_from_rows(comp_gens, comp.algebra.dim)
        o_i = OrderZ(comp.algebra, lat_i, check=True)
        m_i = _maximal_order_component(o_i, comp)
        for row in m_i.zbasis():
            rows.append(comp.to_parent(row))
    lat = zmodule_from_rows(rows, amb)
    m = OrderZ(A, lat, is_maximal=True, check=True)
    if not m.lattice.contains_lattice(order.lattice):
        raise ValueError("maximal order does not contain the input order")
    idx = module_index(m.lattice, order.lattice).gen
    primes = sorted(set(_primes_of(idx.numerator) + _primes_of(idx.denominator)))
    return m, BadPrimes(primes=tuple(primes))


# ---------------------------------------------------------------------------
# conductors


def conductor(S: OrderZ, T: OrderZ, side: str = "left") -> PseudoLattice:
    """{x : xS ⊆ T} (left) or {x : Sx ⊆ T} (right) for orders T ⊆ S."""
    if side not in ("left", "right"):
        raise ValueError("side must be left or right")
    if not S.lattice.contains_lattice(T.lattice):
        raise NotSuborder("T is not contained in S")
    A = S.algebra
    bm = T.lattice.basis_matrix()
    s_basis = S.zbasis()
    cols = []
    for s in range(A.dim):
        bs = A.basis_vec(s)
        col = []
        for g in s_basis:
            prod = A.mul(bs, g) if side == "left" else A.mul(g, bs)
            c = solve_row(bm, prod)
            col.extend(ci / idl.gen for ci, idl in zip(c, T.lattice.ideals))
        cols.append(col)
    c_mat = MatQ(cols).transpose()
    t_rows = integral_preimage_lattice(c_mat)
    cond = PseudoLattice.from_rows(t_rows, ambient_dim=A.dim).canonical()
    if not T.lattice.contains_lattice(cond):
        raise ValueError("conductor fails containment in T")
    return cond


def central_conductor(S: OrderZ, T: OrderZ) -> PseudoLattice:
    """{x in Z(A) : xS ⊆ T}, cross-checked against the one-sided conductors."""
    if not S.lattice.contains_lattice(T.lattice):
        raise NotSuborder("T is not contained in S")
    A = S.algebra
    zen = algebra_center(A)
    bm = T.lattice.basis_matrix()
    cols = []
    for z in zen:
        col = []
        for g in S.zbasis():
            c = solve_row(bm, A.mul(z, g))
            col.extend(ci / idl.gen for ci, idl in zip(c, T.lattice.ideals))
        cols.append(col)
    t_rows = integral_preimage_lattice(MatQ(cols).transpose())
    rows = []
    for t in t_rows:
        vec = [Q(0)] * A.dim
        for c, z in zip(t, zen):
            vec = [x + c * zi for x, zi in zip(vec, z)]
        rows.append(vec)
    cc = zmodule_from_rows(rows, A.dim)
    for lbl in ("left", "right"):
        side_cap = lattice_cap_subspace(conductor(S, T, lbl), zen)
        if side_cap != cc:
            raise ValueError("central conductor cross-check failed")
    return cc


def lattice_cap_subspace(L: PseudoLattice, span_rows) -> PseudoLattice:
    """Intersection of a lattice with a Q-subspace (saturated sublattice)."""
    if L.is_zero():
        return L
    span = MatQ([list(r) for r in span_rows])
    # x = a @ B_L must satisfy: x in rowspace(span); i.e. orthogonality to a
    # complement of the row space: use kernel of span^T as dual conditions.
    from .linalg import left_kernel

    dual = left_kernel(span.transpose())  # rows d with span @ d^T = 0... (v in span => v . d = 0)
    if not dual:
        return L
    b = L.zbasis_matrix()
    cond = []
    for row in b.rows:
        cond.append([sum(x * d[i] for i, x in enumerate(row)) for d in dual])
    den = lcm(*[x.denominator for r in cond for x in r]) if cond else 1
    int_cond = [[int(x * den) for x in r] for r in cond]
    kern = left_kernel_int(int_cond)
    rows = []
    for k in kern:
        vec = [Q(0)] * L.ambient_dim
        for c, row in zip(k, b.rows):
            if c:
                vec = [x + c * y for x, y in zip(vec, row)]
        rows.append(vec)
    return zmodule_from_rows(rows, L.ambient_dim)


# ---------------------------------------------------------------------------
# lattice extension, components, Higman exponent


def extend_lattice(gamma: OrderZ, x: LatticeMod) -> LatticeMod:
    """The gamma-lattice generated by x (gamma containing the base order)."""
    rows = []
    for g in gamma.zbasis():
        m = x.module.act_element(g)
        for idl, row in zip(x.lattice.ideals, x.lattice.basis):
            rows.append([idl.gen * v for v in _row_times(row, m)])
    lat = zmodule_from_rows(rows, x.module.dim)
    if lat.rank != x.lattice.rank:
        raise ValueError("extension changed the rational span")
    return LatticeMod(module=x.module, lattice=lat)


def component_lattice(e_coords, mx: LatticeMod) -> LatticeMod:
    """e_i * (lattice), as a lattice in the same ambient module."""
    m = mx.module.act_element(e_coords)
    rows = []
    for idl, row in zip(mx.lattice.ideals, mx.lattice.basis):
        rows.append([idl.gen * v for v in _row_times(row, m)])
    lat = zmodule_from_rows(rows, mx.module.dim)
    return LatticeMod(module=mx.module, lattice=lat)


def k0_exponent(lam: OrderZ, m: OrderZ, p: int) -> int:
    """Smallest k with p^k * M_p inside Lambda_p (p-exponent of M/Lambda)."""
    bm = m.lattice.basis_matrix()
    coords = []
    for idl, row in zip(lam.lattice.ideals, lam.lattice.basis):
        c = solve_row(bm, row)
        if c is None:
            raise ValueError("orders do not span the same algebra")
        coords.append([x * idl.gen / mi.gen for x, mi in zip(c, m.lattice.ideals)])
    if any(x.denominator != 1 for r in coords for x in r):
        raise NotSuborder("first order is not contained in the second")
    d, _, _ = snf_int([[int(x) for x in r] for r in coords], want_u=False, want_v=False)
    k0 = 0
    for di in d:
        v = 0
        while di % p == 0:
            di //= p
            v += 1
        k0 = max(k0, v)
    return k0
