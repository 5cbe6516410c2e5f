"""Homomorphism groups of lattices over orders, via saturation, and
endomorphism rings as orders.

A homomorphism between row-vector modules is a matrix applied on the right;
composition "f then g" is the matrix product F @ G.  Hom_A between regular
modules is spanned by right multiplications, so no linear solve is needed in
that case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .algebra import SCAlgebra
from .linalg import (
    FracIdl,
    MatQ,
    PseudoLattice,
    RowSolver,
    left_kernel,
    saturate,
    solve_row,
)
from .orders import LatticeMod, ModuleSpace, OrderZ

Q = Fraction


def hom_A(V: ModuleSpace, W: ModuleSpace) -> list[MatQ]:
    """Q-basis of the A-module homomorphisms V -> W."""
    if getattr(V, "is_regular", False) and getattr(W, "is_regular", False) and V.order.algebra is W.order.algebra:
        A = V.order.algebra
        return [A.rmat(A.basis_vec(i)) for i in range(A.dim)]
    m, n = V.dim, W.dim
    if m == 0 or n == 0:
        return []
    gen_idx = sorted(set(V.generator_indices()) | set(W.generator_indices()))
    rows = []
    for a in range(m):
        for b in range(n):
            row = []
            for g in gen_idx:
                mv, mw = V.action[g], W.action[g]
                for i in range(m):
                    for j in range(n):
                        c = Q(0)
                        if j == b:
                            c += mv[i, a]
                        if i == a:
                            c -= mw[b, j]
                        row.append(c)
            rows.append(row)
    kern = left_kernel(MatQ(rows))
    return [MatQ([[v[a * n + b] for b in range(n)] for a in range(m)]) for v in kern]


@dataclass
class HomLat:
    """Hom_Lambda(X, Y) as a pseudo-lattice of matrices."""

    src_dim: int
    dst_dim: int
    basis: list[MatQ]
    coeff_ideals: list[FracIdl]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, f: MatQ) -> bool:
        flat_basis = MatQ([_flat(b) for b in self.basis])
        c = solve_row(flat_basis, _flat(f))
        if c is None:
            return False
        return all(idl.contains(x) for idl, x in zip(self.coeff_ideals, c))


def _flat(m: MatQ):
    return [x for row in m.rows for x in row]


def _maps_into(f: MatQ, X: PseudoLattice, Y: PseudoLattice, scale=Q(1)) -> bool:
    for idl, row in zip(X.ideals, X.basis):
        img = [scale * idl.gen * v for v in _row_vec_mul(row, f)]
        if not Y.contains(img):
            return False
    return True


def _row_vec_mul(row, m: MatQ):
    return [sum(row[i] * m.rows[i][j] for i in range(len(row)) if row[i]) for j in range(m.ncols)]


def hom_Lambda(X: LatticeMod, Y: LatticeMod, hom_a_basis: list[MatQ] | None = None) -> HomLat:
    """Hom over the order: scale the Hom_A basis into Hom_Z(X, Y), then
    saturate inside the coefficient-ideal grid."""
    if hom_a_basis is None:
        hom_a_basis = hom_A(X.module, Y.module)
    m, n = X.lattice.rank, Y.lattice.rank
    if not hom_a_basis:
        return HomLat(src_dim=m, dst_dim=n, basis=[], coeff_ideals=[])
    bx = X.lattice.basis_matrix()
    by = Y.lattice.basis_matrix()
    by_solver = by
    # express each hom in lattice coordinates: F_lat = coords_Y(x_i @ F)
    lat_mats = []
    for f in hom_a_basis:
        rows = []
        for row in bx.rows:
            img = _row_vec_mul(row, f)
            c = solve_row(by_solver, img)
            if c is None:
                raise ValueError("hom image leaves the rational span of Y")
            rows.append(c)
        lat_mats.append(MatQ(rows))
    # grid Hom_Z(X, Y) has cell (i, j) with ideal a_i^{-1} b_j
    a = X.lattice.ideals
    b = Y.lattice.ideals
    grid_ideals = [a[i].inverse() * b[j] for i in range(m) for j in range(n)]
    scaled = []
    for f in lat_mats:
        mult = 1
        for i in range(m):
            for j in range(n):
                x = f[i, j] / grid_ideals[i * n + j].gen
                mult = lcm(mult, x.denominator)
        scaled.append(f.scale(mult))
    grid = PseudoLattice(
        m * n,
        grid_ideals,
        [[Q(1) if k == t else Q(0) for t in range(m * n)] for k in range(m * n)],
        check=False,
    )
    span = PseudoLattice.from_rows([_flat(f) for f in scaled], ambient_dim=m * n)
    sat = saturate(span, grid)
    out_basis = []
    out_ideals = []
    for idl, row in zip(sat.ideals, sat.basis):
        out_basis.append(MatQ([[row[i * n + j] for j in range(n)] for i in range(m)]))
        out_ideals.append(idl)
    hl = HomLat(src_dim=m, dst_dim=n, basis=out_basis, coeff_ideals=out_ideals)
    for idl, f in zip(hl.coeff_ideals, hl.basis):
        fa = _to_ambient(f, X.lattice, Y.lattice)
        if not _maps_into(fa, X.lattice, Y.lattice, scale=idl.gen):
            raise ValueError("hom generator fails to map X into Y")
    return hl


def _to_ambient(f_lat: MatQ, X: PseudoLattice, Y: PseudoLattice) -> MatQ:
    """Convert a lattice-coordinate hom matrix to ambient coordinates."""
    bx = X.basis_matrix()
    by = Y.basis_matrix()
    if X.ambient_dim == X.rank and Y.ambient_dim == Y.rank:
        return bx.inv() @ f_lat @ by
    # ambient action: v -> coords_X(v) @ f_lat @ by ; only defined on QX
    raise NotImplementedError("ambient conversion needs full lattices")


def hom_lattice_ambient(hl: HomLat, X: LatticeMod, Y: LatticeMod) -> list[MatQ]:
    """Hom basis as ambient-space matrices QX -> QY (full lattices only)."""
    return [_to_ambient(f, X.lattice, Y.lattice) for f in hl.basis]


# ---------------------------------------------------------------------------
# endomorphism rings as orders


def hom_lattice_fast(X: LatticeMod, Y: LatticeMod, hom_a_basis: list[MatQ] | None = None) -> list[MatQ]:
    """Z-basis of Hom over the order as ambient matrices, by solving the
    integrality conditions directly on the Hom_A coordinates.

    Same module as hom_Lambda (cross-checked in tests); preferred inside hot
    loops because it avoids the full grid saturation.
    """
    if hom_a_basis is None:
        hom_a_basis = hom_A(X.module, Y.module)
    if not hom_a_basis:
        return []
    bx = X.lattice.zbasis_matrix()
    by = Y.lattice.basis_matrix()
    solver = RowSolver(by)
    cols = []
    for f in hom_a_basis:
        col = []
        for row in bx.rows:
            img = _row_vec_mul(row, f)
            c = solver.solve(img)
            if c is None:
                raise ValueError("hom image leaves the rational span of Y")
            col.extend(ci / idl.gen for ci, idl in zip(c, Y.lattice.ideals))
        cols.append(col)
    from .linalg import integral_preimage_lattice

    t_rows = integral_preimage_lattice(MatQ(cols).transpose())
    out = []
    for t in t_rows:
        m = None
        for c, f in zip(t, hom_a_basis):
            if c:
                term = f.scale(c)
                m = term if m is None else m + term
        out.append(m if m is not None else MatQ.zeros(hom_a_basis[0].nrows, hom_a_basis[0].ncols))
    return out


@dataclass
class EndRings:
    """S = End over the maximal order of MY, T = End over the order of Y,
    realized inside End_A(QY) with a common matrix basis."""

    e_basis: list[MatQ]            # Q-basis of End_A(W), ambient matrices
    algebra: SCAlgebra             # abstract structure constants on e_basis
    S: OrderZ
    T: OrderZ
    y_lattice: PseudoLattice

    def mat_of(self, coords) -> MatQ:
        out = None
        for c, b in zip(coords, self.e_basis):
            if c:
                t = b.scale(c)
                out = t if out is None else out + t
        return out if out is not None else MatQ.zeros(self.e_basis[0].nrows, self.e_basis[0].ncols)

    def coords_of(self, mat: MatQ):
        flat_basis = MatQ([_flat(b) for b in self.e_basis])
        return solve_row(flat_basis, _flat(mat))


def composition_algebra(mats: list[MatQ]) -> tuple[SCAlgebra, MatQ]:
    """SCAlgebra on a matrix basis with COMPOSITION as the product.

    Composition e∘f ("apply f, then e") of row-convention maps has matrix
    F @ E, so the structure constants use the opposite matrix product; this
    makes left modules via post-composition obey the package's action
    convention.  Returns (algebra, flattened basis matrix for coordinates).
    """
    flat_rows = MatQ([_flat(b) for b in mats])
    solver = RowSolver(flat_rows)
    n = mats[0].nrows
    table = []
    for bi in mats:
        row = []
        for bj in mats:
            prod = bj @ bi
            c = solver.solve(_flat(prod))
            if c is None:
                raise ValueError("matrix span not closed under composition")
            row.append(c)
        table.append(row)
    one = solver.solve(_flat(MatQ.identity(n)))
    if one is None:
        raise ValueError("identity not in the matrix span")
    return SCAlgebra(table, one, check=False), flat_rows


def end_ring_as_order(
    Y: LatticeMod,
    MY: LatticeMod,
    m_order: OrderZ,
    hom_a_basis: list[MatQ] | None = None,
    fast: bool = True,
) -> EndRings:
    """Endomorphism rings of MY (over the maximal order) and T of Y (over the
    base order) as orders in End_A(QY), with T identified inside S.

    The fast route solves the integrality conditions directly; fast=False goes
    through the grid saturation of hom_Lambda (same lattice either way)."""
    if hom_a_basis is None:
        hom_a_basis = hom_A(Y.module, Y.module)
    if not hom_a_basis:
        raise ValueError("zero endomorphism algebra")
    alg, flat_rows = composition_algebra(hom_a_basis)
    m_module = ModuleSpace(m_order, [MY.module.act_element(b) for b in m_order.zbasis()])
    my_as_mod = LatticeMod(module=m_module, lattice=MY.lattice)

    _solver = RowSolver(flat_rows)

    def order_from_mats(mats: list[MatQ]) -> OrderZ:
        rows = []
        for amb in mats:
            c = _solver.solve(_flat(amb))
            rows.append(c)
        from .linalg import zmodule_from_rows

        lat = zmodule_from_rows(rows, alg.dim)
        return OrderZ(alg, lat, check=False)

    if fast:
        t_mats = hom_lattice_fast(Y, Y, hom_a_basis=hom_a_basis)
        s_mats = hom_lattice_fast(my_as_mod, my_as_mod, hom_a_basis=hom_a_basis)
    else:
        t_hl = hom_Lambda(Y, Y, hom_a_basis=hom_a_basis)
        t_mats = [
            f.scale(i.gen)
            for i, f in zip(t_hl.coeff_ideals, hom_lattice_ambient(t_hl, Y, Y))
        ]
        s_hl = hom_Lambda(my_as_mod, my_as_mod, hom_a_basis=hom_a_basis)
        s_mats = [
            f.scale(i.gen)
            for i, f in zip(s_hl.coeff_ideals, hom_lattice_ambient(s_hl, my_as_mod, my_as_mod))
        ]
    t_order = order_from_mats(t_mats)
    s_order = order_from_mats(s_mats)
    if not s_order.lattice.contains_lattice(t_order.lattice):
        raise ValueError("End over the base order must embed into End over the maximal order")
    return EndRings(e_basis=hom_a_basis, algebra=alg, S=s_order, T=t_order, y_lattice=Y.lattice.canonical())
