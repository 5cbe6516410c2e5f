"""Isomorphism tests for lattices localized at a prime.

Four methods: the reduced-lattice test (work modulo p^(k0+1) and search the
residue hom space), the global-hom test (search the reduction of the exact hom
lattice, returns a genuine map), the Monte-Carlo variant (Schwartz–Zippel
evaluation over a small extension field), and the reduction to local freeness
of Hom over End (search-free; also returns a map).  Verdicts of the first,
second and fourth always agree; the third only ever asserts isomorphism or
"probably not".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from random import Random

from .errors import BadEpsilon, RankMismatch
from .fpalgebra import (
    FpAlgebra,
    jacobson_radical_fp as _jacobson_radical_verified,
    quotient_algebra,
    radical as _radical_raw,
    split_semisimple,
)
from .homspaces import hom_Lambda, hom_lattice_ambient, hom_lattice_fast, composition_algebra
from .linalg import (
    MatQ,
    ModPkMat,
    PseudoLattice,
    kernel_mod,
    module_index,
    solve_row,
    v_p,
    zmodule_from_rows,
)
from .modp import GF, fp_det, fp_rank, fq_det
from .orders import LatticeMod, ModuleSpace, OrderZ, k0_exponent, maximal_order

Q = Fraction


@dataclass(frozen=True)
class LocalVerdict:
    outcome: str                      # iso | iso_no_map | not_iso | probably_not_iso
    p: int
    method: str
    map: MatQ | None = None           # ambient map QX -> QY when available
    confidence: Fraction | None = None

    @property
    def is_iso(self) -> bool:
        return self.outcome in ("iso", "iso_no_map")


def jacobson_radical_fp(B: FpAlgebra) -> list[list[int]]:
    """Verified Jacobson radical of a finite-dimensional F_p-algebra."""
    return _jacobson_radical_verified(B)


# ---------------------------------------------------------------------------
# shared helpers


def _action_on_lattice_modp(x: LatticeMod, p: int, pk: int) -> list[list[list[int]]]:
    """Action matrices of the order basis on the lattice basis, mod p^k."""
    bz = x.lattice.zbasis_matrix()
    out = []
    for m in x.module.action:
        rows = []
        for row in bz.rows:
            img = [sum(row[i] * m.rows[i][j] for i in range(len(row)) if row[i]) for j in range(m.ncols)]
            c = solve_row(bz, img)
            if c is None or any(ci.denominator % p == 0 for ci in c):
                raise ValueError("lattice is not stable p-integrally under the order")
            rows.append([_fr_mod(ci, pk) for ci in c])
        out.append(rows)
    return out


def _fr_mod(x: Fraction, m: int) -> int:
    return (x.numerator * pow(x.denominator, -1, m)) % m


def _restricted_gens(order: OrderZ) -> list[int]:
    return order.ring_generators()


def higman_exponent(lam: OrderZ, p: int, m_order: OrderZ | None = None, wd=None) -> int:
    if m_order is None:
        m_order, _ = maximal_order(lam, wd)
    return k0_exponent(lam, m_order, p)


# ---------------------------------------------------------------------------
# method 1: reduced lattices


def local_iso_reduced(
    X: LatticeMod,
    Y: LatticeMod,
    p: int,
    m_order: OrderZ | None = None,
    k: int | None = None,
) -> LocalVerdict:
    """Decide local isomorphism from the reductions mod p^(k0+1)."""
    lam = X.module.order
    if X.lattice.rank != Y.lattice.rank:
        return LocalVerdict(outcome="not_iso", p=p, method="reduced")
    if k is None:
        k = higman_exponent(lam, p, m_order) + 1
    pk = p**k
    gens = sorted(set(_restricted_gens(lam)))
    ax = _action_on_lattice_modp(X, p, pk)
    ay = _action_on_lattice_modp(Y, p, pk)
    n = X.lattice.rank
    rows = []
    for i in range(n):
        for j in range(n):
            row = []
            for g in gens:
                rx, ry = ax[g], ay[g]
                for a in range(n):
                    for b in range(n):
                        c = 0
                        if b == j:
                            c += rx[a][i]
                        if a == i:
                            c -= ry[j][b]
                        row.append(c % pk)
            rows.append(row)
    spanning = kernel_mod(ModPkMat(pk, tuple(tuple(r) for r in rows)))
    reduced = []
    for v in spanning:
        mat = [[v[i * n + j] % p for j in range(n)] for i in range(n)]
        if any(any(r) for r in mat):
            reduced.append(mat)
    basis = _fp_independent(reduced, p)
    if _search_unit_combination(basis, p) is not None:
        return LocalVerdict(outcome="iso_no_map", p=p, method="reduced")
    return LocalVerdict(outcome="not_iso", p=p, method="reduced")


def _fp_independent(mats: list[list[list[int]]], p: int) -> list[list[list[int]]]:
    out = []
    flat = []
    for m in mats:
        row = [x for r in m for x in r]
        if fp_rank(flat + [row], p) > len(flat):
            flat.append(row)
            out.append(m)
    return out


def _search_unit_combination(mats: list[list[list[int]]], p: int):
    """Projective search for a tuple with invertible combination; None if none."""
    r = len(mats)
    if r == 0:
        return None
    n = len(mats[0])
    for lead in range(r):
        # first nonzero coordinate normalized to 1
        for tail in iproduct(range(p), repeat=r - lead - 1):
            coeffs = [0] * lead + [1] + list(tail)
            acc = [[0] * n for _ in range(n)]
            for c, m in zip(coeffs, mats):
                if c:
                    for i in range(n):
                        mi = m[i]
                        ai = acc[i]
                        for j in range(n):
                            if mi[j]:
                                ai[j] = (ai[j] + c * mi[j]) % p
            if fp_det(acc, p):
                return coeffs
    return None


# ---------------------------------------------------------------------------
# method 2: global hom groups


def _normalized_hom_mod_p(X: LatticeMod, Y: LatticeMod, p: int, hom_basis: list[MatQ] | None):
    """Exact hom lattice scaled to zero p-valuation, its mod-p reductions, and
    the exact ambient maps (aligned lists)."""
    if hom_basis is None:
        hl = hom_Lambda(X, Y)
        mats = hom_lattice_ambient(hl, X, Y)
        ideals = [i.gen for i in hl.coeff_ideals]
    else:
        mats = hom_basis
        ideals = [Q(1)] * len(mats)
    # absorb the coefficient ideals: each generator ideal*matrix is an honest
    # element of the hom lattice and a Z_(p)-basis of its localization
    exact = [f.scale(g) for g, f in zip(ideals, mats)]
    # reductions in lattice coordinates of normalized pseudo-bases
    bx = _p_normalized_zbasis(X.lattice, p)
    by = _p_normalized_zbasis(Y.lattice, p)
    red = []
    for f in exact:
        rows = []
        for row in bx.rows:
            img = [sum(row[i] * f.rows[i][j] for i in range(len(row)) if row[i]) for j in range(f.ncols)]
            c = solve_row(by, img)
            rows.append([_fr_mod(ci, p) for ci in c])
        red.append(rows)
    return exact, red, bx, by


def _p_normalized_zbasis(lat: PseudoLattice, p: int) -> MatQ:
    """Basis rows scaled so each coefficient ideal has zero p-valuation."""
    rows = []
    for idl, row in zip(lat.ideals, lat.basis):
        v = idl.v_p(p)
        g = idl.gen / p**v
        # p^v * row carries the p-part; the remaining ideal is a p-unit and is
        # absorbed into the basis row
        rows.append([g * (p**v) * x for x in row])
    return MatQ(rows)


def local_iso_global_hom(
    X: LatticeMod, Y: LatticeMod, p: int, hom_basis: list[MatQ] | None = None
) -> LocalVerdict:
    """Search the mod-p reduction of the exact hom lattice; Iso returns a map."""
    if X.lattice.rank != Y.lattice.rank:
        return LocalVerdict(outcome="not_iso", p=p, method="homglobal")
    exact, red, _, _ = _normalized_hom_mod_p(X, Y, p, hom_basis)
    kept_idx = []
    flat = []
    for t, m in enumerate(red):
        row = [x for r in m for x in r]
        if any(row) and fp_rank(flat + [row], p) > len(flat):
            flat.append(row)
            kept_idx.append(t)
    basis = [red[t] for t in kept_idx]
    coeffs = _search_unit_combination(basis, p)
    if coeffs is None:
        return LocalVerdict(outcome="not_iso", p=p, method="homglobal")
    f = None
    for c, t in zip(coeffs, kept_idx):
        if c:
            term = exact[t].scale(c)
            f = term if f is None else f + term
    idx = module_index(Y.lattice, _image_lattice(X.lattice, f))
    assert v_p(idx.gen, p) == 0
    return LocalVerdict(outcome="iso", p=p, method="homglobal", map=f)


def _image_lattice(X: PseudoLattice, f: MatQ) -> PseudoLattice:
    rows = []
    for idl, row in zip(X.ideals, X.basis):
        img = [sum(row[i] * f.rows[i][j] for i in range(len(row)) if row[i]) for j in range(f.ncols)]
        rows.append([idl.gen * x for x in img])
    return zmodule_from_rows(rows, f.ncols)


# ---------------------------------------------------------------------------
# method 3: Monte Carlo


def monte_carlo_parameters(n: int, p: int, eps: Fraction) -> tuple[int, int]:
    """Minimal l with p^l > n, then minimal k with (n/p^l)^k <= eps."""
    l = 1
    while p**l <= n:
        l += 1
    k = 1
    ratio = Q(n, p**l)
    acc = ratio
    while acc > eps:
        acc *= ratio
        k += 1
    return l, k


def local_iso_monte_carlo(
    X: LatticeMod,
    Y: LatticeMod,
    p: int,
    eps,
    seed: int = 0,
    hom_basis: list[MatQ] | None = None,
) -> LocalVerdict:
    """Monte-Carlo test: nonzero determinant at a random point certifies an
    isomorphism; k failures leave 'probably not isomorphic' at confidence
    1 - eps."""
    eps = Q(eps)
    if not (0 < eps < 1):
        raise BadEpsilon(f"epsilon must be in (0,1), got {eps}")
    if X.lattice.rank != Y.lattice.rank:
        return LocalVerdict(outcome="not_iso", p=p, method="montecarlo")
    exact, red, _, _ = _normalized_hom_mod_p(X, Y, p, hom_basis)
    pairs = [(exact[t], red[t]) for t in range(len(red)) if any(any(r) for r in red[t])]
    if not pairs:
        return LocalVerdict(outcome="not_iso", p=p, method="montecarlo")
    n = X.lattice.rank
    l, k = monte_carlo_parameters(n, p, eps)
    field = GF(p, l, seed=seed)
    rng = Random(seed)
    r = len(pairs)
    for _ in range(k):
        point = [field.random(rng) for _ in range(r)]
        acc = [[field.zero] * n for _ in range(n)]
        for c, (_, m) in zip(point, pairs):
            if field.is_zero(c):
                continue
            for i in range(n):
                for j in range(n):
                    if m[i][j]:
                        acc[i][j] = field.add(acc[i][j], field.mul(c, field.from_int(m[i][j])))
        if not field.is_zero(fq_det(acc, field)):
            prime_field = all(all(x == 0 for x in c[1:]) for c in point)
            if prime_field:
                f = None
                for c, (ex, _) in zip(point, pairs):
                    if c[0]:
                        term = ex.scale(c[0])
                        f = term if f is None else f + term
                return LocalVerdict(outcome="iso", p=p, method="montecarlo", map=f)
            return LocalVerdict(outcome="iso_no_map", p=p, method="montecarlo")
    return LocalVerdict(
        outcome="probably_not_iso", p=p, method="montecarlo", confidence=1 - eps
    )


# ---------------------------------------------------------------------------
# method 4: reduction to local freeness


class OrderModPData:
    """Cached mod-p structure of an order (algebra, radical, semisimple top)."""

    def __init__(self, order: OrderZ, p: int, seed: int = 0):
        self.order = order
        self.p = p
        self.B = order.mod_p_algebra(p)
        self.radical = _radical_raw(self.B)
        self.quotient, self.project, self.lift = quotient_algebra(self.B, self.radical)
        self.semisimple = split_semisimple(self.quotient, seed=seed)


_ORDER_MODP_CACHE: dict = {}


def order_mod_p_data(order: OrderZ, p: int, seed: int = 0) -> OrderModPData:
    key = (id(order), p, seed)
    data = _ORDER_MODP_CACHE.get(key)
    if data is None or data.order is not order:
        data = OrderModPData(order, p, seed)
        _ORDER_MODP_CACHE[key] = data
    return data


def local_free_basis(
    x: LatticeMod, p: int, rank: int, data: OrderModPData | None = None, seed: int = 0
):
    """Explicit basis of the localized lattice over the order (rank given), or
    None when not free: reduce mod p, pass to the semisimple top, assemble
    per-component generators, lift through Nakayama twice, and verify by the
    determinant's p-valuation."""
    order = x.module.order
    nd = order.dim
    nlat = x.lattice.rank
    if nlat != rank * nd:
        raise RankMismatch(f"lattice rank {nlat} is not {rank} x dim(order) {nd}")
    if data is None:
        data = order_mod_p_data(order, p, seed)
    p_ = p
    mats = _action_on_lattice_modp(x, p_, p_)
    # radical submodule J*Xbar
    jx_rows: list[list[int]] = []
    for rvec in data.radical:
        m = _combine_action(rvec, mats, p_)
        jx_rows.extend(m)
    jx = _fp_echelon_rows(jx_rows, p_)
    comp_rows = _complement_basis(jx, nlat, p_)
    proj_solver = _ProjSolver(jx, comp_rows, p_)
    # quotient-module action for the semisimple algebra's basis
    qb = data.quotient
    top_mats = []
    for t in range(qb.dim):
        lifted = data.lift([1 if i == t else 0 for i in range(qb.dim)])
        m = _combine_action(lifted, mats, p_)
        rows = [proj_solver.project(_fp_row_mul(cb, m, p_)) for cb in comp_rows]
        top_mats.append(rows)
    rng = Random(seed)
    tops = []
    for compo in data.semisimple.components:
        eps_mat = _combine_action(compo.idempotent, top_mats, p_)
        image = _fp_echelon_rows(eps_mat, p_)
        if len(image) != rank * compo.algebra.dim:
            return None
        part = _component_generators(compo, top_mats, image, rank, p_, rng)
        if part is None:
            return None
        tops.append(part)
    # assemble generators in the quotient module, lift to the lattice
    gens_lat = []
    for j in range(rank):
        acc = [0] * len(comp_rows)
        for part in tops:
            acc = [(a + b) % p_ for a, b in zip(acc, part[j])]
        # coordinates w.r.t. comp_rows -> lattice coordinates mod p
        vec = [0] * nlat
        for c, cb in zip(acc, comp_rows):
            if c:
                vec = [(v + c * w) % p_ for v, w in zip(vec, cb)]
        gens_lat.append(vec)
    # first Nakayama check: the generators span Xbar over the mod-p order
    span_rows = []
    for g in gens_lat:
        for t in range(nd):
            span_rows.append(_fp_row_mul(g, mats[t], p_))
    if fp_rank(span_rows, p_) != nlat:
        return None
    # exact lift and determinant verification
    bz = x.lattice.zbasis_matrix()
    gens_amb = []
    for g in gens_lat:
        vec = [Q(0)] * x.lattice.ambient_dim
        for c, row in zip(g, bz.rows):
            if c:
                vec = [a + c * b for a, b in zip(vec, row)]
        gens_amb.append(vec)
    t_rows = []
    for g in gens_amb:
        for t in range(nd):
            img = [
                sum(g[i] * x.module.action[t].rows[i][j] for i in range(len(g)) if g[i])
                for j in range(x.module.dim)
            ]
            c = solve_row(bz, img)
            t_rows.append(c)
    det = MatQ(t_rows).det()
    if det == 0 or v_p(det, p_) != 0:
        return None
    return gens_amb


class _ProjSolver:
    def __init__(self, jx_rows, comp_rows, p):
        self.p = p
        self.k = len(jx_rows)
        self.full = jx_rows + comp_rows
        from .modp import FpRowSolver

        self.solver = FpRowSolver(self.full, p) if self.full else None

    def project(self, v):
        if self.solver is None:
            return []
        c = self.solver.solve(list(v))
        return [x % self.p for x in c[self.k :]]


def _fp_echelon_rows(rows, p):
    out = []
    for r in rows:
        r = [x % p for x in r]
        if any(r) and fp_rank(out + [r], p) > len(out):
            out.append(r)
    return out


def _complement_basis(subspace_rows, n, p):
    comp = []
    base = [list(r) for r in subspace_rows]
    for i in range(n):
        cand = [1 if j == i else 0 for j in range(n)]
        if fp_rank(base + comp + [cand], p) > len(base) + len(comp):
            comp.append(cand)
    return comp


def _combine_action(coeffs, mats, p):
    n = len(mats[0])
    out = [[0] * len(mats[0][0]) for _ in range(n)]
    for c, m in zip(coeffs, mats):
        if c % p:
            for i in range(n):
                row = m[i]
                orow = out[i]
                for j in range(len(row)):
                    if row[j]:
                        orow[j] = (orow[j] + c * row[j]) % p
    return out


def _fp_row_mul(row, mat, p):
    ncols = len(mat[0]) if mat else 0
    out = [0] * ncols
    for i, c in enumerate(row):
        if c:
            mr = mat[i]
            for j in range(ncols):
                if mr[j]:
                    out[j] = (out[j] + c * mr[j]) % p
    return out


def _component_generators(compo, top_mats, image_rows, rank, p, rng):
    """rank generators of the isotypic part over the component, verified by a
    span check; Las Vegas with a retry budget."""
    dim_top = len(top_mats[0]) if top_mats else 0
    for _ in range(64):
        cand = []
        for _j in range(rank):
            v = [0] * dim_top
            while not any(v):
                v = [0] * dim_top
                for r in image_rows:
                    c = rng.randrange(p)
                    if c:
                        v = [(a + c * b) % p for a, b in zip(v, r)]
            cand.append(v)
        span = []
        for v in cand:
            for t in range(len(top_mats)):
                span.append(_fp_row_mul(v, top_mats[t], p))
        if fp_rank(span, p) == len(image_rows):
            return cand
    return None


def local_iso_via_freeness(
    X: LatticeMod,
    Y: LatticeMod,
    p: int,
    hom_mats: list[MatQ] | None = None,
    end_mats: list[MatQ] | None = None,
    end_data: OrderModPData | None = None,
    seed: int = 0,
    use_fast_hom: bool = False,
) -> LocalVerdict:
    """Decide via freeness of Hom over End (rank one) at p; returns a map."""
    if X.lattice.rank != Y.lattice.rank:
        return LocalVerdict(outcome="not_iso", p=p, method="freeness")
    if hom_mats is None:
        if use_fast_hom:
            hom_mats = hom_lattice_fast(X, Y)
        else:
            hl = hom_Lambda(X, Y)
            hom_mats = [
                f.scale(i.gen) for i, f in zip(hl.coeff_ideals, hom_lattice_ambient(hl, X, Y))
            ]
    if end_mats is None:
        if use_fast_hom:
            end_mats = hom_lattice_fast(Y, Y)
        else:
            el = hom_Lambda(Y, Y)
            end_mats = [
                f.scale(i.gen) for i, f in zip(el.coeff_ideals, hom_lattice_ambient(el, Y, Y))
            ]
    if len(hom_mats) != len(end_mats) or not hom_mats:
        return LocalVerdict(outcome="not_iso", p=p, method="freeness")
    end_order, h_mod = hom_as_end_module(hom_mats, end_mats)
    data = end_data if end_data is not None else order_mod_p_data(end_order, p, seed)
    gen = local_free_basis(h_mod, p, 1, data=data, seed=seed)
    if gen is None:
        return LocalVerdict(outcome="not_iso", p=p, method="freeness")
    f = None
    for c, m in zip(gen[0], hom_mats):
        if c:
            term = m.scale(c)
            f = term if f is None else f + term
    img = _image_lattice(X.lattice, f)
    idx = module_index(Y.lattice, img)
    if v_p(idx.gen, p) != 0:
        return LocalVerdict(outcome="not_iso", p=p, method="freeness")
    return LocalVerdict(outcome="iso", p=p, method="freeness", map=f)


def freeness_verdict_prepared(
    end_order: OrderZ,
    h_mod: LatticeMod,
    hom_mats: list[MatQ],
    X: LatticeMod,
    Y: LatticeMod,
    p: int,
    seed: int = 0,
) -> LocalVerdict:
    """Freeness decision at p with the End-module structure precomputed."""
    data = order_mod_p_data(end_order, p, seed)
    gen = local_free_basis(h_mod, p, 1, data=data, seed=seed)
    if gen is None:
        return LocalVerdict(outcome="not_iso", p=p, method="freeness")
    f = None
    for c, m in zip(gen[0], hom_mats):
        if c:
            term = m.scale(c)
            f = term if f is None else f + term
    img = _image_lattice(X.lattice, f)
    idx = module_index(Y.lattice, img)
    if v_p(idx.gen, p) != 0:
        return LocalVerdict(outcome="not_iso", p=p, method="freeness")
    return LocalVerdict(outcome="iso", p=p, method="freeness", map=f)


def hom_as_end_module(hom_mats: list[MatQ], end_mats: list[MatQ]):
    """End order (composition product) plus Hom as a lattice-module over it,
    in hom-basis coordinates."""
    alg, _ = composition_algebra(end_mats)
    end_lat = PseudoLattice.standard(alg.dim)
    end_order = OrderZ(alg, end_lat, check=False)
    flat_hom = MatQ([[x for row in f.rows for x in row] for f in hom_mats])
    from .linalg import RowSolver

    hsolver = RowSolver(flat_hom)
    action = []
    for e in end_mats:
        rows = []
        for f in hom_mats:
            prod = f @ e
            c = hsolver.solve([x for row in prod.rows for x in row])
            if c is None:
                raise ValueError("hom space is not stable under End")
            rows.append(c)
        action.append(MatQ(rows))
    module = ModuleSpace(end_order, action)
    h_lat = PseudoLattice.standard(len(hom_mats))
    return end_order, LatticeMod(module=module, lattice=h_lat)
