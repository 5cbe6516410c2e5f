"""Enumeration of local isomorphism classes of full lattices in a module.

Plesken-style recursion: starting from one full lattice, repeatedly compute
maximal sublattices at p (kernels of surjections onto the simple modules of
the reduced order) and test candidates against the known classes, until no
new class appears.  Candidates are deduplicated by an exact p-local canonical
form and pre-filtered by cheap invariants; the optional Monte-Carlo filter can
only short-circuit positive matches, and every new class is confirmed by the
deterministic localized-freeness test against all surviving classes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

from .fpalgebra import FpSimpleComponent, fp_left_kernel
from .homspaces import composition_algebra, hom_A, hom_lattice_fast
from .linalg import (
    MatQ,
    PseudoLattice,
    RowSolver,
    module_index,
    snf_int,
    solve_row,
    v_p,
    zmodule_from_rows,
)
from .localiso import (
    OrderModPData,
    _action_on_lattice_modp,
    local_free_basis,
    monte_carlo_parameters,
    order_mod_p_data,
)
from .modp import SmallGF, fp_rank
from .orders import LatticeMod, ModuleSpace, OrderZ, maximal_order

Q = Fraction


@dataclass
class GenusClass:
    index: int
    latmod: LatticeMod
    invariant: tuple
    end_mats: list = field(default_factory=list)
    end_order: OrderZ | None = None
    end_data: OrderModPData | None = None
    end_action_solver: RowSolver | None = None


@dataclass
class GenusReport:
    classes: list
    tests: int = 0
    mc_hits: int = 0
    candidates: int = 0


# ---------------------------------------------------------------------------
# module structure mod p of the base order (shared for the whole run)


class GenusContext:
    def __init__(self, lam: OrderZ, p: int, module: ModuleSpace, seed: int = 0):
        self.lam = lam
        self.p = p
        self.module = module
        self.seed = seed
        self.data = order_mod_p_data(lam, p, seed)
        self.hom_a = hom_A(module, module)
        self.m_order, _ = maximal_order(lam)
        self.m_action = [module.act_element(b) for b in self.m_order.zbasis()]
        self.simples = [
            _simple_module_data(self.data, comp) for comp in self.data.semisimple.components
        ]


def _simple_module_data(data: OrderModPData, compo: FpSimpleComponent):
    """Action matrices of the simple module of one component, for the full
    semisimple quotient's basis, plus an endomorphism-field generator."""
    p = data.p
    qb = data.quotient
    comp_alg = compo.algebra
    # left ideal comp_alg * prim as the simple module
    rows = []
    for i in range(comp_alg.dim):
        cand = comp_alg.mul([1 if t == i else 0 for t in range(comp_alg.dim)], compo.prim_idempotent)
        if fp_rank(rows + [cand], p) > len(rows):
            rows.append(cand)
    from .modp import FpRowSolver

    solver = FpRowSolver(rows, p)
    embed_solver = FpRowSolver([list(r) for r in compo.basis], p)

    def to_comp(qb_vec):
        return embed_solver.solve([x % p for x in qb_vec])

    mats = []
    for t in range(qb.dim):
        bt = [1 if i == t else 0 for i in range(qb.dim)]
        # project b_t into the component: idempotent * b_t (in qb coordinates)
        eb = qb.mul(compo.idempotent, bt)
        eb_comp = to_comp(eb)
        rows_t = []
        for s in rows:
            prod = comp_alg.mul(eb_comp, s)
            rows_t.append(solver.solve(prod))
        mats.append(rows_t)
    # endomorphism field generator: right multiplication by a corner generator
    corner = []
    for i in range(comp_alg.dim):
        cand = comp_alg.mul(compo.prim_idempotent, comp_alg.mul([1 if t == i else 0 for t in range(comp_alg.dim)], compo.prim_idempotent))
        if fp_rank(corner + [cand], p) > len(corner):
            corner.append(cand)
    gamma = None
    rng = Random(0)
    from .fpalgebra import _min_poly_unit

    for _ in range(64):
        cand = [0] * comp_alg.dim
        for v in corner:
            c = rng.randrange(p)
            if c:
                cand = [(a + c * b) % p for a, b in zip(cand, v)]
        if not any(cand):
            continue
        mp = _min_poly_unit(comp_alg, cand, compo.prim_idempotent)
        if len(mp) - 1 == compo.endo_deg:
            gamma = cand
            break
    if gamma is None:
        raise RuntimeError("no endomorphism field generator found")
    gmat = []
    for s in rows:
        gmat.append(solver.solve(comp_alg.mul(s, gamma)))
    return {"mats": mats, "endo_mat": gmat, "endo_deg": compo.endo_deg, "dim": len(rows)}




# ---------------------------------------------------------------------------
# maximal sublattices


def maximal_sublattices(ctx: GenusContext, lat: PseudoLattice) -> list[PseudoLattice]:
    p = ctx.p
    x = LatticeMod(module=ctx.module, lattice=lat)
    mats = _action_on_lattice_modp(x, p, p)
    nlat = lat.rank
    # radical submodule and quotient-module structure
    jx_rows = []
    for rvec in ctx.data.radical:
        m = _combine(rvec, mats, p)
        jx_rows.extend(m)
    jx = _ech(jx_rows, p)
    comp_rows = _complement(jx, nlat, p)
    from .localiso import _ProjSolver

    proj = _ProjSolver(jx, comp_rows, p)
    qb = ctx.data.quotient
    top_mats = []
    for t in range(qb.dim):
        lifted = ctx.data.lift([1 if i == t else 0 for i in range(qb.dim)])
        m = _combine(lifted, mats, p)
        top_mats.append([proj.project(_rowmul(cb, m, p)) for cb in comp_rows])
    out = []
    bz = lat.zbasis_matrix()
    for simple in ctx.simples:
        homs = _hom_to_simple(top_mats, simple, p)
        if not homs:
            continue
        for phi in _projective_points(homs, simple, p):
            kern = fp_left_kernel(phi, p)
            rows = []
            for kv in kern:
                # back to lattice coordinates through the complement basis
                vec = [0] * nlat
                for c, cb in zip(kv, comp_rows):
                    if c:
                        vec = [(a + c * b) % p for a, b in zip(vec, cb)]
                rows.append(vec)
            gens = []
            for r in rows + jx:
                gens.append([sum(Q(c) * bz.rows[i][j] for i, c in enumerate(r) if c) for j in range(lat.ambient_dim)])
            for row in bz.rows:
                gens.append([p * v for v in row])
            out.append(zmodule_from_rows(gens, lat.ambient_dim))
    return out


def _hom_to_simple(top_mats, simple, p):
    """F_p-basis of module homs (top -> simple)."""
    from .fpalgebra import module_hom_space

    return module_hom_space(top_mats, simple["mats"], p)


def _projective_points(homs, simple, p):
    """Representatives of nonzero homs up to the endomorphism field."""
    l = simple["endo_deg"]
    gmat = simple["endo_mat"]
    # group the F_p-basis into an F_q basis via gamma orbits; the span grows
    # by whole F_q-lines, so orbits of fresh elements stay independent
    fq_basis = []
    span: list = []
    for h in homs:
        flat = [x for r in h for x in r]
        if fp_rank(span + [flat], p) == len(span):
            continue
        orbit = [h]
        cur = h
        for _ in range(l - 1):
            cur = _matmulp(cur, gmat, p)
            orbit.append(cur)
        for o in orbit:
            fo = [x for r in o for x in r]
            if fp_rank(span + [fo], p) > len(span):
                span.append(fo)
        fq_basis.append(orbit)
    m = len(fq_basis)
    if m * l != len(homs):
        # fall back: enumerate all nonzero F_p-combinations (still complete,
        # possibly with repeated kernels)
        return _all_nonzero_combinations(homs, p)
    out = []
    from itertools import product as iproduct

    coeff_space = list(iproduct(range(p), repeat=l))
    for lead in range(m):
        tails = iproduct(coeff_space, repeat=m - lead - 1)
        for tail in tails:
            coeffs = [(0,) * l] * lead + [(1,) + (0,) * (l - 1)] + list(tail)
            acc = None
            for cf, orbit in zip(coeffs, fq_basis):
                for c, mat in zip(cf, orbit):
                    if c:
                        term = [[(c * x) % p for x in r] for r in mat]
                        acc = term if acc is None else [[(a + b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(acc, term)]
            if acc is not None:
                out.append(acc)
    return out


def _all_nonzero_combinations(homs, p):
    from itertools import product as iproduct

    out = []
    r = len(homs)
    for coeffs in iproduct(range(p), repeat=r):
        if not any(coeffs):
            continue
        acc = None
        for c, m in zip(coeffs, homs):
            if c:
                term = [[(c * x) % p for x in r_] for r_ in m]
                acc = term if acc is None else [[(a + b) % p for a, b in zip(r1, r2)] for r1, r2 in zip(acc, term)]
        out.append(acc)
    return out


def _matmulp(a, b, p):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) % p for c in bt] for r in a]


def _combine(coeffs, mats, p):
    n = len(mats[0])
    out = [[0] * n for _ in range(n)]
    for c, m in zip(coeffs, mats):
        if c % p:
            for i in range(n):
                row = m[i]
                orow = out[i]
                for j in range(n):
                    if row[j]:
                        orow[j] = (orow[j] + c * row[j]) % p
    return out


def _ech(rows, p):
    out = []
    for r in rows:
        r = [x % p for x in r]
        if any(r) and fp_rank(out + [r], p) > len(out):
            out.append(r)
    return out


def _complement(rows, n, p):
    comp = []
    base = [list(r) for r in rows]
    for i in range(n):
        cand = [1 if j == i else 0 for j in range(n)]
        if fp_rank(base + comp + [cand], p) > len(base) + len(comp):
            comp.append(cand)
    return comp


def _rowmul(row, mat, p):
    ncols = len(mat[0]) if mat else 0
    out = [0] * ncols
    for i, c in enumerate(row):
        if c:
            mr = mat[i]
            for j in range(ncols):
                if mr[j]:
                    out[j] = (out[j] + c * mr[j]) % p
    return out


# ---------------------------------------------------------------------------
# canonical p-local key and invariants


def p_normalized_rep(lat: PseudoLattice, ref: PseudoLattice, p: int) -> PseudoLattice:
    """Canonical small representative of the p-localization class.

    Relative to the reference lattice: other primes are stripped (replacing
    each elementary divisor by its p-part) and the whole lattice is rescaled
    by a power of p (a lattice and its p-multiples are isomorphic), so
    representatives always satisfy p^e * REF ⊆ rep ⊆ REF with small e.
    """
    solver = ref._solver or RowSolver(ref.basis_matrix())
    ref._solver = solver
    rows = []
    for idl, row in zip(lat.ideals, lat.basis):
        c = solver.solve([idl.gen * x for x in row])
        rows.append([x / ri.gen for x, ri in zip(c, ref.ideals)])
    den = 1
    import math

    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    t = [[int(x * den) for x in r] for r in rows]
    d, _, v = snf_int(t, want_u=False, want_v=True)
    # With U t V = D the lattice equals rowspan(diag(d/den) @ V^{-1} @ REF);
    # keeping only the p-parts of d_i/den freezes exactly the p-localization,
    # and dividing out the minimal power of p rescales within the class.
    n = len(t)
    vin = MatQ([[Q(x) for x in r] for r in v]).inv()
    vals = [v_p(Q(d[i], den), p) for i in range(n)]
    vmin = min(vals)
    parts = [Q(p) ** (vals[i] - vmin) for i in range(n)]
    ref_z = ref.zbasis_matrix()
    ref2 = vin @ ref_z
    new_rows = [[parts[i] * x for x in ref2.rows[i]] for i in range(n)]
    return zmodule_from_rows(new_rows, lat.ambient_dim)


def genus_invariant(ctx: GenusContext, lat: PseudoLattice) -> tuple:
    p = ctx.p
    x = LatticeMod(module=ctx.module, lattice=lat)
    mats = _action_on_lattice_modp(x, p, p)
    nlat = lat.rank
    # radical filtration dimensions
    jx_rows = []
    for rvec in ctx.data.radical:
        jx_rows.extend(_combine(rvec, mats, p))
    jx = _ech(jx_rows, p)
    dims = [nlat - len(jx)]
    cur = jx
    for _ in range(3):
        nxt_rows = []
        for rvec in ctx.data.radical:
            m = _combine(rvec, mats, p)
            for r in cur:
                nxt_rows.append(_rowmul(r, m, p))
        nxt = _ech(nxt_rows, p)
        dims.append(len(cur) - len(nxt))
        cur = nxt
        if not cur:
            break
    # top multiplicities via the primitive idempotents
    comp_rows = _complement(jx, nlat, p)
    from .localiso import _ProjSolver

    proj = _ProjSolver(jx, comp_rows, p)
    mult = []
    for compo, simple in zip(ctx.data.semisimple.components, ctx.simples):
        prim_qb = _embed_comp(compo, compo.prim_idempotent)
        lifted = ctx.data.lift(prim_qb)
        m = _combine(lifted, mats, p)
        top_rows = [proj.project(_rowmul(cb, m, p)) for cb in comp_rows]
        mult.append(fp_rank(top_rows, p) // compo.endo_deg)
    # index of the maximal-order closure (precomputed action matrices)
    gen_rows = []
    bz = lat.zbasis_matrix()
    for m in ctx.m_action:
        prod = bz @ m
        gen_rows.extend(list(r) for r in prod.rows)
    mx_lat = zmodule_from_rows(gen_rows, lat.ambient_dim)
    idx = module_index(mx_lat, lat)
    return (tuple(dims), tuple(mult), v_p(idx.gen, p))


def _embed_comp(compo: FpSimpleComponent, vec):
    out = [0] * len(compo.basis[0])
    for c, row in zip(vec, compo.basis):
        if c:
            out = [(a + c * b) for a, b in zip(out, row)]
    return out


# ---------------------------------------------------------------------------
# pairwise tests


def _reduced_hom_mats(hom_mats, X: PseudoLattice, Y: PseudoLattice, p: int):
    bx = X.zbasis_matrix()
    solver = Y._solver or RowSolver(Y.basis_matrix())
    Y._solver = solver
    out = []
    for f in hom_mats:
        rows = []
        for row in bx.rows:
            img = [sum(row[i] * f.rows[i][j] for i in range(len(row)) if row[i]) for j in range(f.ncols)]
            c = solver.solve(img)
            rows.append([_frmod(ci / idl.gen, p) for ci, idl in zip(c, Y.ideals)])
        out.append(rows)
    return out


def _frmod(x: Fraction, p: int) -> int:
    return (x.numerator * pow(x.denominator, -1, p)) % p


def mc_iso_prefilter(hom_red, p: int, n: int, eps: Fraction, rng: Random, field: SmallGF) -> bool:
    """True only when a random evaluation certifies isomorphism."""
    mats = [m for m in hom_red if any(any(r) for r in m)]
    if not mats:
        return False
    _, k = monte_carlo_parameters(n, p, eps)
    add, mul = field.add_table, field.mul_table
    embedded = [[[field.from_int(x) for x in row] for row in m] for m in mats]
    for _ in range(k):
        point = [field.random(rng) for _ in mats]
        acc = [[0] * n for _ in range(n)]
        for c, m in zip(point, embedded):
            if not c:
                continue
            crow = mul[c]
            for i in range(n):
                mi = m[i]
                ai = acc[i]
                for j in range(n):
                    if mi[j]:
                        ai[j] = add[ai[j]][crow[mi[j]]]
        if field.det(acc):
            return True
    return False


def deterministic_iso_test(ctx: GenusContext, cand: LatticeMod, cls: GenusClass) -> bool:
    """Localized-freeness decision (exact Hom over exact End, reduced at p)."""
    hom_mats = hom_lattice_fast(cand, cls.latmod, hom_a_basis=ctx.hom_a)
    if len(hom_mats) != len(cls.end_mats) or not hom_mats:
        return False
    flat_hom = MatQ([[x for row in f.rows for x in row] for f in hom_mats])
    hsolver = RowSolver(flat_hom)
    action = []
    for e in cls.end_mats:
        rows = []
        for f in hom_mats:
            prod = f @ e
            c = hsolver.solve([x for row in prod.rows for x in row])
            if c is None:
                return False
            rows.append(c)
        action.append(MatQ(rows))
    module = ModuleSpace(cls.end_order, action)
    h_mod = LatticeMod(module=module, lattice=PseudoLattice.standard(len(hom_mats)))
    gen = local_free_basis(h_mod, ctx.p, 1, data=cls.end_data, seed=ctx.seed)
    if gen is None:
        return False
    f = None
    for c, m in zip(gen[0], hom_mats):
        if c:
            term = m.scale(c)
            f = term if f is None else f + term
    img_rows = []
    for idl, row in zip(cand.lattice.ideals, cand.lattice.basis):
        img = [sum(row[i] * f.rows[i][j] for i in range(len(row)) if row[i]) for j in range(f.ncols)]
        img_rows.append([idl.gen * x for x in img])
    img = zmodule_from_rows(img_rows, f.ncols)
    idx = module_index(cls.latmod.lattice, img)
    return v_p(idx.gen, ctx.p) == 0


def make_class(ctx: GenusContext, latmod: LatticeMod, index: int, inv: tuple) -> GenusClass:
    end_mats = hom_lattice_fast(latmod, latmod, hom_a_basis=ctx.hom_a)
    alg, _ = composition_algebra(end_mats)
    end_order = OrderZ(alg, PseudoLattice.standard(alg.dim), check=False)
    end_data = OrderModPData(end_order, ctx.p, ctx.seed)
    return GenusClass(
        index=index,
        latmod=latmod,
        invariant=inv,
        end_mats=end_mats,
        end_order=end_order,
        end_data=end_data,
    )


# ---------------------------------------------------------------------------
# the enumeration


def genus_enumerate(
    lam: OrderZ,
    p: int,
    module: ModuleSpace | None = None,
    start: PseudoLattice | None = None,
    seed: int = 0,
    eps=Q(1, 2**20),
    use_mc: bool = True,
    max_classes: int | None = None,
    jobs: int = 1,
    progress=None,
) -> GenusReport:
    """All local isomorphism classes of full lattices in the module at p."""
    if module is None:
        module = ModuleSpace.regular(lam)
    if start is None:
        start = lam.lattice if module.is_regular else _default_full_lattice(lam, module)
    ctx = GenusContext(lam, p, module, seed)
    rng = Random(seed)
    n = start.rank
    l, _ = monte_carlo_parameters(n, p, Q(eps))
    field = SmallGF(p, l, seed=seed)
    ref = start.canonical()
    start_rep = p_normalized_rep(ref, ref, p)
    start_mod = LatticeMod(module=module, lattice=start_rep)
    inv0 = genus_invariant(ctx, start_mod.lattice)
    classes = [make_class(ctx, start_mod, 0, inv0)]
    report = GenusReport(classes=classes)
    seen_keys = {start_rep.key()}
    queue = [classes[0]]
    while queue:
        rec = queue.pop(0)
        for sub in maximal_sublattices(ctx, rec.latmod.lattice):
            report.candidates += 1
            rep_lat = p_normalized_rep(sub, ref, p)
            key = rep_lat.key()
            if key in seen_keys:
                continue
            seen_keys.add(key)
            inv = genus_invariant(ctx, rep_lat)
            cand_mod = LatticeMod(module=module, lattice=rep_lat)
            cands = [c for c in classes if c.invariant == inv]
            matched = None
            if use_mc and cands:
                hom_cache = {}
                for c in cands:
                    hom_mats = hom_lattice_fast(cand_mod, c.latmod, hom_a_basis=ctx.hom_a)
                    hom_cache[c.index] = hom_mats
                    red = _reduced_hom_mats(hom_mats, cand_mod.lattice, c.latmod.lattice, p)
                    report.tests += 1
                    if mc_iso_prefilter(red, p, n, Q(eps), rng, field):
                        matched = c
                        report.mc_hits += 1
                        break
            if matched is None:
                if jobs > 1 and len(cands) > 1:
                    from concurrent.futures import ThreadPoolExecutor

                    with ThreadPoolExecutor(max_workers=jobs) as pool:
                        results = list(
                            pool.map(lambda c: deterministic_iso_test(ctx, cand_mod, c), cands)
                        )
                    report.tests += len(cands)
                    matched = next((c for c, r in zip(cands, results) if r), None)
                else:
                    for c in cands:
                        report.tests += 1
                        if deterministic_iso_test(ctx, cand_mod, c):
                            matched = c
                            break
            if matched is None:
                newc = make_class(ctx, cand_mod, len(classes), inv)
                classes.append(newc)
                queue.append(newc)
                if progress:
                    progress(len(classes), report)
                if max_classes and len(classes) > max_classes:
                    raise RuntimeError("class bound exceeded")
    return report


def _default_full_lattice(lam: OrderZ, module: ModuleSpace) -> PseudoLattice:
    rows = []
    d = module.dim
    std = [[Q(1) if i == j else Q(0) for j in range(d)] for i in range(d)]
    for b in range(lam.dim):
        m = module.action[b]
        for r in std:
            rows.append([sum(r[i] * m.rows[i][j] for i in range(d)) for j in range(d)])
    return zmodule_from_rows(rows + std, d)
