"""Randomized property suites runnable from the CLI.

Each suite exercises one documented invariant at small sizes with a fixed
seed; reports are deterministic (no timings, sorted structure) so identical
seeds give byte-identical output.  FAULT_INJECT forces a named suite to fail,
for testing the reporting path.
"""

from __future__ import annotations

import random
import zlib
from fractions import Fraction

from .algebra import group_algebra, wedderburn
from .groups import NAMED_GROUPS
from .linalg import (
    MatQ,
    PseudoLattice,
    module_index,
    pseudo_hnf,
    saturate,
    snf_int,
    zmodule_from_rows,
)
from .orders import LatticeMod, ModuleSpace, OrderZ

Q = Fraction

FAULT_INJECT: str | None = None


def _check_saturation(rng: random.Random) -> str | None:
    for _ in range(10):
        dim = rng.randrange(2, 5)
        rank = rng.randrange(1, dim + 1)
        rows = [[rng.randrange(-4, 5) for _ in range(dim)] for _ in range(rank)]
        if MatQ(rows).rank() < rank:
            continue
        m = PseudoLattice.standard(dim)
        n = PseudoLattice.from_rows(rows)
        s = saturate(n, m)
        if saturate(s, m) != s:
            return "saturation is not idempotent"
        coords = []
        for idl, row in zip(s.ideals, s.basis):
            c = m.coords(row)
            coords.append([int(x * idl.gen) for x in c])
        d, _, _ = snf_int(coords, want_u=False, want_v=False)
        if any(x != 1 for x in d[: s.rank]):
            return f"saturation not saturated: divisors {d}"
    return None


def _check_hnf_invariance(rng: random.Random) -> str | None:
    for _ in range(10):
        n, m = 2, 4
        mat = MatQ([[rng.randrange(-5, 6) for _ in range(m)] for _ in range(n)])
        if mat.rank() < n:
            continue
        u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
        for _ in range(8):
            i, j = rng.randrange(m), rng.randrange(m)
            if i != j:
                c = rng.randrange(-2, 3)
                for k in range(m):
                    u[k][j] += c * u[k][i]
        base = pseudo_hnf([1] * m, mat)
        moved = pseudo_hnf([1] * m, mat @ MatQ(u))
        if base.H != moved.H or base.ideals != moved.ideals:
            return "pseudo-HNF is not invariant under unimodular column moves"
    return None


def _check_index_multiplicativity(rng: random.Random) -> str | None:
    for _ in range(10):
        dim = rng.randrange(1, 4)
        m = PseudoLattice.standard(dim)

        def rand_mat():
            while True:
                a = MatQ([[rng.randrange(-3, 4) for _ in range(dim)] for _ in range(dim)])
                if a.det() != 0:
                    return a

        t1 = rand_mat()
        n = PseudoLattice.from_rows(t1.rows)
        p = PseudoLattice.from_rows((rand_mat() @ t1).rows)
        if module_index(m, n).gen * module_index(n, p).gen != module_index(m, p).gen:
            return "module index fails multiplicativity"
    return None


def _check_morita_roundtrip(rng: random.Random) -> str | None:
    from .maxiso import make_component_context, morita_reduce, morita_lift, _subspace_map_to_ambient, _d_structure
    from .orders import maximal_order

    G = NAMED_GROUPS["S3"]()
    A = group_algebra(G)
    lam = OrderZ(A, PseudoLattice.standard(6))
    wd = wedderburn(A, 0)
    m, _ = maximal_order(lam, wd)
    comp = next(c for c in wd.components if c.kind.tag == "matrix_over_Q")
    e = comp.idempotent
    comp_rows = [comp.from_parent(A.mul(e, b)) for b in m.zbasis()]
    m_comp = OrderZ(comp.algebra, zmodule_from_rows(comp_rows, comp.algebra.dim), is_maximal=True, check=False)
    module = ModuleSpace.regular(lam)
    ctx = make_component_context(comp, m_comp, module)
    mx = LatticeMod(module=module, lattice=lam.lattice)
    from .orders import component_lattice, extend_lattice

    mxl = extend_lattice(m, mx)
    xi = component_lattice(e, mxl).lattice
    red = morita_reduce(ctx, xi)
    # the identity on the reduced lattice must lift to a map fixing xi with
    # restriction equal to the identity
    wx, tx = _d_structure(ctx, [list(r) for r in red.zbasis_matrix().rows])
    n_red = tx.nrows
    g_amb = _subspace_map_to_ambient(ctx, ctx, tx, tx, wx, wx, MatQ.identity(n_red))
    f = morita_lift(ctx, ctx, g_amb)
    img = zmodule_from_rows(
        [[idl.gen * v for v in _rowmul(list(row), f)] for idl, row in zip(xi.ideals, xi.basis)],
        xi.ambient_dim,
    )
    if img != xi.canonical():
        return "Morita lift of the identity does not fix the lattice"
    # restriction back to the reduced side is the identity
    for row in red.zbasis_matrix().rows:
        got = _rowmul(list(row), f)
        if tuple(got) != tuple(row):
            return "Morita round trip does not restrict to the original map"
    return None


def _rowmul(row, m: MatQ):
    return [sum(row[i] * m.rows[i][j] for i in range(len(row)) if row[i]) for j in range(m.ncols)]


def _check_steinitz(rng: random.Random) -> str | None:
    from .maxiso import (
        SkewField,
        hurwitz_order,
        rational_field_order,
        steinitz_form,
    )
    from .algebra import ComponentKind

    alg1, z1 = rational_field_order()
    sk1 = SkewField(alg1, ComponentKind(tag="rational_field"), z1)
    for _ in range(6):
        r = rng.randrange(1, 4)
        rows = [[rng.randrange(-4, 5) for _ in range(r)] for _ in range(r)]
        if MatQ(rows).det() == 0:
            continue
        m = PseudoLattice.from_rows(rows)
        st = steinitz_form(m, sk1)
        if st.recombined_lattice(sk1, r) != m.canonical():
            return "Steinitz recombination failed over Z"
    alg, hur = hurwitz_order()
    kind = ComponentKind(tag="definite_quaternion", disc=2, quat_params=(Q(-1), Q(-1)))
    sk = SkewField(alg, kind, hur)
    rows = []
    for r_ in hur.lattice.basis:
        rows.append(list(r_) + [0, 0, 0, 0])
    two = (Q(1), Q(1), Q(0), Q(0))
    from .maxiso import ideal_times_element

    ideal = ideal_times_element(sk, hur.lattice, two)
    for r_ in ideal.zbasis_matrix().rows:
        rows.append([0, 0, 0, 0] + list(r_))
    m2 = zmodule_from_rows(rows, 8)
    st = steinitz_form(m2, sk)
    if st.recombined_lattice(sk, 8) != m2.canonical():
        return "Steinitz recombination failed over the Hurwitz order"
    return None


def _check_certificates(rng: random.Random) -> str | None:
    from .mainiso import is_isomorphic, verify_certificate

    G = NAMED_GROUPS["C2"]()
    A = group_algebra(G)
    lam = OrderZ(A, PseudoLattice.standard(2))
    module = ModuleSpace.regular(lam)
    x = LatticeMod(module=module, lattice=PseudoLattice.standard(2))
    v = is_isomorphic(lam, x, x, seed=0)
    if not v.is_isomorphic or not verify_certificate(v.certificate, lam, x, x):
        return "identity certificate rejected"
    # tampering must be caught
    rows = [list(r) for r in v.certificate.map.rows]
    rows[0][0] += 1
    from .mainiso import IsoCertificate

    bad = IsoCertificate(map=MatQ(rows), component_words=v.certificate.component_words)
    if verify_certificate(bad, lam, x, x):
        return "tampered certificate accepted"
    return None


SUITES = {
    "exact-linalg/saturation": _check_saturation,
    "exact-linalg/pseudo-hnf": _check_hnf_invariance,
    "exact-linalg/module-index": _check_index_multiplicativity,
    "maxorder-iso/morita": _check_morita_roundtrip,
    "maxorder-iso/steinitz": _check_steinitz,
    "main-iso/certificates": _check_certificates,
}


def run_selfcheck(seed: int = 0) -> dict:
    """Run every suite; deterministic report keyed by suite name."""
    report = {"seed": seed, "results": {}}
    ok = True
    for name in sorted(SUITES):
        if FAULT_INJECT == name:
            report["results"][name] = {"pass": False, "detail": "injected fault"}
            ok = False
            continue
        rng = random.Random(seed ^ zlib.crc32(name.encode()))
        try:
            detail = SUITES[name](rng)
        except Exception as exc:  # a crash is a failure with the reason recorded
            detail = f"exception: {exc}"
        if detail is None:
            report["results"][name] = {"pass": True}
        else:
            report["results"][name] = {"pass": False, "detail": detail}
            ok = False
    report["pass"] = ok
    return report
