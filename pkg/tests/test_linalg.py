"""Core exact linear algebra: normal forms, saturation, indices, residue kernels."""

import itertools
import random
from fractions import Fraction as Q

import pytest

from ordiso.errors import CompositeModulus, NonFullRank, NotSublattice, UnequalSpan
from ordiso.linalg import (
    FracIdl,
    MatQ,
    ModPkMat,
    PseudoLattice,
    integral_preimage_lattice,
    intersect,
    kernel_mod,
    module_index,
    pseudo_hnf,
    saturate,
    snf,
    snf_int,
)

# ---------------------------------------------------------------------------
# oracles


def oracle_row_hnf(rows):
    """Naive integer row reduction to HNF, independent of the library path."""
    a = [list(r) for r in rows]
    n = len(a[0])
    r = 0
    for j in range(n):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][j] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][j]))
            a[r], a[i0] = a[i0], a[r]
            done = True
            for i in range(r + 1, len(a)):
                q = a[i][j] // a[r][j]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                if a[i][j]:
                    done = False
            if done:
                break
        if r < len(a) and a[r][j]:
            if a[r][j] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][j] // a[r][j]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a if any(row)]


def oracle_snf_2x2_bruteforce(mat):
    """Invariant factors of a 2x2 integer matrix by searching small unimodular U, V."""
    ents = range(-3, 4)
    unimods = [
        ((a, b), (c, d))
        for a, b, c, d in itertools.product(ents, repeat=4)
        if abs(a * d - b * c) == 1
    ]
    best = None
    for u in unimods:
        ua = [
            [u[0][0] * mat[0][0] + u[0][1] * mat[1][0], u[0][0] * mat[0][1] + u[0][1] * mat[1][1]],
            [u[1][0] * mat[0][0] + u[1][1] * mat[1][0], u[1][0] * mat[0][1] + u[1][1] * mat[1][1]],
        ]
        for v in unimods:
            m00 = ua[0][0] * v[0][0] + ua[0][1] * v[1][0]
            m01 = ua[0][0] * v[0][1] + ua[0][1] * v[1][1]
            m10 = ua[1][0] * v[0][0] + ua[1][1] * v[1][0]
            m11 = ua[1][0] * v[0][1] + ua[1][1] * v[1][1]
            if m01 == 0 and m10 == 0:
                d1, d2 = abs(m00), abs(m11)
                if d2 == 0:
                    d1, d2 = sorted((d1, d2), reverse=True) if d1 else (0, 0)
                if d1 and d2 and d2 % d1 != 0:
                    continue
                if d1 == 0 and d2:
                    d1, d2 = d2, 0
                if best is None:
                    best = (d1, d2)
    return best


def oracle_saturation(N: PseudoLattice, M: PseudoLattice) -> PseudoLattice:
    """Saturation via Smith form of the coordinate matrix (independent route)."""
    bm = M.zbasis_matrix()
    coords = []
    for row in N.zbasis_matrix().rows:
        c = PseudoLattice.from_rows(bm.rows).coords(row)
        coords.append(c)
    den = 1
    for c in coords:
        for x in c:
            den = den * x.denominator // __import__("math").gcd(den, x.denominator)
    ci = [[int(x * den) for x in c] for c in coords]
    d, _, v = snf_int(ci, want_u=False, want_v=True)
    rank = sum(1 for x in d if x)
    # rows of (V^{-1}) spanning: saturation coords = Z-span of first `rank` columns
    # of V^{-T}; equivalently the saturation is spanned by y with y = e_i V^{-1}.
    vinv = MatQ([[Q(x) for x in r] for r in v]).inv()
    rows = []
    for i in range(rank):
        y = vinv.rows[i]
        vec = [Q(0)] * M.ambient_dim
        for c, brow in zip(y, bm.rows):
            vec = [a + c * b for a, b in zip(vec, brow)]
        rows.append(vec)
    if not rows:
        return PseudoLattice.zero(M.ambient_dim)
    return PseudoLattice.from_rows(rows, ambient_dim=M.ambient_dim)


def test_oracle_saturation_definition():
    # y*Ci spans rowspace; saturation coords are rowspace(Ci) ∩ Z^m = rows of Vinv.
    N = PseudoLattice.from_rows([[2, 0]])
    M = PseudoLattice.standard(2)
    assert oracle_saturation(N, M) == PseudoLattice.from_rows([[1, 0]], ambient_dim=2)


# ---------------------------------------------------------------------------
# pseudo_hnf


def test_pseudo_hnf_identity():
    ph = pseudo_hnf([1, 1, 1], MatQ.identity(3))
    assert ph.H == MatQ.identity(3)
    assert ph.U == MatQ.identity(3)
    assert all(i.is_one() for i in ph.ideals)


def test_pseudo_hnf_integer_rows_matches_row_hnf_oracle():
    rows = [[4, 2], [2, 3]]
    expected = oracle_row_hnf(rows)
    assert expected == [[2, 3], [0, 4]]
    ph = pseudo_hnf([1, 1], MatQ(rows).transpose())
    got = PseudoLattice(
        2, ph.ideals, [[ph.H[i, j] for i in range(2)] for j in range(2)]
    )
    assert got == PseudoLattice.from_rows(expected)


def test_pseudo_hnf_ideal_scaling_symmetry():
    rows = MatQ([[4, 2], [2, 3]]).transpose()
    base = pseudo_hnf([1, 1], rows)
    scaled = pseudo_hnf([Q(5), 1], rows)
    # Shape of H unchanged; ideals of the affected pseudo-column scale by q.
    assert scaled.H.rows == base.H.rows or scaled.H.ncols == base.H.ncols
    prod_base = base.ideals[0].gen * base.ideals[1].gen
    prod_scaled = scaled.ideals[0].gen * scaled.ideals[1].gen
    assert prod_scaled == 5 * prod_base


def test_pseudo_hnf_transform_properties():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randrange(1, 4)
        m = n + rng.randrange(0, 3)
        mat = MatQ([[rng.randrange(-6, 7) for _ in range(m)] for _ in range(n)])
        if mat.rank() < n:
            continue
        ideals = [FracIdl(Q(rng.randrange(1, 5), rng.randrange(1, 5))) for _ in range(m)]
        ph = pseudo_hnf(ideals, mat)
        assert (mat @ ph.U) == ph.H
        assert (ph.U @ ph.U_inv).is_identity()
        # zero block on the left, unit diagonal on the right
        for i in range(n):
            for j in range(m - n):
                assert ph.H[i, j] == 0
            assert ph.H[i, m - n + i] == 1
            for j in range(m - n, m - n + i):
                assert ph.H[i, j] == 0
        # U entries lie in input_ideal_i * out_ideal_j^{-1}
        for i in range(m):
            for j in range(m):
                x = ph.U[i, j]
                if x:
                    assert (x / (ideals[i].gen / ph.ideals[j].gen)).denominator == 1
        # product formula: prod(in) = |det U| * prod(out)
        pin = Q(1)
        for idl in ideals:
            pin *= idl.gen
        pout = Q(1)
        for idl in ph.ideals:
            pout *= idl.gen
        assert pin == abs(ph.U.det()) * pout


def test_pseudo_hnf_unimodular_invariance():
    rng = random.Random(11)
    for _ in range(15):
        n, m = 2, 4
        mat = MatQ([[rng.randrange(-5, 6) for _ in range(m)] for _ in range(n)])
        if mat.rank() < n:
            continue
        base = pseudo_hnf([1] * m, mat)
        w = _random_unimodular(m, rng)
        moved = pseudo_hnf([1] * m, mat @ w)
        assert base.H == moved.H
        assert base.ideals == moved.ideals


def _random_unimodular(n, rng):
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.randrange(-2, 3)
        for k in range(n):
            u[k][j] += c * u[k][i]
    return MatQ(u)


def test_pseudo_hnf_nonfullrank():
    with pytest.raises(NonFullRank):
        pseudo_hnf([1, 1], MatQ([[1, 2], [2, 4]]).transpose())


# ---------------------------------------------------------------------------
# snf


def test_snf_diag_2_3():
    assert oracle_snf_2x2_bruteforce([[2, 0], [0, 3]]) == (1, 6)
    res = snf(MatQ([[2, 0], [0, 3]]))
    assert res.divisors == (1, 6)


def test_snf_identity_and_fixed_points():
    res = snf(MatQ.identity(3))
    assert res.divisors == (1, 1, 1)
    res = snf(MatQ([[2, 0], [0, 2]]))
    assert res.divisors == (2, 2)


def test_snf_zero_matrix():
    res = snf(MatQ([[0, 0], [0, 0]]))
    assert res.divisors == (0, 0)


def test_snf_random_properties():
    rng = random.Random(3)
    for _ in range(40):
        m = rng.randrange(1, 5)
        n = rng.randrange(1, 5)
        a = MatQ([[rng.randrange(-9, 10) for _ in range(n)] for _ in range(m)])
        res = snf(a)
        assert (res.U @ a @ res.V) == res.D
        assert abs(res.U.det()) == 1
        assert abs(res.V.det()) == 1
        d = res.divisors
        for x, y in zip(d, d[1:]):
            assert x >= 0 and (x == 0 and y == 0 or y % max(x, 1) == 0 or x == 0)


# ---------------------------------------------------------------------------
# kernel_mod


def brute_kernel(entries, modulus):
    m = len(entries)
    n = len(entries[0]) if entries else 0
    sols = []
    for x in itertools.product(range(modulus), repeat=m):
        if all(sum(x[i] * entries[i][j] for i in range(m)) % modulus == 0 for j in range(n)):
            sols.append(x)
    return set(sols)


def spanned_mod(gens, m, modulus):
    seen = {tuple([0] * m)}
    frontier = [tuple([0] * m)]
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = tuple((c + y) % modulus for c, y in zip(cur, g))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def test_kernel_mod_examples():
    full = kernel_mod(ModPkMat(4, ((0, 0), (0, 0))))
    assert len(full) == 2
    assert spanned_mod(full, 2, 4) == brute_kernel([[0, 0], [0, 0]], 4)

    assert kernel_mod(ModPkMat(5, ((1, 0), (0, 1)))) == []
    assert kernel_mod(ModPkMat(4, ((2,),))) == [(2,)]


def test_kernel_mod_brute_force_agreement():
    rng = random.Random(5)
    cases = [(2, 3), (3, 2), (2, 2), (3, 1), (5, 1), (2, 1), (3, 4), (7, 2), (2, 6)]
    for p, k in cases:
        modulus = p**k
        if modulus > 81:
            continue
        for _ in range(6):
            m = rng.randrange(1, 3 if modulus > 27 else 4)
            n = rng.randrange(1, 4)
            ent = tuple(tuple(rng.randrange(modulus) for _ in range(n)) for _ in range(m))
            got = kernel_mod(ModPkMat(modulus, ent))
            for g in got:
                assert all(
                    sum(g[i] * ent[i][j] for i in range(m)) % modulus == 0 for j in range(n)
                )
            assert spanned_mod(got, m, modulus) == brute_kernel([list(r) for r in ent], modulus)


def test_kernel_mod_composite_modulus_rejected():
    with pytest.raises(CompositeModulus):
        kernel_mod(ModPkMat(6, ((1,),)))


def test_kernel_mod_lifting_path_matches_snf_path():
    from ordiso.modp import kernel_mod_prime_power

    rng = random.Random(9)
    for _ in range(10):
        m, n = rng.randrange(1, 4), rng.randrange(1, 4)
        rows = [[rng.randrange(8) for _ in range(n)] for _ in range(m)]
        a = kernel_mod(ModPkMat(8, tuple(tuple(r) for r in rows)))
        b = kernel_mod_prime_power(rows, 2, 3)
        assert spanned_mod(a, m, 8) == spanned_mod(b, m, 8)


# ---------------------------------------------------------------------------
# saturate


def test_saturate_trivial_examples():
    z = PseudoLattice.standard(1)
    two_z = PseudoLattice.from_rows([[2]])
    assert saturate(two_z, z) == z

    m2 = PseudoLattice.standard(2)
    n = PseudoLattice.from_rows([[2, 0]])
    assert saturate(n, m2) == PseudoLattice.from_rows([[1, 0]], ambient_dim=2)


def test_saturate_full_rank_sublattice_saturates_to_ambient():
    # QN = Q^2 here, so QN ∩ Z^2 is all of M; equivalently the Smith divisors
    # of a saturated sublattice's coordinates must all be 1.
    n = PseudoLattice.from_rows([[2, 2], [0, 4]])
    m = PseudoLattice.standard(2)
    s = saturate(n, m)
    assert s == m
    assert s == oracle_saturation(n, m)


def test_saturate_rank_deficient_oracle_agreement():
    rng = random.Random(13)
    for _ in range(20):
        dim = rng.randrange(2, 5)
        rank = rng.randrange(1, dim)
        m = PseudoLattice.standard(dim)
        rows = [[rng.randrange(-4, 5) for _ in range(dim)] for _ in range(rank)]
        if MatQ(rows).rank() < rank:
            continue
        n = PseudoLattice.from_rows(rows)
        s = saturate(n, m)
        assert s == oracle_saturation(n, m)
        # contains N and spans the same space
        assert s.contains_lattice(n)
        assert s.rank == n.rank


def test_saturate_idempotent_and_saturated():
    rng = random.Random(17)
    for _ in range(15):
        dim = rng.randrange(2, 5)
        rank = rng.randrange(1, dim + 1)
        rows = [[rng.randrange(-4, 5) for _ in range(dim)] for _ in range(rank)]
        if MatQ(rows).rank() < rank:
            continue
        scale = Q(rng.randrange(1, 4), rng.randrange(1, 4))
        m = PseudoLattice.standard(dim).scale(scale)
        n = PseudoLattice.from_rows(rows).scale(scale)
        if not m.contains_lattice(n):
            n = PseudoLattice.from_rows(
                [[scale * Q(x) for x in row] for row in rows]
            )
        s = saturate(n, m)
        assert saturate(s, m) == s
        # saturated: elementary divisors of coords in a basis of M all 1
        coords = []
        for idl, row in zip(s.ideals, s.basis):
            c = m.coords(row)
            coords.append([x * idl.gen / mi.gen for x, mi in zip(c, m.ideals)])
        den = 1
        import math

        for c in coords:
            for x in c:
                den = den * x.denominator // math.gcd(den, x.denominator)
        assert den == 1, "saturation coords must be integral"
        d, _, _ = snf_int([[int(x) for x in c] for c in coords], want_u=False, want_v=False)
        assert all(x == 1 for x in d if x != 0)
        assert all(x == 1 for x in d[: s.rank])


def test_saturate_rejects_non_sublattice():
    m = PseudoLattice.from_rows([[2, 0], [0, 2]])
    n = PseudoLattice.from_rows([[1, 0]])
    with pytest.raises(NotSublattice):
        saturate(n, m)


# ---------------------------------------------------------------------------
# module_index


def test_module_index_examples():
    z2 = PseudoLattice.standard(2)
    assert module_index(z2, z2.scale(2)) == FracIdl(4)
    assert module_index(z2, z2) == FracIdl(1)
    # M = Z e+ ⊕ Z e- with e± = (1±g)/2 in the group-element basis (1, g)
    m = PseudoLattice.from_rows([[Q(1, 2), Q(1, 2)], [Q(1, 2), Q(-1, 2)]])
    lam = PseudoLattice.standard(2)
    assert module_index(m, lam) == FracIdl(2)


def test_module_index_multiplicative():
    rng = random.Random(23)
    for _ in range(20):
        dim = rng.randrange(1, 4)
        m = PseudoLattice.standard(dim)
        t1 = _random_nonsingular(dim, rng)
        n = PseudoLattice.from_rows((t1).rows)
        t2 = _random_nonsingular(dim, rng)
        p = PseudoLattice.from_rows((t2 @ t1).rows)
        lhs = module_index(m, n).gen * module_index(n, p).gen
        assert lhs == module_index(m, p).gen


def _random_nonsingular(n, rng):
    while True:
        a = MatQ([[rng.randrange(-3, 4) for _ in range(n)] for _ in range(n)])
        if a.det() != 0:
            return a


def test_module_index_unequal_span():
    with pytest.raises(UnequalSpan):
        module_index(
            PseudoLattice.from_rows([[1, 0]]), PseudoLattice.from_rows([[0, 1]])
        )


# ---------------------------------------------------------------------------
# intersect


def test_intersect_examples():
    l = PseudoLattice.from_rows([[1, 2], [0, 3]])
    assert intersect(l, l) == l
    assert intersect(
        PseudoLattice.from_rows([[2]]), PseudoLattice.from_rows([[3]])
    ) == PseudoLattice.from_rows([[6]])
    z = intersect(
        PseudoLattice.from_rows([[1, 0]]), PseudoLattice.from_rows([[0, 1]])
    )
    assert z.is_zero()


def test_intersect_contained_in_both():
    rng = random.Random(31)
    for _ in range(15):
        dim = rng.randrange(1, 4)
        l1 = PseudoLattice.from_rows(_random_nonsingular(dim, rng).rows)
        l2 = PseudoLattice.from_rows(_random_nonsingular(dim, rng).rows)
        li = intersect(l1, l2)
        assert l1.contains_lattice(li)
        assert l2.contains_lattice(li)
        # maximality: the intersection contains l1 ∩ l2 sample points
        for idl, row in zip(li.ideals, li.basis):
            assert l1.contains(row) and l2.contains(row)


# ---------------------------------------------------------------------------
# preimage lattice


def test_integral_preimage_lattice():
    rng = random.Random(37)
    for _ in range(20):
        nr = rng.randrange(1, 5)
        s = rng.randrange(1, nr + 1)
        c = MatQ(
            [[Q(rng.randrange(-4, 5), rng.randrange(1, 4)) for _ in range(s)] for _ in range(nr)]
        )
        if c.rank() < s:
            continue
        rows = integral_preimage_lattice(c)
        # every basis vector maps to an integral vector
        for t in rows:
            img = [sum(c[i, j] * t[j] for j in range(s)) for i in range(nr)]
            assert all(x.denominator == 1 for x in img)
        # random integer combos stay integral
        coeffs = [rng.randrange(-2, 3) for _ in rows]
        t = [sum(a * row[j] for a, row in zip(coeffs, rows)) for j in range(s)]
        img = [sum(c[i, j] * t[j] for j in range(s)) for i in range(nr)]
        assert all(x.denominator == 1 for x in img)
