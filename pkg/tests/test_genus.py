"""Genus enumeration at a prime, with an exhaustive small-index oracle."""

from fractions import Fraction as Q

import pytest

from ordiso.algebra import group_algebra
from ordiso.genus import genus_enumerate, p_normalized_rep
from ordiso.groups import NAMED_GROUPS, cyclic, direct_product
from ordiso.linalg import PseudoLattice, zmodule_from_rows
from ordiso.localiso import local_iso_reduced
from ordiso.orders import LatticeMod, ModuleSpace, OrderZ


def test_c2_genus_matches_exhaustive_small_index_oracle():
    from tests_support_hnf import stable_sublattices_up_to_index

    A = group_algebra(NAMED_GROUPS["C2"]())
    lam = OrderZ(A, PseudoLattice.standard(2))
    rep = genus_enumerate(lam, 2, seed=0)
    assert len(rep.classes) == 2
    # oracle: classify all stable sublattices of index <= 8 locally at 2
    module = ModuleSpace.regular(lam)
    sublats = stable_sublattices_up_to_index(A, lam, 8)
    assert sublats
    reps = [c.latmod for c in rep.classes]
    for lat in sublats:
        x = LatticeMod(module=module, lattice=lat)
        hits = [
            r for r in reps if local_iso_reduced(x, r, 2).is_iso
        ]
        assert len(hits) == 1, "every lattice matches exactly one class"


def test_c2_at_odd_prime_single_class():
    A = group_algebra(NAMED_GROUPS["C2"]())
    lam = OrderZ(A, PseudoLattice.standard(2))
    rep = genus_enumerate(lam, 3, seed=0)
    assert len(rep.classes) == 1


def test_counts_are_seed_and_prefilter_independent():
    A = group_algebra(direct_product(cyclic(2), cyclic(2)))
    lam = OrderZ(A, PseudoLattice.standard(4))
    a = genus_enumerate(lam, 2, seed=0)
    b = genus_enumerate(lam, 2, seed=99)
    c = genus_enumerate(lam, 2, seed=0, use_mc=False)
    assert len(a.classes) == len(b.classes) == len(c.classes) == 27
    # class representatives are pairwise non-isomorphic locally
    module = ModuleSpace.regular(lam)
    reps = [cl.latmod for cl in a.classes]
    for i in range(0, len(reps), 9):
        for j in range(0, len(reps), 9):
            if i < j:
                assert not local_iso_reduced(reps[i], reps[j], 2).is_iso


def test_s3_at_3_regression():
    A = group_algebra(NAMED_GROUPS["S3"]())
    lam = OrderZ(A, PseudoLattice.standard(6))
    rep = genus_enumerate(lam, 3, seed=0)
    assert len(rep.classes) == 8


def test_p_normalized_rep_properties():
    A = group_algebra(NAMED_GROUPS["C2"]())
    lam = OrderZ(A, PseudoLattice.standard(2))
    ref = lam.lattice.canonical()
    # 6 * Lambda normalizes to Lambda (odd part stripped, 2-power rescaled)
    six = ref.scale(6)
    assert p_normalized_rep(six, ref, 2) == ref
    # a 2-power sublattice keeps only its 2-structure
    sub = zmodule_from_rows([[2, 0], [0, 1]], 2)
    n1 = p_normalized_rep(sub, ref, 2)
    n2 = p_normalized_rep(zmodule_from_rows([[6, 0], [0, 3]], 2), ref, 2)
    assert n1 == n2


@pytest.mark.slow
def test_a4_at_2_has_163_classes(a4_genus_report):
    assert len(a4_genus_report.classes) == 163


def test_deterministic_test_agrees_with_reduced_method():
    import random
    from fractions import Fraction as Q
    from ordiso.genus import GenusContext, deterministic_iso_test, make_class
    from ordiso.localiso import local_iso_reduced

    rng = random.Random(77)
    A = group_algebra(NAMED_GROUPS["S3"]())
    lam = OrderZ(A, PseudoLattice.standard(6))
    module = ModuleSpace.regular(lam)
    ctx = GenusContext(lam, 2, module, seed=0)

    def rand_lat():
        while True:
            rows = []
            for _ in range(2):
                w = tuple(Q(rng.randrange(-2, 3)) for _ in range(6))
                for b in lam.zbasis():
                    rows.append(A.mul(b, w))
            lat = zmodule_from_rows(rows, 6)
            if lat.rank == 6:
                return lat

    for _ in range(6):
        xl, yl = rand_lat(), rand_lat()
        x = LatticeMod(module=module, lattice=xl)
        ycls = make_class(ctx, LatticeMod(module=module, lattice=yl), 0, ())
        got = deterministic_iso_test(ctx, x, ycls)
        want = local_iso_reduced(x, ycls.latmod, 2).is_iso
        assert got == want


def test_p_normalized_rep_is_locally_isomorphic():
    from ordiso.genus import p_normalized_rep
    from ordiso.localiso import local_iso_reduced

    A = group_algebra(NAMED_GROUPS["C2xC2"]())
    lam = OrderZ(A, PseudoLattice.standard(4))
    module = ModuleSpace.regular(lam)
    ref = lam.lattice.canonical()
    lat = zmodule_from_rows([[2, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [3, 0, 0, 3]], 4)
    rep = p_normalized_rep(lat, ref, 2)
    a = LatticeMod(module=module, lattice=lat)
    b = LatticeMod(module=module, lattice=rep)
    assert local_iso_reduced(a, b, 2).is_iso
