"""Shared fixtures; the A4 genus enumeration runs once per session."""

from fractions import Fraction as Q

import pytest

from ordiso.algebra import group_algebra
from ordiso.genus import genus_enumerate
from ordiso.groups import NAMED_GROUPS
from ordiso.linalg import PseudoLattice
from ordiso.orders import OrderZ


@pytest.fixture(scope="session")
def a4_genus_report():
    A = group_algebra(NAMED_GROUPS["A4"]())
    lam = OrderZ(A, PseudoLattice.standard(12), check=False)
    return genus_enumerate(lam, 2, seed=0, eps=Q(1, 2**20), use_mc=True)
