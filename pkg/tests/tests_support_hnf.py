"""Shared test helper: exhaustive HNF enumeration of stable sublattices."""

import itertools

from ordiso.linalg import PseudoLattice
from ordiso.orders import LatticeMod, ModuleSpace


def hnfs_of_index(n, idx):
    """All upper-triangular Hermite forms with determinant idx."""

    def diags(rem, k):
        if k == n - 1:
            yield [rem]
            return
        for d in range(1, rem + 1):
            if rem % d == 0:
                for rest in diags(rem // d, k + 1):
                    yield [d] + rest

    for diag in diags(idx, 0):
        positions = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for fill in itertools.product(*[range(diag[j]) for (i, j) in positions]):
            rows = [[0] * n for _ in range(n)]
            for i in range(n):
                rows[i][i] = diag[i]
            for (i, j), v in zip(positions, fill):
                rows[i][j] = v
            yield rows


def stable_sublattices_up_to_index(A, lam, max_index):
    """Full sublattices of the order with index <= max_index, stable under it."""
    n = A.dim
    module = ModuleSpace.regular(lam)
    out = []
    for idx in range(1, max_index + 1):
        for rows in hnfs_of_index(n, idx):
            lat = PseudoLattice.from_rows(rows)
            lm = LatticeMod(module=module, lattice=lat)
            if lm.verify_stable():
                out.append(lat)
    return out
