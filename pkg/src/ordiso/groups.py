"""Finite groups by multiplication table, with the standard small constructions."""

from __future__ import annotations

from .errors import InvalidGroupTable


class GroupData:
    """A finite group given by its multiplication table of element indices."""

    def __init__(self, mult_table: list[list[int]], check: bool = True):
        self.table = [list(map(int, row)) for row in mult_table]
        self.order = len(self.table)
        if check:
            self._validate()
        self.identity = self._find_identity()
        self.inv = self._find_inverses()

    def _validate(self):
        n = self.order
        for row in self.table:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                raise InvalidGroupTable("table is not n x n over element indices")
        if self._find_identity() is None:
            raise InvalidGroupTable("no identity element")
        e = self._find_identity()
        for i in range(n):
            if e not in self.table[i]:
                raise InvalidGroupTable(f"element {i} has no inverse")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise InvalidGroupTable("associativity fails")

    def _find_identity(self):
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(self.order)):
                return e
        return None

    def _find_inverses(self):
        e = self.identity
        inv = [None] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if self.table[a][b] == e:
                    inv[a] = b
                    break
        return inv

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @staticmethod
    def from_permutations(gens: list[tuple[int, ...]], degree: int) -> "GroupData":
        """Group generated by permutations (images of 0..degree-1)."""
        idp = tuple(range(degree))
        els = {idp}
        frontier = [idp]
        while frontier:
            g = frontier.pop()
            for h in gens:
                ng = tuple(g[h[i]] for i in range(degree))
                if ng not in els:
                    els.add(ng)
                    frontier.append(ng)
        ordered = sorted(els)
        index = {e: i for i, e in enumerate(ordered)}
        table = [
            [index[tuple(a[b[i]] for i in range(degree))] for b in ordered] for a in ordered
        ]
        return GroupData(table, check=False)


def cyclic(n: int) -> GroupData:
    return GroupData([[(i + j) % n for j in range(n)] for i in range(n)], check=False)


def direct_product(g1: GroupData, g2: GroupData) -> GroupData:
    n1, n2 = g1.order, g2.order
    table = [[0] * (n1 * n2) for _ in range(n1 * n2)]
    for a in range(n1):
        for b in range(n2):
            for c in range(n1):
                for d in range(n2):
                    table[a * n2 + b][c * n2 + d] = g1.table[a][c] * n2 + g2.table[b][d]
    return GroupData(table, check=False)


def dihedral(n: int) -> GroupData:
    """Dihedral group of order 2n: elements r^i and s r^i."""
    order = 2 * n

    def mul(x, y):
        fx, ix = divmod(x, n)
        fy, iy = divmod(y, n)
        if fx == 0:
            return fy * n + (ix + iy) % n if fy == 0 else n + (iy - ix) % n
        return n + (ix + iy) % n if fy == 0 else ((iy - ix) % n)

    return GroupData([[mul(x, y) for y in range(order)] for x in range(order)], check=False)


def symmetric(n: int) -> GroupData:
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return GroupData.from_permutations(gens, n)


def alternating4() -> GroupData:
    return GroupData.from_permutations([(1, 2, 0, 3), (1, 0, 3, 2)], 4)


def quaternion8() -> GroupData:
    """Q8 = {±1, ±i, ±j, ±k}; index = 2*symbol + sign with symbols 1,i,j,k."""
    # multiplication of symbols: table of (symbol, sign)
    sym_mul = {
        (0, 0): (0, 1), (0, 1): (1, 1), (0, 2): (2, 1), (0, 3): (3, 1),
        (1, 0): (1, 1), (1, 1): (0, -1), (1, 2): (3, 1), (1, 3): (2, -1),
        (2, 0): (2, 1), (2, 1): (3, -1), (2, 2): (0, -1), (2, 3): (1, 1),
        (3, 0): (3, 1), (3, 1): (2, 1), (3, 2): (1, -1), (3, 3): (0, -1),
    }

    def mul(x, y):
        sx, gx = divmod(x, 4)
        sy, gy = divmod(y, 4)
        gz, sign = sym_mul[(gx, gy)]
        sz = (sx + sy + (1 if sign < 0 else 0)) % 2
        return sz * 4 + gz

    return GroupData([[mul(x, y) for y in range(8)] for x in range(8)], check=True)


NAMED_GROUPS = {
    "C2": lambda: cyclic(2),
    "C3": lambda: cyclic(3),
    "C4": lambda: cyclic(4),
    "C2xC2": lambda: direct_product(cyclic(2), cyclic(2)),
    "S3": lambda: symmetric(3),
    "D4": lambda: dihedral(4),
    "Q8": lambda: quaternion8(),
    "A4": lambda: alternating4(),
    "Q8xC2": lambda: direct_product(quaternion8(), cyclic(2)),
}
