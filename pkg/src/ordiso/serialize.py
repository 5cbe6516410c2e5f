"""JSON problem files and result documents.

Exact rationals travel as decimal strings "p/q" (or "p" for integers); all
schemas carry a version field.  Lattices are pseudo-bases w.r.t. the
group-element basis of the group algebra.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import SCAlgebra, group_algebra
from .errors import OrdisoError
from .groups import NAMED_GROUPS, GroupData
from .linalg import FracIdl, MatQ, PseudoLattice
from .orders import LatticeMod, ModuleSpace, OrderZ

Q = Fraction

SCHEMA_VERSION = 1

TASKS = ("isom", "local-isom", "hom", "maxorder", "wedderburn", "genus", "selfcheck")


class ProblemError(OrdisoError):
    """Malformed problem file."""


def parse_rat(s) -> Fraction:
    if isinstance(s, int):
        return Q(s)
    if isinstance(s, str):
        return Q(s)
    raise ProblemError(f"expected a rational string, got {s!r}")


def format_rat(x: Fraction) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix_to_json(m: MatQ):
    return [[format_rat(x) for x in row] for row in m.rows]


def matrix_from_json(rows) -> MatQ:
    return MatQ([[parse_rat(x) for x in row] for row in rows])


def lattice_to_json(lat: PseudoLattice):
    return {
        "coeff_ideals": [format_rat(i.gen) for i in lat.ideals],
        "basis": [[format_rat(x) for x in row] for row in lat.basis],
    }


def lattice_from_json(obj, ambient_dim: int) -> PseudoLattice:
    if "basis" not in obj:
        raise ProblemError("lattice needs a 'basis' field")
    basis = [[parse_rat(x) for x in row] for row in obj["basis"]]
    ideals = [FracIdl(parse_rat(x)) for x in obj.get("coeff_ideals", ["1"] * len(basis))]
    try:
        return PseudoLattice(ambient_dim, ideals, basis)
    except Exception as exc:
        raise ProblemError(f"bad lattice: {exc}") from exc


def group_from_json(obj) -> GroupData:
    if "name" in obj:
        name = obj["name"]
        if name not in NAMED_GROUPS:
            raise ProblemError(f"unknown group name {name!r}; known: {sorted(NAMED_GROUPS)}")
        return NAMED_GROUPS[name]()
    if "mult_table" in obj:
        try:
            return GroupData(obj["mult_table"])
        except Exception as exc:
            raise ProblemError(f"bad multiplication table: {exc}") from exc
    if "generators" in obj:
        degree = obj.get("degree")
        if degree is None:
            raise ProblemError("permutation generators need a 'degree'")
        gens = [tuple(g) for g in obj["generators"]]
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise ProblemError(f"not a permutation of 0..{degree-1}: {g}")
        return GroupData.from_permutations(gens, degree)
    raise ProblemError("group needs 'name', 'mult_table' or 'generators'")


class Problem:
    """Parsed problem file: order, module, task and optional lattices."""

    def __init__(self, task, group, algebra, lam, module, X, Y, p, raw):
        self.task = task
        self.group = group
        self.algebra = algebra
        self.lam = lam
        self.module = module
        self.X = X
        self.Y = Y
        self.p = p
        self.raw = raw


def parse_problem(obj) -> Problem:
    if not isinstance(obj, dict):
        raise ProblemError("problem file must be a JSON object")
    if obj.get("schema") != SCHEMA_VERSION:
        raise ProblemError(f"schema field must be {SCHEMA_VERSION}")
    task = obj.get("task")
    if task not in TASKS:
        raise ProblemError(f"task must be one of {TASKS}")
    group = group_from_json(obj.get("group", {}))
    if "algebra" in obj:
        a = obj["algebra"]
        table = [
            [[parse_rat(x) for x in cell] for cell in row] for row in a["structure_constants"]
        ]
        one = [parse_rat(x) for x in a["one"]]
        algebra = SCAlgebra(table, one)
    else:
        algebra = group_algebra(group)
    lam = OrderZ(algebra, PseudoLattice.standard(algebra.dim), check=False)
    module = ModuleSpace.regular(lam)
    n = algebra.dim

    def get_lat(key):
        if key not in obj:
            return None
        lat = lattice_from_json(obj[key], n)
        if lat.rank != n:
            raise ProblemError(f"lattice {key} is not full in the group algebra")
        lm = LatticeMod(module=module, lattice=lat)
        if not lm.verify_stable():
            raise ProblemError(f"lattice {key} is not stable under the group ring")
        return lm

    X = get_lat("X")
    Y = get_lat("Y")
    p = obj.get("p")
    if task in ("isom", "local-isom", "hom") and (X is None or Y is None):
        raise ProblemError(f"task {task} needs lattices X and Y")
    return Problem(task, group, algebra, lam, module, X, Y, p, obj)


def load_problem(path) -> Problem:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"invalid JSON: {exc}") from exc
    return parse_problem(obj)


def problem_to_json(task: str, group_name_or_table, X: PseudoLattice | None = None,
                    Y: PseudoLattice | None = None, p: int | None = None) -> dict:
    out = {"schema": SCHEMA_VERSION, "task": task}
    if isinstance(group_name_or_table, str):
        out["group"] = {"name": group_name_or_table}
    else:
        out["group"] = {"mult_table": group_name_or_table}
    if X is not None:
        out["X"] = lattice_to_json(X)
    if Y is not None:
        out["Y"] = lattice_to_json(Y)
    if p is not None:
        out["p"] = p
    return out
