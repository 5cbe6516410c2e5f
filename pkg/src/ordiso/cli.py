"""Batch command-line front end.

Exit codes: 0 isomorphic / task succeeded, 1 not isomorphic, 2 inconclusive
or probabilistic refusal, 3 input error, 4 unsupported component, 5 resource
bound hit.  Output is a JSON document on stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import QuotientTooLarge, UnsupportedComponent
from .genus import genus_enumerate
from .homspaces import hom_Lambda
from .localiso import (
    local_iso_global_hom,
    local_iso_monte_carlo,
    local_iso_reduced,
    local_iso_via_freeness,
)
from .mainiso import DEFAULT_MAX_QUOTIENT, is_isomorphic
from .orders import maximal_order
from .selfcheck import run_selfcheck
from .serialize import (
    SCHEMA_VERSION,
    ProblemError,
    format_rat,
    lattice_to_json,
    load_problem,
    matrix_to_json,
)

EXIT_ISO = 0
EXIT_NOT_ISO = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3
EXIT_UNSUPPORTED = 4
EXIT_RESOURCE = 5


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if getattr(args, "transcript", None):
        with open(args.transcript, "w") as fh:
            fh.write(json.dumps(doc.get("transcript", {}), indent=2, sort_keys=True))


def _task_isom(problem, args) -> int:
    v = is_isomorphic(
        problem.lam,
        problem.X,
        problem.Y,
        seed=args.seed,
        ideal_mode=args.ideal,
        max_quotient=args.max_quotient,
        jobs=args.jobs,
    )
    doc = {
        "schema": SCHEMA_VERSION,
        "task": "isom",
        "verdict": v.outcome,
        "reason": list(v.reason),
        "transcript": v.transcript,
    }
    if v.certificate is not None:
        doc["certificate"] = {
            "map": matrix_to_json(v.certificate.map),
            "component_words": v.certificate.component_words,
        }
    _emit(doc, args)
    return {"isomorphic": EXIT_ISO, "not_isomorphic": EXIT_NOT_ISO}.get(v.outcome, EXIT_INCONCLUSIVE)


def _task_local(problem, args) -> int:
    p = problem.p
    if p is None:
        raise ProblemError("local-isom needs a prime (file field 'p' or flag -p)")
    method = args.method
    if method == "reduced":
        v = local_iso_reduced(problem.X, problem.Y, p)
    elif method == "homglobal":
        v = local_iso_global_hom(problem.X, problem.Y, p)
    elif method == "montecarlo":
        v = local_iso_monte_carlo(problem.X, problem.Y, p, Fraction(args.epsilon), seed=args.seed)
    else:
        v = local_iso_via_freeness(problem.X, problem.Y, p, seed=args.seed)
    doc = {
        "schema": SCHEMA_VERSION,
        "task": "local-isom",
        "p": p,
        "method": v.method,
        "verdict": v.outcome,
    }
    if v.map is not None:
        doc["map"] = matrix_to_json(v.map)
    if v.confidence is not None:
        doc["confidence"] = format_rat(v.confidence)
    _emit(doc, args)
    if v.outcome in ("iso", "iso_no_map"):
        return EXIT_ISO
    if v.outcome == "not_iso":
        return EXIT_NOT_ISO
    return EXIT_INCONCLUSIVE


def _task_hom(problem, args) -> int:
    hl = hom_Lambda(problem.X, problem.Y)
    doc = {
        "schema": SCHEMA_VERSION,
        "task": "hom",
        "rank": hl.rank,
        "coeff_ideals": [format_rat(i.gen) for i in hl.coeff_ideals],
        "basis": [matrix_to_json(b) for b in hl.basis],
    }
    _emit(doc, args)
    return EXIT_ISO


def _task_maxorder(problem, args) -> int:
    m, bad = maximal_order(problem.lam, seed=args.seed)
    doc = {
        "schema": SCHEMA_VERSION,
        "task": "maxorder",
        "maximal_order": lattice_to_json(m.lattice),
        "bad_primes": list(bad.primes),
    }
    _emit(doc, args)
    return EXIT_ISO


def _task_wedderburn(problem, args) -> int:
    from .mainiso import GLOBAL_CACHE

    wd = GLOBAL_CACHE.wedderburn(problem.algebra, args.seed)
    comps = []
    for c in wd.components:
        comps.append(
            {
                "dim": c.algebra.dim,
                "kind": c.kind.describe(),
                "cancellation": c.kind.cancellation,
                "idempotent": [format_rat(x) for x in c.idempotent],
            }
        )
    doc = {"schema": SCHEMA_VERSION, "task": "wedderburn", "components": comps}
    _emit(doc, args)
    return EXIT_ISO


def _task_genus(problem, args) -> int:
    if problem.p is None:
        raise ProblemError("genus needs a prime (file field 'p' or flag -p)")
    rep = genus_enumerate(
        problem.lam,
        problem.p,
        seed=args.seed,
        eps=Fraction(args.epsilon),
        use_mc=not args.no_mc_prefilter,
        jobs=args.jobs,
    )
    doc = {
        "schema": SCHEMA_VERSION,
        "task": "genus",
        "p": problem.p,
        "class_count": len(rep.classes),
        "isomorphism_tests": rep.tests,
        "candidates": rep.candidates,
        "classes": [lattice_to_json(c.latmod.lattice.canonical()) for c in rep.classes],
    }
    _emit(doc, args)
    print(f"{len(rep.classes)} classes", file=sys.stderr)
    return EXIT_ISO


TASK_RUNNERS = {
    "isom": _task_isom,
    "local-isom": _task_local,
    "hom": _task_hom,
    "maxorder": _task_maxorder,
    "wedderburn": _task_wedderburn,
    "genus": _task_genus,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ordiso",
        description="Isomorphism testing for lattices over group-ring orders.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_p=False):
        sp.add_argument("file", help="JSON problem file")
        if needs_p:
            sp.add_argument("-p", type=int, default=None, help="prime (overrides the file)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--epsilon", default="1/1048576", help="Monte-Carlo error bound")
        sp.add_argument("--method", choices=["reduced", "homglobal", "montecarlo", "freeness"], default="freeness")
        sp.add_argument("--ideal", choices=["cs", "crcl", "both"], default="cs")
        sp.add_argument("--max-quotient", type=int, default=DEFAULT_MAX_QUOTIENT)
        sp.add_argument("--no-mc-prefilter", action="store_true")
        sp.add_argument("--transcript", default=None, help="write the transcript to this path")

    for name in ("isom", "hom", "maxorder", "wedderburn"):
        common(sub.add_parser(name))
    common(sub.add_parser("local-isom"), needs_p=True)
    common(sub.add_parser("genus"), needs_p=True)
    sc = sub.add_parser("selfcheck")
    sc.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selfcheck":
        report = run_selfcheck(seed=args.seed)
        print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_ISO if report["pass"] else 1
    try:
        problem = load_problem(args.file)
    except (ProblemError, OSError) as exc:
        print(json.dumps({"error": str(exc), "code": "input"}), file=sys.stderr)
        return EXIT_INPUT
    if getattr(args, "p", None) is not None:
        problem.p = args.p
    # group-only inspection commands run on any problem file
    if problem.task != args.command and args.command not in ("wedderburn", "maxorder"):
        print(
            json.dumps({"error": f"file task {problem.task!r} does not match command", "code": "input"}),
            file=sys.stderr,
        )
        return EXIT_INPUT
    try:
        return TASK_RUNNERS[args.command](problem, args)
    except UnsupportedComponent as exc:
        print(json.dumps({"error": str(exc), "code": "unsupported"}), file=sys.stderr)
        return EXIT_UNSUPPORTED
    except QuotientTooLarge as exc:
        print(json.dumps({"error": str(exc), "code": "resource"}), file=sys.stderr)
        return EXIT_RESOURCE
    except ProblemError as exc:
        print(json.dumps({"error": str(exc), "code": "input"}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
