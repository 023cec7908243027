"""Command-line front end.

Exit codes: 0 success, 1 input or usage error, 2 failed axiom or
precondition, 3 an algorithm assumption was violated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor

from .axioms import validate
from .errors import (AlgorithmAssumptionViolated, ParseError, PreconditionError,
                     PresentationError)
from .fixtures import fixture_path
from .intmatrix import IntMatrix
from .invariants import (bf_group, entropy, is_mixing, matrices_permutation_equivalent,
                         snf_diagonal, total_column_amalgamation)
from .orbits import enumerate_orbits, parse_orbit_spec
from .presentation import abelianization, load_presentation, serialize
from .rebase import rebase
from .shift_equivalence import (composite_failures, lift_block_map, parse_map_file,
                                verify_shift_equivalence)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_ASSUMPTION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def _fmt(x: float | None) -> str:
    return "none" if x is None else f"{x:.10f}"


def _emit(args, text_lines: list[str], data: dict):
    if args.format == "structured":
        print(json.dumps(data, indent=2, default=str))
    else:
        print("\n".join(text_lines))


def _resolve(path):
    """Fall back to a bundled fixture when ``path`` is not a file."""
    if not os.path.exists(path):
        candidate = fixture_path(path)
        if os.path.exists(candidate):
            return candidate
    return path


def _load(path):
    try:
        return load_presentation(_resolve(path))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _matrix(args) -> IntMatrix:
    if args.matrix is not None:
        return IntMatrix.from_literal(args.matrix)
    if args.file is None:
        raise UsageError("give a presentation file or --matrix")
    return abelianization(_load(args.file))


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    P = _load(args.file)
    rep = validate(P)
    d = rep.to_dict()
    lines = [f"presentation {P.name}", f"classification: {d['classification']}"]
    lines += [f"axiom {k}: {v}" for k, v in d["axioms"].items()]
    lines.append(f"mixing: {str(rep.primitive).lower()}")
    lines.append(f"flattening_exponent: {d['flattening_exponent'] if d['flattening_exponent'] is not None else 'none'}")
    lines.append(f"lambda: {_fmt(rep.lam)}")
    if rep.lengths:
        lines.append("lengths: " + " ".join(f"{e}={_fmt(v)}" for e, v in rep.lengths.items()))
    for k, v in d["witnesses"].items():
        if isinstance(v, list):
            v = " ".join(v)
        lines.append(f"witness {k}: {v}")
    lines += [f"note: {n}" for n in d["notes"]]
    _emit(args, lines, d)
    return EXIT_OK if rep.is_solenoid else EXIT_PRECONDITION


def cmd_orbits(args) -> int:
    P = _load(args.file)
    orbits = enumerate_orbits(P, args.period)
    _emit(args, [o.name for o in orbits],
          {"period": args.period, "orbits": [o.name for o in orbits]})
    return EXIT_OK


def _rebase(P, spec, args):
    orbits = parse_orbit_spec(P, spec)
    return rebase(P, orbits, force=args.force, closure_budget=args.closure_budget,
                  seed_budget=args.seed_budget)


def cmd_rebase(args) -> int:
    P = _load(args.file)
    res = _rebase(P, args.orbit, args)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(serialize(res.output))
        with open(args.output + ".rho", "w", encoding="utf-8") as fh:
            fh.write(res.rho_text())
        with open(args.output + ".refined", "w", encoding="utf-8") as fh:
            fh.write(serialize(res.refined.presentation))
    d = res.report()
    lines = serialize(res.output).rstrip("\n").split("\n")
    lines += res.rho_text().rstrip("\n").split("\n")
    lines.append("matrix: " + abelianization(res.output).literal())
    for k in ("closure_size", "path_classes", "candidate_families", "primitive",
              "lambda_in", "lambda_out", "lambda_drift", "output_classification", "conjugacy"):
        v = d[k]
        if k == "lambda_drift":
            v = f"{v:.3e}"
        elif isinstance(v, float):
            v = _fmt(v)
        lines.append(f"{k}: {v}")
    lines += [f"warning: {w}" for w in d["warnings"]]
    d["presentation"] = serialize(res.output)
    _emit(args, lines, d)
    return EXIT_OK


def _invariant_record(M: IntMatrix) -> dict:
    rec = {"matrix": M.literal(), "snf": snf_diagonal(IntMatrix.identity(M.nrows) - M),
           "bf": str(bf_group(M)), "mixing": is_mixing(M)}
    if M.is_nonnegative():
        rec["amalgamation"] = total_column_amalgamation(M).literal()
    try:
        rec["entropy"] = entropy(M)
    except PreconditionError:
        rec["entropy"] = None
    return rec


def cmd_cover(args) -> int:
    if args.matrix is not None:
        M = IntMatrix.from_literal(args.matrix)
        labels = None
    else:
        P = _load(args.file)
        if args.orbit:
            P = _rebase(P, args.orbit, args).output
        M = abelianization(P)
        labels = P.edge_names
    rec = _invariant_record(M)
    lines = []
    if labels:
        lines.append("edges: " + " ".join(labels))
    lines += [f"matrix: {rec['matrix']}", "snf(I-A): " + " ".join(map(str, rec["snf"])),
              f"bf: {rec['bf']}", f"amalgamation: {rec.get('amalgamation', 'n/a')}",
              f"entropy: {_fmt(rec['entropy'])}", f"mixing: {str(rec['mixing']).lower()}",
              "note: Bowen-Franks groups are reported, flow equivalence is not decided"]
    _emit(args, lines, rec)
    return EXIT_OK


def cmd_bf(args) -> int:
    M = _matrix(args)
    if not M.is_square:
        raise UsageError("Bowen-Franks group needs a square matrix")
    g = bf_group(M)
    _emit(args, [str(g)], {"matrix": M.literal(), "bf": str(g), "torsion": list(g.torsion),
                           "free_rank": g.free_rank,
                           "snf": snf_diagonal(IntMatrix.identity(M.nrows) - M)})
    return EXIT_OK


def cmd_amalgamate(args) -> int:
    M = _matrix(args)
    if not M.is_square or not M.is_nonnegative():
        raise UsageError("amalgamation needs a square nonnegative matrix")
    T = total_column_amalgamation(M)
    _emit(args, [T.literal()], {"matrix": M.literal(), "amalgamation": T.literal(),
                                "states": list(T.row_labels)})
    return EXIT_OK


def cmd_entropy(args) -> int:
    M = _matrix(args)
    h = entropy(M)
    _emit(args, [_fmt(h)], {"matrix": M.literal(), "entropy": h})
    return EXIT_OK


def _side(path, period, spec, args):
    P = _load(path)
    orbits = parse_orbit_spec(P, spec) if spec else enumerate_orbits(P, period)

    def one(o):
        res = rebase(P, [o], force=args.force, closure_budget=args.closure_budget,
                     seed_budget=args.seed_budget)
        rec = _invariant_record(abelianization(res.output))
        rec["orbit"] = o.name
        return rec

    if spec:
        return P, [one(o) for o in orbits]
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(one, orbits))
    return P, sorted(rows, key=lambda r: r["orbit"])


def _class_counts(left, right):
    """Group amalgamation matrices up to simultaneous permutation; counts per side."""
    reps: list[IntMatrix] = []
    counts = []
    for side, rows in ((0, left), (1, right)):
        for r in rows:
            M = IntMatrix.from_literal(r["amalgamation"])
            for k, R in enumerate(reps):
                if matrices_permutation_equivalent(M, R) is not None:
                    break
            else:
                reps.append(M)
                counts.append([0, 0])
                k = len(reps) - 1
            counts[k][side] += 1
            r["tca_class"] = k + 1
    return {reps[k].literal(): tuple(c) for k, c in enumerate(counts)}


def cmd_compare(args) -> int:
    P1, left = _side(args.file1, args.period, args.orbits_left, args)
    P2, right = _side(args.file2, args.period, args.orbits_right, args)
    if args.invariant == "bf":
        lm, rm = Counter(r["bf"] for r in left), Counter(r["bf"] for r in right)
        distinguished = lm != rm
        summary = {"left": dict(sorted(lm.items())), "right": dict(sorted(rm.items()))}
    else:
        classes = _class_counts(left, right)
        distinguished = any(a != b for a, b in classes.values())
        summary = {"classes": classes}
    verdict = "Distinguished" if distinguished else "NotDistinguishedByThisInvariant"
    reason = (f"multisets of {args.invariant} invariants over the chosen covers differ"
              if distinguished else f"multisets of {args.invariant} invariants agree")
    warnings = []
    if args.orbits_left or args.orbits_right:
        warnings.append("explicit orbit lists are compared as given; without a known orbit "
                        "correspondence a difference is not a conjugacy invariant")
    data = {"period": args.period, "invariant": args.invariant, "left": left, "right": right,
            "summary": summary, "verdict": verdict, "reason": reason, "warnings": warnings}
    key = "bf" if args.invariant == "bf" else "tca_class"
    lines = [f"period {args.period}, invariant {args.invariant}"]
    for name, P, rows in (("left", P1, left), ("right", P2, right)):
        lines.append(f"{name}: {P.name}")
        lines += [f"  {r['orbit']}  {r['matrix']}  {r[key]}" for r in rows]
    if args.invariant == "bf":
        for side in ("left", "right"):
            lines.append(f"{side} multiset: " + ", ".join(f"{g} x{n}" for g, n in summary[side].items()))
    else:
        lines += [f"class {i + 1} {m}: {a} vs {b}" for i, (m, (a, b)) in enumerate(summary["classes"].items())]
    lines.append(f"verdict: {verdict}")
    lines.append(f"reason: {reason}")
    lines += [f"warning: {w}" for w in warnings]
    _emit(args, lines, data)
    return EXIT_OK


def _pair(args):
    PX, PY = _load(args.file1), _load(args.file2)
    try:
        with open(_resolve(args.maps), "rb") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.maps}: {exc.strerror}") from None
    return PX, PY, parse_map_file(text, PX, PY)


def _se_lines(rep):
    lines = [f"identity {k}: {'pass' if v else 'fail'}" for k, v in rep.checks.items()]
    for f in rep.failures:
        lines.append(f"  {f['identity']} on {f['edge']}:")
        lines.append(f"    lhs: {f['lhs']}")
        lines.append(f"    rhs: {f['rhs']}")
    lines.append(f"verdict: {'pass' if rep.passed else 'fail'}")
    return lines


def cmd_se_verify(args) -> int:
    PX, PY, pair = _pair(args)
    rep = verify_shift_equivalence(PX, PY, pair)
    _emit(args, _se_lines(rep), rep.to_dict())
    return EXIT_OK if rep.passed else EXIT_PRECONDITION


def cmd_lift(args) -> int:
    PX, PY, pair = _pair(args)
    rep = verify_shift_equivalence(PX, PY, pair)
    if not rep.passed:
        _emit(args, _se_lines(rep), rep.to_dict())
        return EXIT_PRECONDITION
    lift = lift_block_map(PX, PY, pair)
    m = pair.lag
    bad_x = composite_failures(PX, PY, lift.phi, lift.psi, m)
    bad_y = composite_failures(PY, PX, lift.psi, lift.phi, m)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(lift.phi.to_text())
        with open(args.output + ".psi", "w", encoding="utf-8") as fh:
            fh.write(lift.psi.to_text())
    data = {"lag": m, "phi_blocks": len(lift.phi.table), "psi_blocks": len(lift.psi.table),
            "psi_phi_central": not bad_x, "phi_psi_central": not bad_y,
            "phi": lift.phi.to_text().splitlines(), "psi": lift.psi.to_text().splitlines()}
    lines = _se_lines(rep)
    lines.append(f"phi: {len(lift.phi.table)} blocks of length {m + 1}")
    lines += lift.phi.to_text().rstrip("\n").split("\n")
    lines.append(f"psi: {len(lift.psi.table)} blocks of length {m + 1}")
    lines += lift.psi.to_text().rstrip("\n").split("\n")
    lines.append(f"psi o phi = central projection: {'pass' if not bad_x else 'fail'}")
    lines.append(f"phi o psi = central projection: {'pass' if not bad_y else 'fail'}")
    _emit(args, lines, data)
    return EXIT_OK if not (bad_x or bad_y) else EXIT_ASSUMPTION


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    budgets = argparse.ArgumentParser(add_help=False)
    budgets.add_argument("--force", action="store_true",
                         help="rebase branched solenoids too (no conjugacy guarantee)")
    budgets.add_argument("--seed-budget", type=_positive, default=None,
                         help="maximum image depth explored by the path closure")
    budgets.add_argument("--closure-budget", type=_positive, default=100_000,
                         help="maximum number of path classes in the closure")

    p = _Parser(prog="solenoid", description="Symbolic tools for one-dimensional solenoids.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check the axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("orbits", parents=[common], help="list periodic orbits of one period")
    s.add_argument("file")
    s.add_argument("--period", type=_positive, required=True)
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("rebase", parents=[common, budgets], help="canonical presentation at orbits")
    s.add_argument("file")
    s.add_argument("--orbit", required=True, help='e.g. "a.1 a.2" or "@p"; separate orbits with ;')
    s.add_argument("-o", "--output", help="write OUT, OUT.rho and OUT.refined")
    s.set_defaults(func=cmd_rebase)

    s = sub.add_parser("cover", parents=[common, budgets], help="cover matrix and its invariants")
    s.add_argument("file", nargs="?")
    s.add_argument("--matrix")
    s.add_argument("--orbit", help="rebase at these orbits first")
    s.set_defaults(func=cmd_cover)

    for name, func, helptext in (("bf", cmd_bf, "Bowen-Franks group"),
                                 ("amalgamate", cmd_amalgamate, "total column amalgamation"),
                                 ("entropy", cmd_entropy, "topological entropy")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("file", nargs="?")
        s.add_argument("--matrix")
        s.set_defaults(func=func)

    s = sub.add_parser("compare", parents=[common, budgets],
                       help="compare invariants of the covers defined by periodic orbits")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--period", type=_positive, default=2)
    s.add_argument("--invariant", choices=("bf", "tca"), default="bf")
    s.add_argument("--orbits-left", help="use these orbits of the first presentation instead")
    s.add_argument("--orbits-right", help="use these orbits of the second presentation instead")
    s.set_defaults(func=cmd_compare)

    for name, func in (("se-verify", cmd_se_verify), ("lift", cmd_lift)):
        s = sub.add_parser(name, parents=[common], help="check a shift equivalence given by graph maps"
                           if name == "se-verify" else "lift a shift equivalence to the covers")
        s.add_argument("file1")
        s.add_argument("file2")
        s.add_argument("--maps", required=True)
        if name == "lift":
            s.add_argument("-o", "--output", help="write the phi table to OUT and psi to OUT.psi")
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PresentationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except AlgorithmAssumptionViolated as exc:
        print(f"algorithm assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION


if __name__ == "__main__":
    sys.exit(main())
