"""Command-line interface: ``fusionfact ring|group|cocycle|construct ...``.

Every command prints one JSON document on stdout.  Reports carry the
command path, a sha256 digest of the resolved inputs, verdicts, and numbers
as 12-significant-digit strings (exact integers stay integers).  The
``construct`` commands (and ``ring deligne``, ``cocycle cyclic``) print bare
ring/module/cochain files instead, so they can be piped back in.

Exit codes: 0 computed, 1 bad input or usage, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path
from typing import Any

from . import cohomology as coh
from .constructions import coset_module, gt_simples, pointed_classify, rep_ring, vec_ring
from .corpus import builtin_ring
from .errors import AxiomViolation, FusionError, InputError, InvariantFailure, NumericalError
from .factorization import (
    MAX_RANK,
    check_dim_identity,
    deligne_product,
    deligne_shadow_check,
    enumerate_exact_factorizations,
    enumerate_subrings,
    fpdim_of,
    is_exact_factorization,
    subring_generated,
)
from .fusion import FusionRing, fp_data, ring_violations, validate_module, validate_ring
from .groups import (
    MAX_ORDER,
    SUBGROUP_ORDER_LIMIT,
    FiniteGroup,
    Subgroup,
    builtin_group,
    conjugacy_classes,
    double_cosets,
    enumerate_subgroups,
    exact_factorizations,
    factorization_counts,
    generated_subgroup,
    group_from_dict,
)

DEFAULT_CLI_TOLERANCE = 1e-9


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def num(x: float) -> str:
    return f"{x:.12g}"


# -- input resolution ----------------------------------------------------------

def _read_json(source: str, stdin=None) -> Any:
    try:
        if source == "-":
            text = (stdin or sys.stdin).read()
        else:
            text = Path(source).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def ring_raw(source: str | None, stdin=None) -> Any:
    if source is None:
        raise UsageError("--ring is required")
    if source.startswith("builtin:"):
        return builtin_ring(source[len("builtin:"):])
    raw = _read_json(source, stdin)
    if isinstance(raw, dict) and "tensor" not in raw and isinstance(raw.get("ring"), dict):
        raw = raw["ring"]  # a validate report or a module file
    return raw


def load_ring(source: str | None, stdin=None) -> FusionRing:
    raw = ring_raw(source, stdin)
    return raw if isinstance(raw, FusionRing) else validate_ring(raw)


def load_group(source: str | None, max_order: int = MAX_ORDER, stdin=None) -> FiniteGroup:
    if source is None:
        raise UsageError("--group is required")
    if isinstance(source, dict):
        return group_from_dict(source, max_order)
    if source.startswith("builtin:"):
        return builtin_group(source[len("builtin:"):])
    if source == "-" or Path(source).exists():
        raw = _read_json(source, stdin)
        if not isinstance(raw, dict):
            raise InputError("group file must be a JSON object")
        return group_from_dict(raw, max_order)
    return builtin_group(source)


_TOP_COMMA = re.compile(r",(?![^()]*\))")


def _tokens(text: str) -> list[str]:
    return [t.strip() for t in _TOP_COMMA.split(text) if t.strip()]


def _index(token: str, labels, what: str) -> int:
    if re.fullmatch(r"\d+", token):
        i = int(token)
        if i >= len(labels):
            raise InputError(f"{what}: index {i} out of range")
        return i
    try:
        return list(labels).index(token)
    except ValueError:
        raise InputError(f"{what}: unknown element {token!r}") from None


def parse_subgroup(G: FiniteGroup, text: str, what: str) -> Subgroup:
    """Comma-separated element indices or labels, taken as generators."""
    return generated_subgroup(G, [_index(t, G.labels, what) for t in _tokens(text)])


def parse_subring(R: FusionRing, text: str, what: str):
    return subring_generated(R, [_index(t, R.labels, what) for t in _tokens(text)])


def load_cochain(source: str, G: FiniteGroup | None, degree: int = 3, stdin=None,
                 max_order: int = MAX_ORDER) -> coh.Cochain:
    """``zero`` (needs ``G``), ``cyclic3:n:q``, or a cochain file."""
    if source == "zero":
        if G is None:
            raise UsageError("a zero cochain needs --group")
        return coh.zero_cochain(G, degree)
    m = re.fullmatch(r"cyclic3:(\d+):(\d+)", source)
    if m:
        return coh.cyclic_3cocycle(int(m.group(1)), int(m.group(2)), G)
    raw = _read_json(source, stdin)
    return cochain_from_raw(raw, G, max_order)


def cochain_from_raw(raw: Any, G: FiniteGroup | None, max_order: int = MAX_ORDER) -> coh.Cochain:
    if not isinstance(raw, dict):
        raise InputError("cochain file must be a JSON object")
    if "formula" in raw:
        f = raw["formula"]
        if f.get("type") != "cyclic3":
            raise InputError(f"unknown cochain formula {f.get('type')!r}")
        return coh.cyclic_3cocycle(int(f["n"]), int(f["q"]), G)
    if "group" in raw:
        H = load_group(raw["group"], max_order)
        if G is not None and H != G:
            raise InputError("cochain group differs from --group")
        G = H
    if G is None:
        raise UsageError("cochain file has no group; pass --group")
    if "degree" not in raw or "values" not in raw:
        raise InputError("cochain file needs 'degree' and 'values'")
    return coh.cochain_from_values(G, int(raw["degree"]), raw["values"])


def _digest(*parts: Any) -> str:
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _group_key(G: FiniteGroup) -> Any:
    return G.to_dict()


def _cochain_key(f: coh.Cochain) -> Any:
    return {"group": _group_key(f.group), **f.to_dict()}


# -- report pieces --------------------------------------------------------------

def _support(R: FusionRing, support) -> dict[str, Any]:
    return {"support": list(support), "labels": [R.labels[i] for i in support]}


def _subgroup(G: FiniteGroup, H: Subgroup) -> dict[str, Any]:
    return {"elements": list(H.elements), "labels": [G.labels[i] for i in H.elements],
            "order": H.order}


def _fp_report(R: FusionRing, tol: float) -> dict[str, Any]:
    fp = fp_data(R, tol)
    out = {"dims": [num(d) for d in fp.dims], "ring_dim": num(fp.ring_dim),
           "tolerance": num(fp.tolerance_used)}
    if fp.integral_dims is not None:
        out["integral_dims"] = list(fp.integral_dims)
        out["exact_ring_dim"] = fp.exact_ring_dim
    return out


def _factorization_report(R: FusionRing, A, C, tol: float) -> dict[str, Any]:
    rep = is_exact_factorization(R, A, C, tol)
    ident = check_dim_identity(R, A, C, tol)
    return {
        "A": _support(R, A.support),
        "C": _support(R, C.support),
        "D": _support(R, rep.D.support),
        "AC_support": list(rep.AC_support),
        "fpdims": {k: num(v) for k, v in rep.fpdims.items()},
        "dim_identity": {
            "relative_residual": num(ident.relative_residual),
            "regular_residual": num(ident.regular_residual),
            "bound": num(ident.bound),
            "exact_arithmetic": ident.exact,
        },
        "is_factorization": rep.is_factorization,
        "is_exact_dim": rep.is_exact_dim,
        "is_exact_unique": rep.is_exact_unique,
        "exact": rep.exact,
        "bijection": [list(t) for t in rep.bijection] if rep.bijection else None,
        "counterexample": rep.counterexample,
    }


def _violation(v: AxiomViolation) -> dict[str, Any]:
    return {"axiom": type(v).__name__, "message": str(v),
            "witness": [int(x) for x in v.witness] if v.witness is not None else None}


# -- commands ---------------------------------------------------------------------

def cmd_ring(args, out) -> int:
    tol = args.tolerance
    act = args.action
    if act == "deligne":
        R1, R2 = load_ring(args.r1, args.stdin), load_ring(args.r2, args.stdin)
        out.emit(deligne_product(R1, R2).to_dict())
        return 0
    if act == "module-validate":
        raw = _read_json(args.module, args.stdin)
        ring_spec = raw.get("ring") if isinstance(raw, dict) else None
        if isinstance(ring_spec, dict):
            R = validate_ring(ring_spec)
        elif isinstance(ring_spec, str):
            R = load_ring(ring_spec if ring_spec.startswith("builtin:") else
                          str(Path(args.module).parent / ring_spec))
        else:
            R = load_ring(args.ring, args.stdin)
        M = validate_module(R, raw, tol)
        out.report(act, [R.to_dict(), M.to_dict()], {
            "module": M.to_dict(), "mdims": [num(x) for x in M.mdims], "mrank": M.mrank,
            "indecomposable": True,
            "sum_mdims_squared": num(sum(x * x for x in M.mdims)),
        })
        return 0
    if act == "validate":
        raw = ring_raw(args.ring, args.stdin)
        if not isinstance(raw, FusionRing):
            violations = ring_violations(raw) if isinstance(raw, dict) else []
            if violations:
                out.report(act, [raw], {"valid": False,
                                        "violations": [_violation(v) for v in violations]})
                raise violations[0]
        R = validate_ring(raw)
        out.report(act, [R.to_dict()], {"valid": True, "rank": R.rank, "ring": R.to_dict(),
                                        "commutative": R.is_commutative()})
        return 0

    R = load_ring(args.ring, args.stdin)
    key = [R.to_dict()]
    if act == "fpdim":
        out.report(act, key, {"rank": R.rank, "labels": list(R.labels),
                              "fp": _fp_report(R, tol)})
    elif act == "subrings":
        fp = fp_data(R, tol)
        subs = enumerate_subrings(R, args.max_rank)
        out.report(act, key, {"count": len(subs), "subrings": [
            {**_support(R, S.support), "fpdim": num(fpdim_of(S.support, fp))} for S in subs]})
    elif act == "factorize":
        A, C = parse_subring(R, args.A, "A"), parse_subring(R, args.C, "C")
        out.report(act, key + [A.support, C.support], _factorization_report(R, A, C, tol))
    elif act == "exact-factorizations":
        pairs = enumerate_exact_factorizations(R, args.max_rank, tol)
        unordered = {frozenset([A.support, C.support]) for A, C in pairs}
        out.report(act, key, {
            "count": len(pairs),
            "unordered_count": len(unordered),
            "pairs": [{"A": _support(R, A.support), "C": _support(R, C.support),
                       "fpdim_A": num(fpdim_of(A.support, fp_data(R, tol))),
                       "fpdim_C": num(fpdim_of(C.support, fp_data(R, tol)))}
                      for A, C in pairs],
        })
    elif act == "deligne-shadow":
        A, C = parse_subring(R, args.A, "A"), parse_subring(R, args.C, "C")
        verdict = deligne_shadow_check(R, A, C, tol)
        out.report(act, key + [A.support, C.support], {
            "A": _support(R, A.support), "C": _support(R, C.support),
            "deligne_type_at_ring_level": verdict})
    return 0


def cmd_group(args, out) -> int:
    G = load_group(args.group, stdin=args.stdin)
    key = [_group_key(G)]
    act = args.action
    if act == "subgroups":
        subs = enumerate_subgroups(G, args.max_order)
        out.report(act, key, {"order": G.order, "count": len(subs),
                              "subgroups": [_subgroup(G, H) for H in subs]})
    elif act == "exact-factorizations":
        facs = exact_factorizations(G, args.up_to_conjugacy, args.max_order)
        out.report(act, key + [args.up_to_conjugacy], {
            "order": G.order,
            "counts": factorization_counts(G, args.max_order),
            "up_to_conjugacy": args.up_to_conjugacy,
            "factorizations": [{
                "G1": _subgroup(G, f.G1), "G2": _subgroup(G, f.G2),
                "expression": [[g, *f.expression_table[g]] for g in sorted(f.expression_table)],
            } for f in facs],
        })
    elif act == "classes":
        classes, _ = conjugacy_classes(G)
        out.report(act, key, {"count": len(classes), "classes": [
            {"elements": list(c), "labels": [G.labels[i] for i in c], "size": len(c)}
            for c in classes]})
    elif act == "double-cosets":
        L1, L2 = parse_subgroup(G, args.L1, "L1"), parse_subgroup(G, args.L2, "L2")
        dcs = double_cosets(G, L1, L2)
        out.report(act, key + [L1.elements, L2.elements], {
            "L1": _subgroup(G, L1), "L2": _subgroup(G, L2), "count": len(dcs),
            "double_cosets": [{"representative": g, "elements": list(els), "size": len(els)}
                              for g, els in dcs]})
    return 0


def cmd_cocycle(args, out) -> int:
    act = args.action
    if act == "cyclic":
        f = coh.cyclic_3cocycle(args.n, args.q)
        out.emit({"group": f"C{args.n}", **f.to_dict()})
        return 0
    G = load_group(args.group, stdin=args.stdin) if args.group else None
    if act == "brute-classes":
        if G is None:
            raise UsageError("--group is required")
        out.report(act, [_group_key(G), args.k, args.m], {
            "degree": args.k, "modulus": args.m, "classes": coh.brute_classes(G, args.k, args.m)})
        return 0
    if args.cochain is None:
        raise UsageError("--cochain is required")
    f = load_cochain(args.cochain, G, args.degree, args.stdin)
    key = [_cochain_key(f)]
    if act == "check":
        df = coh.coboundary(f)
        nz = df.nonzero()
        out.report(act, key, {"degree": f.degree, "is_cocycle": not nz,
                              "witness": [*nz[0][0], str(nz[0][1])] if nz else None})
    elif act == "restrict":
        L = parse_subgroup(f.group, args.L, "L")
        r = coh.restrict(f, L)
        out.report(act, key + [L.elements], {"subgroup": _subgroup(f.group, L),
                                             "restriction": r.to_dict()})
    elif act == "trivialize":
        t = coh.trivialize(f)
        out.report(act, key, {"trivial": bool(t), "modulus": t.modulus,
                              "psi": t.psi.to_dict() if t.psi is not None else None,
                              "certificate": t.certificate})
    return 0


def cmd_construct(args, out) -> int:
    act = args.action
    G = load_group(args.group or getattr(args, "group_pos", None), stdin=args.stdin)
    if act == "vec-ring":
        out.emit(vec_ring(G).to_dict())
    elif act == "rep-ring":
        out.emit(rep_ring(G, args.seed).to_dict())
    elif act == "coset-module":
        M = coset_module(G, parse_subgroup(G, args.L, "L"))
        out.emit({**M.to_dict(), "mdims": [num(x) for x in M.mdims]})
    elif act == "gt-simples":
        L = parse_subgroup(G, args.L, "L")
        simples = gt_simples(G, L, args.seed)
        out.report(act, [_group_key(G), L.elements, args.seed], {
            "L": _subgroup(G, L), "count": len(simples),
            "sum_fpdim_squared": sum(s.fpdim ** 2 for s in simples),
            "simples": [{"coset_rep": s.coset_rep, "stabilizer": list(s.stabilizer),
                         "stab_irrep": s.stab_irrep, "stab_irrep_dim": s.stab_irrep_dim,
                         "fpdim": s.fpdim} for s in simples]})
    elif act == "pointed-classify":
        if args.g1 is None or args.g2 is None:
            raise UsageError("--g1 and --g2 are required")
        omega = load_cochain(args.omega, G, 3, args.stdin)
        G1, G2 = parse_subgroup(G, args.g1, "--g1"), parse_subgroup(G, args.g2, "--g2")
        omega2 = None
        if args.omega2 is not None:
            omega2 = load_cochain(args.omega2, G2.as_group(), 3, args.stdin)
        cert = pointed_classify(G, omega, G1, G2, omega2)
        out.report(act, [_cochain_key(omega), G1.elements, G2.elements,
                         _cochain_key(omega2) if omega2 is not None else None], {
            "group_order": cert.group_order,
            "G1": _subgroup(G, G1), "G2": _subgroup(G, G2),
            "checks": cert.checks,
            "failed_checks": cert.failed,
            "psi1": cert.psi1.to_dict() if cert.psi1 is not None else None,
            "psi2": cert.psi2.to_dict() if cert.psi2 is not None else None,
            "positive": cert.positive,
            "conclusion": cert.conclusion,
        })
    return 0


# -- parser and driver -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--ring", help="ring file, builtin:NAME, or - for stdin")
    common.add_argument("--group", help="group file or builtin name (C6, S3, S4, D4, Q8)")
    common.add_argument("--tolerance", type=float, default=DEFAULT_CLI_TOLERANCE)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    common.set_defaults(pretty=False)
    common.add_argument("--max-rank", type=int, default=MAX_RANK)
    common.add_argument("--max-order", type=int, default=SUBGROUP_ORDER_LIMIT)
    common.add_argument("--seed", type=int, default=0, help="character method seed")

    p = _Parser(prog="fusionfact", description="Fusion rings and their exact factorizations.")
    top = p.add_subparsers(dest="area", required=True, parser_class=_Parser)

    ring = top.add_parser("ring").add_subparsers(dest="action", required=True,
                                                 parser_class=_Parser)
    for name in ("validate", "fpdim", "subrings", "exact-factorizations"):
        ring.add_parser(name, parents=[common])
    for name in ("factorize", "deligne-shadow"):
        sp = ring.add_parser(name, parents=[common])
        sp.add_argument("A", help="generators of A (indices or labels, comma-separated)")
        sp.add_argument("C", help="generators of C")
    sp = ring.add_parser("deligne", parents=[common])
    sp.add_argument("r1")
    sp.add_argument("r2")
    sp = ring.add_parser("module-validate", parents=[common])
    sp.add_argument("--module", required=True)

    group = top.add_parser("group").add_subparsers(dest="action", required=True,
                                                   parser_class=_Parser)
    group.add_parser("subgroups", parents=[common])
    group.add_parser("classes", parents=[common])
    sp = group.add_parser("exact-factorizations", parents=[common])
    sp.add_argument("--up-to-conjugacy", action="store_true")
    sp = group.add_parser("double-cosets", parents=[common])
    sp.add_argument("L1")
    sp.add_argument("L2")

    cochain = _Parser(add_help=False)
    cochain.add_argument("--cochain", help="cochain file, cyclic3:n:q, or zero")
    cochain.add_argument("--degree", type=int, default=3, help="degree for --cochain zero")
    cocycle = top.add_parser("cocycle").add_subparsers(dest="action", required=True,
                                                       parser_class=_Parser)
    cocycle.add_parser("check", parents=[common, cochain])
    cocycle.add_parser("trivialize", parents=[common, cochain])
    sp = cocycle.add_parser("restrict", parents=[common, cochain])
    sp.add_argument("L")
    sp = cocycle.add_parser("cyclic", parents=[common])
    sp.add_argument("n", type=int)
    sp.add_argument("q", type=int)
    sp = cocycle.add_parser("brute-classes", parents=[common])
    sp.add_argument("k", type=int)
    sp.add_argument("m", type=int)

    construct = top.add_parser("construct").add_subparsers(dest="action", required=True,
                                                           parser_class=_Parser)
    for name in ("vec-ring", "rep-ring"):
        sp = construct.add_parser(name, parents=[common])
        sp.add_argument("group_pos", nargs="?", metavar="GROUP")
    for name in ("coset-module", "gt-simples"):
        sp = construct.add_parser(name, parents=[common])
        sp.add_argument("L")
    sp = construct.add_parser("pointed-classify", parents=[common])
    sp.add_argument("--omega", default="zero")
    sp.add_argument("--g1")
    sp.add_argument("--g2")
    sp.add_argument("--omega2")
    return p


class _Output:
    def __init__(self, stream, pretty: bool, command: list[str], options: dict):
        self.stream = stream
        self.pretty = pretty
        self.command = command
        self.options = options

    def emit(self, obj: Any) -> None:
        if self.pretty:
            text = json.dumps(obj, sort_keys=True, indent=2)
        else:
            text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
        self.stream.write(text + "\n")

    def report(self, action: str, inputs: list, payload: dict) -> None:
        self.emit({"command": self.command, "options": self.options,
                   "inputs_digest": _digest(inputs, self.options), **payload})


def run(argv: list[str] | None = None, stdout=None, stderr=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    args.stdin = stdin
    command = [args.area, args.action]
    options = {"tolerance": num(args.tolerance), "max_rank": args.max_rank,
               "max_order": args.max_order, "seed": args.seed}
    out = _Output(stdout, args.pretty, command, options)
    handler = {"ring": cmd_ring, "group": cmd_group, "cocycle": cmd_cocycle,
               "construct": cmd_construct}[args.area]
    try:
        return handler(args, out)
    except InputError as exc:
        stderr.write(f"input error: {type(exc).__name__}: {exc}\n")
        return 1
    except (InvariantFailure, NumericalError, AssertionError) as exc:
        stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 2
    except FusionError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
