"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line and the
summary is repeated at the end of the pytest run."""

import io
import itertools
import math
import subprocess
import sys

import numpy as np

from conftest import ACCEPTANCE
from fusionfact import fusion
from fusionfact.cli import run
from fusionfact.cohomology import (
    Cochain,
    brute_classes,
    coboundary,
    cyclic_3cocycle,
    restrict,
    trivialize,
    zero_cochain,
)
from fusionfact.constructions import coset_module, gt_simples, pointed_classify, rep_ring, vec_ring
from fusionfact.corpus import CORPUS_GROUPS, CORPUS_RINGS, builtin_ring
from fusionfact.errors import InvariantFailure
from fusionfact.factorization import (
    check_dim_identity,
    enumerate_exact_factorizations,
    enumerate_subrings,
    is_exact_factorization,
)
from fusionfact.fusion import fp_data, validate_ring
from fusionfact.groups import builtin_group, cyclic, enumerate_subgroups, exact_factorizations, subgroup

MAX_RANK = 24  # vec(S4) has rank 24


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def corpus_pairs():
    for name in CORPUS_RINGS:
        R = builtin_ring(name)
        subs = enumerate_subrings(R, MAX_RANK)
        for A, C in itertools.product(subs, repeat=2):
            yield name, R, A, C


def test_criterion_01_dimension_identity():
    failures, pairs, worst = 0, 0, 0.0
    for _, R, A, C in corpus_pairs():
        pairs += 1
        d2 = np.array(fp_data(R).dims) ** 2
        D = sorted(set(A.support) & set(C.support))
        AC = sorted({k for x in A.support for y in C.support for k in np.flatnonzero(R.tensor[x, y])})
        a, c, dd, ac, b = (d2[list(s)].sum() for s in (A.support, C.support, D, AC, range(R.rank)))
        resid = abs(a * c - ac * dd) / b ** 2
        worst = max(worst, resid)
        rep = check_dim_identity(R, A, C)
        if resid > 1e-9 or rep.relative_residual > 1e-9:
            failures += 1
    record(1, failures == 0, f"{pairs} ordered subring pairs, {failures} failures, max residual {worst:.1e}")


def test_criterion_02_criteria_agree():
    disagreements, pairs, exact = 0, 0, 0
    for _, R, A, C in corpus_pairs():
        pairs += 1
        try:
            rep = is_exact_factorization(R, A, C)
        except InvariantFailure:
            disagreements += 1
            continue
        if rep.is_exact_dim != rep.is_exact_unique:
            disagreements += 1
        exact += rep.is_exact_dim
    record(2, disagreements == 0, f"{pairs} pairs, {exact} exact, {disagreements} disagreements")


def test_criterion_03_factorization_counts():
    S3 = builtin_group("S3")
    ring_pairs = {(A.support, C.support) for A, C in enumerate_exact_factorizations(vec_ring(S3))}
    group_pairs = {(f.G1.elements, f.G2.elements) for f in exact_factorizations(S3)}
    checks = [len(ring_pairs) == 8, ring_pairs == group_pairs]
    for name in ("vecC4", "fibonacci", "ising"):
        R = builtin_ring(name)
        pairs = {(A.support, C.support) for A, C in enumerate_exact_factorizations(R)}
        full = tuple(range(R.rank))
        checks.append(pairs == {((0,), full), (full, (0,))})
    record(3, all(checks), f"vecS3: {len(ring_pairs)} pairs matching groups; vecC4, fibonacci, ising trivial only")


def test_criterion_04_rep_rings():
    R = rep_ring(builtin_group("S3"))
    pinned = validate_ring({"labels": ["1", "sgn", "c"], "dual": [0, 1, 2], "tensor": [
        [0, 0, 0, 1], [0, 1, 1, 1], [0, 2, 2, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 2, 2, 1],
        [2, 0, 2, 1], [2, 1, 2, 1], [2, 2, 0, 1], [2, 2, 1, 1], [2, 2, 2, 1]]})
    checks = [R.same_rules(pinned), fp_data(R).integral_dims == (1, 1, 2)]
    checks.append(rep_ring(builtin_group("D4")).same_rules(rep_ring(builtin_group("Q8"))))
    for name in CORPUS_GROUPS:
        G = builtin_group(name)
        Rg = rep_ring(G)
        validate_ring(Rg.to_dict())
        dims = fp_data(Rg).integral_dims
        checks.append(dims is not None and sum(d * d for d in dims) == G.order)
    record(4, all(checks), f"repS3 pinned, repD4 = repQ8, {len(CORPUS_GROUPS)} rep rings validated")


def test_criterion_05_gt_simples():
    S3 = builtin_group("S3")
    s = gt_simples(S3, subgroup(S3, [0, S3.index_of("(1,2)")]))
    checks = [sorted(x.fpdim for x in s) == [1, 1, 2], sum(x.fpdim ** 2 for x in s) == 6]
    pairs = 0
    for name in CORPUS_GROUPS:
        G = builtin_group(name)
        checks.append([x.fpdim for x in gt_simples(G, subgroup(G, [0]))]
                      == list(fp_data(vec_ring(G)).integral_dims))
        checks.append(tuple(x.fpdim for x in gt_simples(G, subgroup(G, range(G.order))))
                      == fp_data(rep_ring(G)).integral_dims)
        if G.order <= 48:
            for L in enumerate_subgroups(G):
                pairs += 1
                checks.append(sum(x.fpdim ** 2 for x in gt_simples(G, L)) == G.order)
    record(5, all(checks), f"S3/<(12)> -> 1,1,2; extremes match; {pairs} (G, L) pairs sum to |G|")


def test_criterion_06_cohomology():
    checks = [brute_classes(cyclic(2), 3, 4) == 2, not trivialize(cyclic_3cocycle(2, 1))]
    checks += [bool(trivialize(cyclic_3cocycle(n, 0))) for n in range(1, 7)]
    C4 = cyclic(4)
    for q in range(4):
        w = restrict(cyclic_3cocycle(4, q), subgroup(C4, [0, 2]))
        checks.append(bool(trivialize(w)) == (q % 2 == 0))
    rng = np.random.default_rng(2024)
    trips = 0
    for G in (builtin_group("S3"), C4):
        for _ in range(100):
            m = int(rng.choice([2, 3, 4, 6, 12]))
            psi0 = Cochain(G, 2, m, rng.integers(0, m, size=(G.order, G.order)))
            omega = coboundary(psi0)
            t = trivialize(omega)
            checks.append(bool(t) and coboundary(t.psi) == omega)
            trips += 1
    record(6, all(checks), f"H^3(Z/2; m=4) = 2, parity law q=0..3, {trips} round trips")


def test_criterion_07_coset_module():
    S3 = builtin_group("S3")
    M = coset_module(S3, subgroup(S3, [0, S3.index_of("(1,2)")]))
    err = max(abs(x - math.sqrt(2)) for x in M.mdims)
    total = sum(x * x for x in M.mdims)
    record(7, M.mrank == 3 and err <= 1e-9 and abs(total - 6) <= 1e-9,
           f"3 simples, max |mdim - sqrt2| = {err:.1e}, sum mdims^2 = {total:.12g}")


def test_criterion_08_pointed_certificates():
    S3 = builtin_group("S3")
    G1 = subgroup(S3, [0] + [S3.index_of(x) for x in ("(1,2,3)", "(1,3,2)")])
    G2 = subgroup(S3, [0, S3.index_of("(1,2)")])
    pos = pointed_classify(S3, zero_cochain(S3, 3), G1, G2, zero_cochain(G2.as_group(), 3))
    C4 = cyclic(4)
    neg1 = pointed_classify(C4, cyclic_3cocycle(4, 1), subgroup(C4, [0, 2]), subgroup(C4, [0]))
    C3 = cyclic(3)
    neg2 = pointed_classify(C3, cyclic_3cocycle(3, 1), subgroup(C3, range(3)), subgroup(C3, [0]))
    ok = (pos.positive and "6 = 3*2" in pos.conclusion
          and not neg1.positive and "exact_factorization" in neg1.failed
          and not neg2.positive and neg2.failed == ["trivial_on_G1"])
    record(8, ok, f"positive: {pos.conclusion!r}; negatives fail {neg1.failed} and {neg2.failed}")


def test_criterion_09_fp_engine():
    ising = fp_data(builtin_ring("ising"))
    fib = fp_data(builtin_ring("fibonacci"))
    e1 = abs(ising.dims[2] - math.sqrt(2))
    e2 = abs(fib.dims[1] - (1 + math.sqrt(5)) / 2)
    groups_ok = all(fp_data(vec_ring(builtin_group(g))).integral_dims == (1,) * builtin_group(g).order
                    for g in CORPUS_GROUPS)
    record(9, e1 <= 1e-9 and e2 <= 1e-9 and groups_ok,
           f"|sigma - sqrt2| = {e1:.1e}, |tau - phi| = {e2:.1e}, group rings integral")


def corpus_commands():
    cmds = []
    for name in CORPUS_RINGS:
        ring = ["--ring", f"builtin:{name}", "--max-rank", str(MAX_RANK)]
        for act in ("validate", "fpdim", "subrings", "exact-factorizations"):
            cmds.append(["ring", act, *ring])
    cmds.append(["ring", "factorize", "--ring", "builtin:vecS3", "2", "1"])
    cmds.append(["ring", "deligne-shadow", "--ring", "builtin:vecC6", "2", "3"])
    cmds.append(["ring", "deligne", "builtin:ising", "builtin:fibonacci"])
    for g in CORPUS_GROUPS:
        grp = ["--group", g]
        for act in ("subgroups", "exact-factorizations", "classes"):
            cmds.append(["group", act, *grp])
        cmds.append(["group", "double-cosets", "1", "1", *grp])
        for act in ("vec-ring", "rep-ring"):
            cmds.append(["construct", act, *grp])
        cmds.append(["construct", "gt-simples", "1", *grp])
        cmds.append(["construct", "coset-module", "1", *grp])
        cmds.append(["cocycle", "trivialize", "--cochain", "zero", *grp])
    for n in range(2, 7):
        for q in range(n):
            cmds.append(["cocycle", "cyclic", str(n), str(q)])
            cmds.append(["cocycle", "trivialize", "--cochain", f"cyclic3:{n}:{q}", "--group", f"C{n}"])
    cmds.append(["cocycle", "brute-classes", "3", "4", "--group", "C2"])
    cmds.append(["construct", "pointed-classify", "--group", "S3", "--g1", "2", "--g2", "1",
                 "--omega2", "zero"])
    return cmds


def run_bytes(argv):
    out = io.StringIO()
    code = run(argv, stdout=out, stderr=io.StringIO())
    return code, out.getvalue().encode()


def clear_caches():
    builtin_ring.cache_clear()
    fusion._fp_cached.cache_clear()


def test_criterion_10_determinism():
    cmds = corpus_commands()
    mismatched = []
    first = []
    clear_caches()
    for argv in cmds:
        first.append(run_bytes(argv))
    clear_caches()
    for argv, (code, data) in zip(cmds, first):
        again = run_bytes(argv)
        if again != (code, data) or code != 0:
            mismatched.append(" ".join(argv))
    # separate processes, for a sample spanning every command family
    sample = [cmds[i] for i in range(0, len(cmds), 17)]
    for argv in sample:
        a, b = (subprocess.run([sys.executable, "-m", "fusionfact", *argv], capture_output=True)
                for _ in range(2))
        if a.stdout != b.stdout or a.returncode != 0 or a.stdout != run_bytes(argv)[1]:
            mismatched.append("process: " + " ".join(argv))
    record(10, not mismatched,
           f"{len(cmds)} commands twice in-process, {len(sample)} across processes, "
           f"{len(mismatched)} mismatches {mismatched[:3]}")
