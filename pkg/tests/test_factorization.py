import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionfact.constructions import vec_ring
from fusionfact.corpus import CORPUS_GROUPS, CORPUS_RINGS, builtin_ring
from fusionfact.errors import NotExact, RankBoundExceeded
from fusionfact.factorization import (
    FusionSubring,
    check_dim_identity,
    deligne_product,
    deligne_shadow_check,
    enumerate_exact_factorizations,
    enumerate_subrings,
    is_exact_factorization,
    product_support,
    subring_generated,
)
from fusionfact.fusion import find_isomorphism, fp_data, validate_ring
from fusionfact.groups import builtin_group, cyclic, direct_product, exact_factorizations

SMALL = [n for n in CORPUS_RINGS if builtin_ring(n).rank <= 12]


def closed_subsets(R):
    """Oracle: subsets with the unit, closed under duals and under every product."""
    r = R.rank
    N = R.tensor
    out = []
    for mask in range(1 << (r - 1)):
        S = [0] + [i + 1 for i in range(r - 1) if mask >> i & 1]
        if any(R.dual[i] not in S for i in S):
            continue
        outside = [k for k in range(r) if k not in S]
        if outside and N[np.ix_(S, S, outside)].any():
            continue
        out.append(tuple(S))
    return sorted(out, key=lambda s: (len(s), s))


def unique_expression_oracle(R, A, C):
    hits = [0] * R.rank
    for x in A:
        for y in C:
            row = R.tensor[x, y]
            if row.sum() != 1:
                return False
            hits[int(np.argmax(row))] += 1
    return all(h == 1 for h in hits)


def test_subring_generated_examples():
    assert subring_generated(builtin_ring("vecC6"), [2]).support == (0, 2, 4)
    assert subring_generated(builtin_ring("ising"), [2]).support == (0, 1, 2)
    for name in ("ising", "vecS3", "fibfib"):
        assert subring_generated(builtin_ring(name), []).support == (0,)


@pytest.mark.parametrize("name", SMALL)
def test_subrings_match_subset_oracle(name):
    R = builtin_ring(name)
    assert [S.support for S in enumerate_subrings(R)] == closed_subsets(R)


def test_subring_counts_and_bound():
    assert len(enumerate_subrings(builtin_ring("vecC6"))) == 4
    assert len(enumerate_subrings(builtin_ring("fibonacci"))) == 2
    assert len(enumerate_subrings(builtin_ring("repS3"))) == 3
    with pytest.raises(RankBoundExceeded):
        enumerate_subrings(builtin_ring("vecS4"))
    # above rank 12 the lattice-join route must still agree with the subgroup lattice
    assert len(enumerate_subrings(builtin_ring("vecS4"), max_rank=24)) == 30


def test_product_support_examples():
    R = builtin_ring("vecC6")
    E = FusionSubring(R, (0,))
    assert product_support(R, E, E) == (0,)
    assert product_support(R, FusionSubring(R, (0, 3)), FusionSubring(R, (0, 2, 4))) == tuple(range(6))
    rep = builtin_ring("repS3")
    sgn = FusionSubring(rep, (0, 1))
    assert product_support(rep, sgn, sgn) == (0, 1)


def test_dim_identity_examples():
    R = builtin_ring("vecC6")
    rep = check_dim_identity(R, subring_generated(R, [3]), subring_generated(R, [2]))
    assert (rep.fpdim_A, rep.fpdim_C, rep.fpdim_AC, rep.fpdim_D) == (2, 3, 6, 1)
    assert rep.is_factorization and rep.exact
    Z2 = builtin_ring("vecC2")
    rep = check_dim_identity(Z2, subring_generated(Z2, [1]), subring_generated(Z2, [1]))
    assert (rep.fpdim_A, rep.fpdim_AC, rep.fpdim_D) == (2, 2, 2)
    S = builtin_ring("repS3")
    sgn = subring_generated(S, [1])
    rep = check_dim_identity(S, sgn, sgn)
    assert rep.fpdim_A * rep.fpdim_C == rep.fpdim_AC * rep.fpdim_D == 4
    assert rep.fpdim_B == 6 and rep.bound == 2 and not rep.is_factorization


@pytest.mark.parametrize("name", CORPUS_RINGS)
def test_dimension_identity_and_bounds_on_all_pairs(name):
    R = builtin_ring(name)
    subs = enumerate_subrings(R, max_rank=24)
    fp = fp_data(R)
    d2 = np.array(fp.dims) ** 2
    for A, C in itertools.product(subs, repeat=2):
        rep = check_dim_identity(R, A, C)
        D = sorted(set(A.support) & set(C.support))
        AC = product_support(R, A, C)
        a, c, dd, ac = (d2[list(s)].sum() for s in (A.support, C.support, D, AC))
        assert abs(a * c - ac * dd) / fp.ring_dim ** 2 <= 1e-9
        assert rep.relative_residual <= 1e-9
        assert fp.ring_dim * dd >= a * c * (1 - 1e-12)
        assert rep.is_factorization == (len(AC) == R.rank)
        assert set(A.support) | set(C.support) <= set(AC)
        if A.is_trivial():
            assert AC == C.support


@pytest.mark.parametrize("name", [n for n in CORPUS_RINGS if n != "vecS4"])
def test_exactness_criteria_agree_with_oracle(name):
    R = builtin_ring(name)
    subs = enumerate_subrings(R)
    for A, C in itertools.product(subs, repeat=2):
        rep = is_exact_factorization(R, A, C)
        assert rep.is_exact_dim == rep.is_exact_unique == unique_expression_oracle(R, A.support, C.support)
        if rep.D.is_trivial():
            # simplicity of X Y and injectivity whenever the intersection is trivial
            for x, y in itertools.product(A.support, C.support):
                assert R.tensor[x, y].sum() == 1
        if rep.exact:
            assert sorted(z for _, _, z in rep.bijection) == list(range(R.rank))
            assert all(R.tensor[x, y, z] == 1 for x, y, z in rep.bijection)
        else:
            assert rep.counterexample is not None


def test_exact_examples():
    R = builtin_ring("vecC6")
    rep = is_exact_factorization(R, subring_generated(R, [2]), subring_generated(R, [3]))
    assert rep.exact and len(rep.bijection) == 6
    I = builtin_ring("ising")
    psi = subring_generated(I, [1])
    rep = is_exact_factorization(I, psi, psi)
    assert not rep.exact and rep.counterexample["kind"] == "intersection"
    S = builtin_ring("vecS3")
    r3 = subring_generated(S, [S.labels.index("(1,2,3)")])
    t = subring_generated(S, [S.labels.index("(1,2)")])
    assert is_exact_factorization(S, r3, t).exact


@pytest.mark.parametrize("name,count", [("vecS3", 8), ("vecC4", 2), ("fibonacci", 2), ("ising", 2),
                                        ("vecC6", 4), ("repS3", 2)])
def test_exact_factorization_counts(name, count):
    R = builtin_ring(name)
    pairs = enumerate_exact_factorizations(R)
    assert len(pairs) == count
    keys = {(A.support, C.support) for A, C in pairs}
    full = tuple(range(R.rank))
    assert {((0,), full), (full, (0,))} <= keys
    assert all((c, a) in keys for a, c in keys)


@pytest.mark.parametrize("name", CORPUS_GROUPS)
def test_vec_ring_factorizations_match_groups(name):
    G = builtin_group(name)
    ring_pairs = {(A.support, C.support)
                  for A, C in enumerate_exact_factorizations(vec_ring(G), max_rank=24)}
    group_pairs = {(f.G1.elements, f.G2.elements) for f in exact_factorizations(G)}
    assert ring_pairs == group_pairs


def test_deligne_examples():
    vec = builtin_ring("vecC1")
    for name in ("ising", "fibonacci", "repS3"):
        R = builtin_ring(name)
        assert deligne_product(vec, R).same_rules(R)
        assert deligne_product(R, vec).same_rules(R)
    C6 = deligne_product(builtin_ring("vecC2"), builtin_ring("vecC3"))
    assert find_isomorphism(C6, builtin_ring("vecC6")) is not None
    ff = builtin_ring("fibfib")
    assert ff.rank == 4
    assert fp_data(ff).ring_dim == pytest.approx(((5 + math.sqrt(5)) / 2) ** 2, abs=1e-9)
    assert round(fp_data(ff).ring_dim, 2) == 13.09


@given(st.sampled_from(CORPUS_GROUPS[:6] + ["S3"]), st.sampled_from(["C2", "C3", "S3"]))
def test_deligne_of_vec_rings_is_vec_of_product(g1, g2):
    G1, G2 = builtin_group(g1), builtin_group(g2)
    P = deligne_product(vec_ring(G1), vec_ring(G2))
    assert P.same_rules(vec_ring(direct_product(G1, G2)))


@given(st.sampled_from(["ising", "fibonacci", "repS3", "vecC3", "vecS3"]),
       st.sampled_from(["ising", "fibonacci", "vecC2"]))
def test_deligne_dims_multiply(n1, n2):
    R1, R2 = builtin_ring(n1), builtin_ring(n2)
    P = deligne_product(R1, R2)
    validate_ring(P.to_dict())
    assert fp_data(P).ring_dim == pytest.approx(fp_data(R1).ring_dim * fp_data(R2).ring_dim, rel=1e-12)


def test_shadow_check():
    R = builtin_ring("vecC6")
    assert deligne_shadow_check(R, subring_generated(R, [3]), subring_generated(R, [2]))
    S = builtin_ring("vecS3")
    r3 = subring_generated(S, [S.labels.index("(1,2,3)")])
    t = subring_generated(S, [S.labels.index("(1,2)")])
    assert not deligne_shadow_check(S, r3, t)
    for name in ("ising", "vecS3", "fibfib"):
        B = builtin_ring(name)
        full = FusionSubring(B, tuple(range(B.rank)))
        assert deligne_shadow_check(B, FusionSubring(B, (0,)), full)
    with pytest.raises(NotExact):
        deligne_shadow_check(R, subring_generated(R, [3]), subring_generated(R, [3]))
    ff = builtin_ring("fibfib")
    assert deligne_shadow_check(ff, subring_generated(ff, [1]), subring_generated(ff, [2]))
