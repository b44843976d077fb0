import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionfact.corpus import CORPUS_GROUPS
from fusionfact.errors import NotClosed, OrderBoundExceeded, TooLarge
from fusionfact.groups import (
    builtin_group,
    conjugacy_classes,
    cyclic,
    dihedral,
    direct_product,
    double_cosets,
    enumerate_subgroups,
    exact_factorizations,
    factorization_counts,
    factorization_of,
    generated_subgroup,
    group_from_dict,
    group_from_permutations,
    group_from_table,
    quaternion,
    semidirect_product,
    subgroup,
    symmetric,
)


def subsets_closed(G):
    """Oracle: every subset containing e and closed under products (finite => subgroup)."""
    n = G.order
    T = G.table
    out = set()
    for mask in range(1 << (n - 1)):
        S = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1]
        if set(T[np.ix_(S, S)].ravel().tolist()) <= set(S):
            out.add(tuple(S))
    return out


def two_generated(G):
    """Oracle for groups whose subgroups are all 2-generated."""
    out = set()
    for a in range(G.order):
        for b in range(a, G.order):
            S = {0}
            frontier = [0]
            while frontier:
                x = frontier.pop()
                for g in (a, b):
                    y = G.mul(x, g)
                    if y not in S:
                        S.add(y)
                        frontier.append(y)
            out.add(tuple(sorted(S)))
    return out


def test_builtins_and_orders():
    assert cyclic(6).order == 6 and cyclic(6).is_abelian()
    S3 = group_from_permutations([[1, 0, 2], [1, 2, 0]])
    assert S3.order == 6 and not S3.is_abelian()
    assert symmetric(4).order == 24 and dihedral(4).order == 8 and quaternion().order == 8
    assert builtin_group("Q8").labels[:2] == ("1", "-1")
    assert builtin_group("S3").labels[0] == "()"


def test_bad_tables():
    with pytest.raises(NotClosed):
        group_from_table([[0, 1], [1, 1]])
    # Latin square with identity 0 that is not associative
    T = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(NotClosed) as info:
        group_from_table(T)
    a, b, c = info.value.witness
    assert T[T[a][b]][c] != T[a][T[b][c]]
    with pytest.raises(TooLarge):
        cyclic(2001)


def test_group_file_formats():
    G = group_from_dict({"order": 3, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]})
    assert G == cyclic(3)
    H = group_from_dict({"points": 3, "perm_gens": [[1, 0, 2], [0, 2, 1]]})
    assert H.order == 6


@pytest.mark.parametrize("name", ["C6", "C7", "S3", "D4", "Q8", "C8"])
def test_subgroups_match_subset_oracle(name):
    G = builtin_group(name)
    got = [H.elements for H in enumerate_subgroups(G)]
    assert set(got) == subsets_closed(G)
    assert got == sorted(got, key=lambda s: (len(s), s))


def test_subgroup_counts():
    assert len(enumerate_subgroups(cyclic(6))) == 4
    assert len(enumerate_subgroups(builtin_group("S3"))) == 6
    for p in (2, 3, 5, 7, 11):
        assert len(enumerate_subgroups(cyclic(p))) == 2
    S4 = symmetric(4)
    got = {H.elements for H in enumerate_subgroups(S4)}
    assert got == two_generated(S4)
    assert len(got) == 30
    with pytest.raises(OrderBoundExceeded):
        enumerate_subgroups(cyclic(300))


@pytest.mark.parametrize("name", CORPUS_GROUPS)
def test_subgroups_closed_under_conjugation(name):
    G = builtin_group(name)
    subs = {H.elements for H in enumerate_subgroups(G)}
    for els in subs:
        H = subgroup(G, els)
        assert G.order % H.order == 0
        assert all(H.conjugate(g).elements in subs for g in range(G.order))


def brute_exact_pairs(G):
    """Oracle: ordered subgroup pairs where every g is g1 g2 exactly once."""
    subs = subsets_closed(G) if G.order <= 12 else two_generated(G)
    out = set()
    for H, K in itertools.product(subs, repeat=2):
        counts = [0] * G.order
        for h in H:
            for k in K:
                counts[G.mul(h, k)] += 1
        if all(c == 1 for c in counts):
            out.add((H, K))
    return out


@pytest.mark.parametrize("name", ["C2", "C4", "C6", "S3", "D4", "Q8", "S4"])
def test_exact_factorizations_match_oracle(name):
    G = builtin_group(name)
    facs = exact_factorizations(G)
    got = {(f.G1.elements, f.G2.elements) for f in facs}
    assert got == brute_exact_pairs(G)
    for f in facs:
        table = f.expression_table
        assert sorted(table) == list(range(G.order))
        assert sorted(table.values()) == sorted(itertools.product(f.G1.elements, f.G2.elements))
        assert all(G.mul(h, k) == g for g, (h, k) in table.items())


def test_factorization_counts():
    assert factorization_counts(builtin_group("S3")) == {"ordered": 8, "unordered": 4, "up_to_conjugacy": 4}
    assert factorization_counts(cyclic(7))["ordered"] == 2
    assert len(exact_factorizations(builtin_group("S3"), up_to_conjugacy=True)) == 4


def test_s4_cyclic_times_s3():
    S4 = symmetric(4)
    c4 = generated_subgroup(S4, [S4.index_of("(1,2,3,4)")])
    s3 = generated_subgroup(S4, [S4.index_of("(1,2)"), S4.index_of("(1,2,3)")])
    assert (c4.order, s3.order) == (4, 6)
    f = factorization_of(S4, c4, s3)
    assert f.exact and len(f.expression_table) == 24


def test_conjugacy_classes():
    for name in ("C6", "C8"):
        G = builtin_group(name)
        assert len(conjugacy_classes(G)[0]) == G.order
    classes, _ = conjugacy_classes(builtin_group("S3"))
    assert [len(c) for c in classes] == [1, 2, 3]
    assert len(conjugacy_classes(dihedral(4))[0]) == 5
    assert len(conjugacy_classes(quaternion())[0]) == 5
    assert len(conjugacy_classes(symmetric(4))[0]) == 5


@pytest.mark.parametrize("name", CORPUS_GROUPS)
def test_classes_are_orbits(name):
    G = builtin_group(name)
    classes, class_of = conjugacy_classes(G)
    for c in classes:
        orbit = {G.conj(g, c[0]) for g in range(G.order)}
        assert orbit == set(c)
        assert all(class_of[x] == classes.index(c) for x in c)


def test_double_coset_examples():
    G = builtin_group("S3")
    L = generated_subgroup(G, [1])
    assert [len(e) for _, e in double_cosets(G, L, L)] == [2, 4]
    E = subgroup(G, [0])
    assert len(double_cosets(G, E, E)) == 6
    full = subgroup(G, range(6))
    assert len(double_cosets(G, full, L)) == 1


@given(st.sampled_from(["S3", "D4", "Q8", "S4", "C6"]), st.data())
def test_double_coset_sizes(name, data):
    G = builtin_group(name)
    subs = enumerate_subgroups(G)
    L1 = data.draw(st.sampled_from(subs))
    L2 = data.draw(st.sampled_from(subs))
    dcs = double_cosets(G, L1, L2)
    assert sum(len(e) for _, e in dcs) == G.order
    for g, els in dcs:
        assert g == min(els)
        inter = L1.intersection(L2.conjugate(g))
        assert len(els) == L1.order * L2.order // inter.order


@given(st.lists(st.permutations(list(range(5))), min_size=1, max_size=3))
def test_permutation_closure_is_a_group(gens):
    G = group_from_permutations(gens)
    T = G.table
    n = G.order
    assert 120 % n == 0
    assert np.array_equal(T[T], T[:, T])  # (ab)c = a(bc) for all triples
    assert all(sorted(row) == list(range(n)) for row in T)
    assert all(sorted(col) == list(range(n)) for col in T.T)
    # the table is composition of the underlying permutations, x -> g(h(x))
    perms = [tuple(p) for p in G.perms]
    for a in range(n):
        for b in range(n):
            assert perms[T[a, b]] == tuple(perms[a][perms[b][x]] for x in range(5))
    for g in gens:
        assert tuple(g) in perms


def test_products():
    G = direct_product(cyclic(2), cyclic(3))
    assert G.order == 6 and G.is_abelian() and max(G.element_order(g) for g in range(6)) == 6
    # C3 x| C2 with inversion is S3
    action = [[0, 1, 2], [0, 2, 1]]
    S = semidirect_product(cyclic(3), cyclic(2), action)
    assert S.order == 6 and not S.is_abelian()
