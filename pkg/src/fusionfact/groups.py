"""Finite groups given by multiplication tables.

Elements are the integers ``0 .. order-1`` with 0 the identity.  Groups
built from permutations compose right to left: ``(g*h)(x) = g(h(x))``.
"""

from __future__ import annotations

import functools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import GroupAssociativityViolation, InputError, NotClosed, OrderBoundExceeded, TooLarge

__all__ = [
    "FiniteGroup",
    "Subgroup",
    "GroupFactorization",
    "group_from_table",
    "group_from_permutations",
    "group_from_dict",
    "cyclic",
    "dihedral",
    "symmetric",
    "quaternion",
    "direct_product",
    "semidirect_product",
    "builtin_group",
    "subgroup",
    "generated_subgroup",
    "enumerate_subgroups",
    "factorization_of",
    "exact_factorizations",
    "factorization_counts",
    "conjugacy_classes",
    "double_cosets",
]

MAX_ORDER = 2000
FULL_ASSOC_LIMIT = 512
SAMPLED_TRIPLES = 10_000
SUBGROUP_ORDER_LIMIT = 200


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray = field(repr=False)
    labels: tuple[str, ...]
    perms: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)
    inverses: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self):
        t = self.table
        inv = np.argwhere(t == 0)
        inverses = [0] * len(t)
        for a, b in inv:
            inverses[int(a)] = int(b)
        object.__setattr__(self, "inverses", tuple(inverses))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``"""
        return int(self.table[self.table[g, x], self.inverses[g]])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = int(self.table[x, a])
            n += 1
        return n

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"no element labelled {label!r}") from None

    def to_dict(self) -> dict[str, Any]:
        return {"order": self.order, "table": self.table.tolist(), "labels": list(self.labels)}


# -- construction --------------------------------------------------------------

def _check_associative(t: np.ndarray) -> tuple[int, int, int] | None:
    n = len(t)
    if n <= FULL_ASSOC_LIMIT:
        for a in range(n):
            # (a b) c versus a (b c) for all b, c at once
            lhs = t[t[a]]
            rhs = t[a][t]
            bad = lhs != rhs
            if bad.any():
                b, c = np.argwhere(bad)[0]
                return a, int(b), int(c)
        return None
    rng = np.random.default_rng(0)
    a, b, c = rng.integers(0, n, size=(3, SAMPLED_TRIPLES))
    bad = t[t[a, b], c] != t[a, t[b, c]]
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        return int(a[i]), int(b[i]), int(c[i])
    return None


def group_from_table(table: Sequence[Sequence[int]] | np.ndarray,
                     labels: Sequence[str] | None = None,
                     perms: Sequence[Sequence[int]] | None = None,
                     max_order: int = MAX_ORDER) -> FiniteGroup:
    """Validate a multiplication table.  The identity is moved to index 0."""
    try:
        t = np.array(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise NotClosed(f"malformed table: {exc}") from None
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NotClosed("table must be a nonempty square array")
    n = len(t)
    if n > max_order:
        raise TooLarge(f"group order {n} exceeds bound {max_order}")
    bad = (t < 0) | (t >= n)
    if bad.any():
        raise NotClosed("product outside the element set", tuple(int(x) for x in np.argwhere(bad)[0]))
    target = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(t[a]), target):
            raise NotClosed("row is not a permutation (Latin square fails)", (a,))
        if not np.array_equal(np.sort(t[:, a]), target):
            raise NotClosed("column is not a permutation (Latin square fails)", (a,))
    ids = [e for e in range(n) if np.array_equal(t[e], target) and np.array_equal(t[:, e], target)]
    if not ids:
        raise NotClosed("no identity element")
    e = ids[0]
    labels = list(labels) if labels is not None else [str(i) for i in range(n)]
    if len(labels) != n:
        raise InputError("labels must match the group order")
    if perms is not None:
        perms = [tuple(int(x) for x in p) for p in perms]
    if e != 0:
        order = [e] + [i for i in range(n) if i != e]
        inv = np.argsort(order)
        t = inv[t[np.ix_(order, order)]]
        labels = [labels[i] for i in order]
        if perms is not None:
            perms = [perms[i] for i in order]
    witness = _check_associative(t)
    if witness is not None:
        raise GroupAssociativityViolation("(ab)c != a(bc)", witness)
    t.setflags(write=False)
    return FiniteGroup(t, tuple(labels), tuple(perms) if perms is not None else None)


def cycle_label(p: Sequence[int]) -> str:
    """Cycle notation with 1-based points, e.g. ``(1,2,3)(4,5)``; identity is ``()``."""
    seen = set()
    cycles = []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc = [s]
        seen.add(s)
        x = p[s]
        while x != s:
            cyc.append(x)
            seen.add(x)
            x = p[x]
        cycles.append("(" + ",".join(str(c + 1) for c in cyc) + ")")
    return "".join(cycles) or "()"


def group_from_permutations(gens: Iterable[Sequence[int]], points: int | None = None,
                            max_order: int = MAX_ORDER) -> FiniteGroup:
    """Close permutation generators under composition by breadth-first search.

    Elements are numbered in discovery order from the identity, multiplying
    on the right by each generator in turn.
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    if points is None:
        points = len(gens[0]) if gens else 1
    if points > 16:
        raise TooLarge("permutation generators on more than 16 points are not supported")
    for g in gens:
        if len(g) != points or sorted(g) != list(range(points)):
            raise InputError(f"{g} is not a permutation of {points} points")
    identity = tuple(range(points))
    elems = [identity]
    index = {identity: 0}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = tuple(g[s[x]] for x in range(points))
            if h not in index:
                if len(elems) >= max_order:
                    raise TooLarge(f"generated group exceeds order bound {max_order}")
                index[h] = len(elems)
                elems.append(h)
                queue.append(h)
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for a, g in enumerate(elems):
        for b, h in enumerate(elems):
            table[a, b] = index[tuple(g[h[x]] for x in range(points))]
    return group_from_table(table, [cycle_label(p) for p in elems], elems, max_order)


def cyclic(n: int) -> FiniteGroup:
    """Z/n with element ``i`` the residue ``i``."""
    if n < 1:
        raise InputError("cyclic group order must be positive")
    t = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return group_from_table(t, ["e"] + [f"g^{i}" if i > 1 else "g" for i in range(1, n)])


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Pairs ``(g, h)`` indexed ``g * |H| + h``."""
    m = H.order
    t = G.table[:, None, :, None] * m + H.table[None, :, None, :]
    t = t.reshape(G.order * m, G.order * m)
    labels = [f"({a},{b})" for a in G.labels for b in H.labels]
    return group_from_table(t, labels)


def semidirect_product(N: FiniteGroup, H: FiniteGroup,
                       action: Sequence[Sequence[int]], labels: Sequence[str] | None = None
                       ) -> FiniteGroup:
    """``N x| H`` with ``(n1,h1)(n2,h2) = (n1 * action[h1][n2], h1 h2)``.

    ``action[h]`` lists the image of every element of ``N`` under ``h``.
    Pairs ``(n, h)`` are indexed ``n + |N| * h``.  A non-homomorphic action
    fails the associativity check.
    """
    act = np.array(action, dtype=np.int64)
    if act.shape != (H.order, N.order):
        raise InputError("action table must have shape (|H|, |N|)")
    a, b = N.order, H.order
    n_idx = np.arange(a * b) % a
    h_idx = np.arange(a * b) // a
    n_prod = N.table[n_idx[:, None], act[h_idx[:, None], n_idx[None, :]]]
    h_prod = H.table[h_idx[:, None], h_idx[None, :]]
    if labels is None:
        labels = [f"({N.labels[x % a]},{H.labels[x // a]})" for x in range(a * b)]
    return group_from_table(n_prod + a * h_prod, labels)


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order ``2n`` as ``Z/n x| Z/2`` (rotations ``r``, reflection ``s``)."""
    if n < 1:
        raise InputError("dihedral parameter must be positive")
    C = cyclic(n)
    action = [list(range(n)), [(-x) % n for x in range(n)]]

    def name(k: int, s: int) -> str:
        rot = "e" if k == 0 else ("r" if k == 1 else f"r^{k}")
        if not s:
            return rot
        return "s" if k == 0 else f"{rot}s"

    labels = [name(x % n, x // n) for x in range(2 * n)]
    return semidirect_product(C, cyclic(2), action, labels)


def symmetric(n: int) -> FiniteGroup:
    """Symmetric group on ``n <= 5`` points, generated by (1,2) and (1,...,n)."""
    if not 1 <= n <= 5:
        raise InputError("symmetric(n) is built in for 1 <= n <= 5")
    if n == 1:
        return group_from_permutations([(0,)], 1)
    swap = (1, 0) + tuple(range(2, n))
    cycle = tuple((i + 1) % n for i in range(n))
    return group_from_permutations([swap, cycle], n)


def quaternion() -> FiniteGroup:
    """Q8 with elements ``1, -1, i, -i, j, -j, k, -k``."""
    # unit products on the basis 1, i, j, k: (sign, index)
    basis = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    elems = [(s, b) for b in range(4) for s in (1, -1)]
    index = {e: i for i, e in enumerate(elems)}
    table = np.empty((8, 8), dtype=np.int64)
    for x, (s1, b1) in enumerate(elems):
        for y, (s2, b2) in enumerate(elems):
            s, b = basis[b1, b2]
            table[x, y] = index[s * s1 * s2, b]
    names = ["1", "i", "j", "k"]
    labels = [("" if s > 0 else "-") + names[b] for s, b in elems]
    return group_from_table(table, labels)


_BUILTIN = re.compile(r"^([CDS])(\d+)$")


def builtin_group(name: str) -> FiniteGroup:
    """Groups addressable by name: ``Cn``, ``Dn`` (order 2n), ``Sn`` (n <= 5), ``Q8``."""
    key = name.strip().upper()
    if key == "Q8":
        return quaternion()
    m = _BUILTIN.match(key)
    if not m:
        raise InputError(f"unknown builtin group {name!r}")
    kind, n = m.group(1), int(m.group(2))
    return {"C": cyclic, "D": dihedral, "S": symmetric}[kind](n)


def group_from_dict(raw: Mapping[str, Any], max_order: int = MAX_ORDER) -> FiniteGroup:
    if "table" in raw:
        G = group_from_table(raw["table"], raw.get("labels"), max_order=max_order)
        if "order" in raw and raw["order"] != G.order:
            raise InputError("declared order does not match the table")
        return G
    if "perm_gens" in raw:
        return group_from_permutations(raw["perm_gens"], raw.get("points"), max_order)
    raise InputError("group description needs 'table' or 'perm_gens'")


# -- subgroups -----------------------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(repr=False)
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self._set

    @functools.cached_property
    def _set(self) -> frozenset[int]:
        return frozenset(self.elements)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, tuple(sorted(self._set & other._set)))

    def conjugate(self, g: int) -> "Subgroup":
        G = self.parent
        return Subgroup(G, tuple(sorted({G.conj(g, x) for x in self.elements})))

    def index_in(self, other: "Subgroup") -> int:
        return other.order // self.order

    def as_group(self) -> FiniteGroup:
        """The subgroup as a group in its own right; element ``i`` is ``elements[i]``."""
        return _subgroup_as_group(self)


@functools.lru_cache(maxsize=1024)
def _subgroup_as_group(L: Subgroup) -> FiniteGroup:
    G = L.parent
    pos = {g: i for i, g in enumerate(L.elements)}
    t = np.array([[pos[G.mul(a, b)] for b in L.elements] for a in L.elements], dtype=np.int64)
    perms = [G.perms[g] for g in L.elements] if G.perms is not None else None
    return group_from_table(t, [G.labels[g] for g in L.elements], perms)


def subgroup(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    """Validate that ``elements`` form a subgroup of ``G``."""
    els = tuple(sorted(set(int(x) for x in elements)))
    if not els or els[0] != 0:
        raise InputError("a subgroup must contain the identity")
    if els[-1] >= G.order:
        raise InputError("subgroup element out of range")
    idx = np.array(els)
    if not np.isin(G.table[np.ix_(idx, idx)], idx).all():
        raise InputError(f"{list(els)} is not closed under multiplication")
    if G.order % len(els):
        raise InputError("subgroup order does not divide the group order")
    return Subgroup(G, els)


def _closure(G: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    gens = sorted(set(int(g) for g in gens) - {0})
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = int(G.table[x, s])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def generated_subgroup(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    els = tuple(sorted(_closure(G, gens)))
    assert G.order % len(els) == 0, "Lagrange"
    return Subgroup(G, els)


def enumerate_subgroups(G: FiniteGroup, max_order: int = SUBGROUP_ORDER_LIMIT) -> list[Subgroup]:
    """Every subgroup, sorted by size then elements.

    Starts from the cyclic subgroups and joins each found subgroup with each
    cyclic one until nothing new appears; every subgroup is an iterated join
    of cyclic subgroups, so this is complete.
    """
    if G.order > max_order:
        raise OrderBoundExceeded(f"group order {G.order} exceeds subgroup bound {max_order}")
    cyclics: dict[frozenset[int], tuple[int, ...]] = {}
    for g in range(G.order):
        cyclics.setdefault(_closure(G, [g]), (g,))
    found = dict(cyclics)
    queue = deque(found)
    while queue:
        X = queue.popleft()
        for C, cgens in cyclics.items():
            if C <= X:
                continue
            gens = found[X] + cgens
            Y = _closure(G, gens)
            if Y not in found:
                found[Y] = gens
                queue.append(Y)
    subs = [Subgroup(G, tuple(sorted(s))) for s in found]
    subs.sort(key=lambda s: (s.order, s.elements))
    return subs


# -- factorizations ------------------------------------------------------------

@dataclass(frozen=True)
class GroupFactorization:
    G1: Subgroup
    G2: Subgroup
    exact: bool
    expression_table: dict[int, tuple[int, int]] | None = field(default=None, compare=False)


def _expression_table(G: FiniteGroup, H: Subgroup, K: Subgroup) -> dict[int, tuple[int, int]] | None:
    """Map ``g -> (h, k)`` with ``g = h k`` if every element arises exactly once."""
    prods = G.table[np.ix_(H.elements, K.elements)]
    counts = np.bincount(prods.ravel(), minlength=G.order)
    if not np.all(counts == 1):
        return None
    return {int(prods[a, b]): (h, k)
            for a, h in enumerate(H.elements) for b, k in enumerate(K.elements)}


def factorization_of(G: FiniteGroup, H: Subgroup, K: Subgroup) -> GroupFactorization:
    """Decide whether ``G = H K`` is exact, by order count and by brute force."""
    by_count = H.intersection(K).order == 1 and H.order * K.order == G.order
    table = _expression_table(G, H, K)
    assert by_count == (table is not None), f"criteria disagree on {H.elements}, {K.elements}"
    return GroupFactorization(H, K, by_count, table)


def exact_factorizations(G: FiniteGroup, up_to_conjugacy: bool = False,
                         max_order: int = SUBGROUP_ORDER_LIMIT) -> list[GroupFactorization]:
    """All ordered exact factorizations ``G = G1 G2``.

    Every subgroup pair is decided twice: by the order count (trivial
    intersection and ``|G1||G2| = |G|``) and by brute-force uniqueness of
    ``g = g1 g2``.  Disagreement raises ``AssertionError``.
    """
    subs = enumerate_subgroups(G, max_order)
    out = []
    exact_pairs = set()
    for H in subs:
        for K in subs:
            f = factorization_of(G, H, K)
            if f.exact:
                out.append(f)
                exact_pairs.add((H.elements, K.elements))
    assert all((k, h) in exact_pairs for h, k in exact_pairs), "exact factorizations must be symmetric"
    if up_to_conjugacy:
        out = _dedupe_conjugate(G, out)
    return out


def _dedupe_conjugate(G: FiniteGroup, facs: list[GroupFactorization]) -> list[GroupFactorization]:
    seen = set()
    kept = []
    for f in facs:
        key = (f.G1.elements, f.G2.elements)
        if key in seen:
            continue
        kept.append(f)
        for g in range(G.order):
            seen.add((f.G1.conjugate(g).elements, f.G2.conjugate(g).elements))
    return kept


def factorization_counts(G: FiniteGroup, max_order: int = SUBGROUP_ORDER_LIMIT) -> dict[str, int]:
    """Ordered, unordered, and up-to-simultaneous-conjugation counts."""
    facs = exact_factorizations(G, max_order=max_order)
    unordered = {frozenset([f.G1.elements, f.G2.elements]) for f in facs}
    return {
        "ordered": len(facs),
        "unordered": len(unordered),
        "up_to_conjugacy": len(_dedupe_conjugate(G, facs)),
    }


# -- classes and double cosets -------------------------------------------------

def conjugacy_classes(G: FiniteGroup) -> tuple[list[tuple[int, ...]], list[int]]:
    """Classes sorted by size then minimal element, and the element -> class map."""
    n = G.order
    inv = np.array(G.inverses)
    # conj[g, x] = g x g^-1
    conj = G.table[G.table, inv[:, None]] if n else G.table
    assigned = [False] * n
    classes = []
    for x in range(n):
        if assigned[x]:
            continue
        cls = tuple(sorted(set(int(y) for y in conj[:, x])))
        for y in cls:
            assigned[y] = True
        classes.append(cls)
    classes.sort(key=lambda c: (len(c), c[0]))
    class_of = [0] * n
    for i, cls in enumerate(classes):
        for y in cls:
            class_of[y] = i
    return classes, class_of


def double_cosets(G: FiniteGroup, L1: Subgroup, L2: Subgroup) -> list[tuple[int, tuple[int, ...]]]:
    """Partition of ``G`` into ``L1 g L2``, each keyed by its minimal element."""
    n = G.order
    assigned = np.zeros(n, dtype=bool)
    l1 = np.array(L1.elements)
    l2 = np.array(L2.elements)
    out = []
    for g in range(n):
        if assigned[g]:
            continue
        left = G.table[l1, g]
        members = np.unique(G.table[np.ix_(left, l2)])
        assigned[members] = True
        out.append((g, tuple(int(x) for x in members)))
    return out
