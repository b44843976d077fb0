"""Cochains on finite groups with values in Q/Z (trivial action).

A value ``x in Q/Z`` stands for the root of unity ``exp(2 pi i x)``.  A
cochain stores integer numerators over a common modulus: the entry ``t``
means ``t / modulus mod 1``.  Everything is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Mapping

import numpy as np

from .errors import CoefficientOverflow, DegreeUnsupported, InputError, InvariantFailure, NotACocycle, TooLarge
from .groups import FiniteGroup, Subgroup, _closure, cyclic
from .smith import kernel_size_mod, solve_mod

__all__ = [
    "Cochain",
    "circle",
    "zero_cochain",
    "cochain_from_values",
    "coboundary",
    "coboundary_matrix",
    "is_cocycle",
    "cyclic_3cocycle",
    "restrict",
    "trivialize",
    "Trivialization",
    "brute_classes",
]

MAX_DEGREE = 4
MAX_MODULUS = 10**6
BRUTE_LIMIT = 10**5

# when set, coboundary() also checks d(df) = 0 and restrict() checks it commutes with d
DEBUG_CHECKS = False


def circle(x) -> Fraction:
    """Reduce a rational into [0, 1)."""
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, eq=False)
class Cochain:
    group: FiniteGroup = field(repr=False)
    degree: int
    modulus: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64) % self.modulus
        if t.shape != (self.group.order,) * self.degree:
            raise InputError(f"cochain table must have shape {(self.group.order,) * self.degree}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def value(self, *args: int) -> Fraction:
        return Fraction(int(self.table[tuple(args)]), self.modulus)

    def lift(self, modulus: int) -> np.ndarray:
        """Numerators over a multiple of the current modulus."""
        if modulus % self.modulus:
            raise ValueError("target modulus must be a multiple")
        return self.table * (modulus // self.modulus)

    def reduced(self) -> "Cochain":
        """Same values over the smallest possible modulus."""
        g = gcd(self.modulus, *(int(x) for x in np.unique(self.table)))
        return Cochain(self.group, self.degree, self.modulus // g, self.table // g)

    def _common(self, other: "Cochain") -> tuple[int, np.ndarray, np.ndarray]:
        if self.group != other.group or self.degree != other.degree:
            raise InputError("cochains live on different groups or degrees")
        m = lcm(self.modulus, other.modulus)
        return m, self.lift(m), other.lift(m)

    def __add__(self, other: "Cochain") -> "Cochain":
        m, a, b = self._common(other)
        return Cochain(self.group, self.degree, m, a + b)

    def __sub__(self, other: "Cochain") -> "Cochain":
        m, a, b = self._common(other)
        return Cochain(self.group, self.degree, m, a - b)

    def __neg__(self) -> "Cochain":
        return Cochain(self.group, self.degree, self.modulus, -self.table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        try:
            _, a, b = self._common(other)
        except InputError:
            return False
        return bool(np.array_equal(a, b))

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.table.any()

    def is_normalized(self) -> bool:
        t = self.table
        return all(not np.take(t, 0, axis=ax).any() for ax in range(self.degree))

    def nonzero(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return [(tuple(int(x) for x in idx), self.value(*idx)) for idx in np.argwhere(self.table)]

    def to_dict(self) -> dict[str, Any]:
        vals = []
        for args, v in self.nonzero():
            vals.append(list(args) + [f"{v.numerator}/{v.denominator}"])
        return {"degree": self.degree, "values": vals}


def zero_cochain(G: FiniteGroup, degree: int) -> Cochain:
    return Cochain(G, degree, 1, np.zeros((G.order,) * degree, dtype=np.int64))


def cochain_from_values(G: FiniteGroup, degree: int, values) -> Cochain:
    """Build from ``[[g1, ..., gk, "p/q"], ...]``; omitted tuples are 0."""
    parsed = []
    m = 1
    for row in values:
        if len(row) != degree + 1:
            raise InputError(f"cochain value {row!r} needs {degree} arguments and a value")
        args = tuple(int(x) for x in row[:-1])
        if any(not 0 <= a < G.order for a in args):
            raise InputError(f"cochain argument out of range in {row!r}")
        try:
            v = circle(Fraction(str(row[-1])))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad cochain value {row[-1]!r}") from None
        parsed.append((args, v))
        m = lcm(m, v.denominator)
    table = np.zeros((G.order,) * degree, dtype=np.int64)
    for args, v in parsed:
        table[args] = v.numerator * (m // v.denominator)
    return Cochain(G, degree, m, table)


# -- the bar differential ------------------------------------------------------

def _coboundary_table(G: FiniteGroup, table: np.ndarray, k: int) -> np.ndarray:
    n = G.order
    if k == 0:
        return np.zeros((n,), dtype=np.int64)
    g = np.indices((n,) * (k + 1))
    T = G.table
    out = table[tuple(g[1:])].copy()
    for i in range(1, k + 1):
        args = list(g[: i - 1]) + [T[g[i - 1], g[i]]] + list(g[i + 1:])
        out += (-1) ** i * table[tuple(args)]
    out += (-1) ** (k + 1) * table[tuple(g[:k])]
    return out


def coboundary(f: Cochain, check: bool | None = None) -> Cochain:
    """``(df)(g1..g_{k+1}) = f(g2..) + sum_i (-1)^i f(.., g_i g_{i+1}, ..) + (-1)^{k+1} f(g1..g_k)``."""
    k = f.degree
    if k + 1 > MAX_DEGREE:
        raise DegreeUnsupported(f"coboundary of a degree {k} cochain is not supported")
    df = Cochain(f.group, k + 1, f.modulus, _coboundary_table(f.group, f.table, k))
    if (DEBUG_CHECKS if check is None else check) and k + 2 <= MAX_DEGREE:
        if not coboundary(df, check=False).is_zero():
            raise InvariantFailure("d(df) != 0")
    return df


def coboundary_matrix(G: FiniteGroup, k: int) -> np.ndarray:
    """Integer matrix of ``d: C^k -> C^{k+1}``; column ``x`` is d of the indicator of
    the ``k``-tuple with flat index ``x``."""
    n = G.order
    cols = n ** k
    D = np.zeros((n ** (k + 1), cols), dtype=np.int64)
    if k == 0:
        return D
    g = np.indices((n,) * (k + 1)).reshape(k + 1, -1)
    rows = np.arange(n ** (k + 1))
    T = G.table
    terms = [(1, g[1:])]
    for i in range(1, k + 1):
        args = np.concatenate([g[: i - 1], T[g[i - 1], g[i]][None], g[i + 1:]])
        terms.append(((-1) ** i, args))
    terms.append(((-1) ** (k + 1), g[:k]))
    for sign, args in terms:
        flat = np.ravel_multi_index(tuple(args), (n,) * k)
        np.add.at(D, (rows, flat), sign)
    return D


def is_cocycle(f: Cochain) -> bool:
    return coboundary(f).is_zero()


def cyclic_3cocycle(n: int, q: int, group: FiniteGroup | None = None) -> Cochain:
    """``w(a, b, c) = q a floor((b + c)/n) / n`` on Z/n (element ``i`` = residue ``i``)."""
    if n < 1 or not 0 <= q < n:
        raise InputError("cyclic_3cocycle needs n >= 1 and 0 <= q < n")
    G = group if group is not None else cyclic(n)
    if G != cyclic(n):
        raise InputError("cyclic_3cocycle requires the standard cyclic group table")
    a, b, c = np.indices((n, n, n))
    return Cochain(G, 3, n, q * a * ((b + c) // n))


def restrict(f: Cochain, L: Subgroup, check: bool | None = None) -> Cochain:
    """Restriction to ``L``, renumbered as ``L.as_group()``."""
    if L.parent != f.group:
        raise InputError("subgroup does not belong to the cochain's group")
    idx = np.array(L.elements)
    table = f.table[np.ix_(*([idx] * f.degree))] if f.degree else f.table
    out = Cochain(L.as_group(), f.degree, f.modulus, table)
    if (DEBUG_CHECKS if check is None else check) and f.degree + 1 <= MAX_DEGREE:
        if restrict(coboundary(f), L, check=False) != coboundary(out):
            raise InvariantFailure("restriction does not commute with d")
    return out


# -- trivialization ------------------------------------------------------------

@dataclass
class Trivialization:
    """Outcome of solving ``d psi = omega``.

    ``psi`` is the witness when one exists; otherwise ``certificate`` names
    the failing congruence ``d_i y = c_i (mod m)`` of the diagonalized system.
    """

    psi: Cochain | None
    modulus: int
    certificate: dict[str, int] | None = None

    def __bool__(self) -> bool:
        return self.psi is not None


def _generators(G: FiniteGroup) -> list[int]:
    """A small generating set, chosen greedily in index order."""
    gens: list[int] = []
    span = {0}
    for g in range(G.order):
        if g not in span:
            gens.append(g)
            span = set(_closure(G, gens))
    return gens


def _tree_system(omega: Cochain, m: int):
    """Rewrite ``d psi = omega`` in fewer unknowns.

    Any 2-cochain satisfies ``psi(g, h s) = omega(g, h, s) - psi(h, s) + psi(g h, s)
    + psi(g, h)`` whenever ``d psi = omega``, so walking a spanning tree of the
    Cayley graph from ``e`` expresses every ``psi(g, h)`` through the values
    ``psi(x, s)`` with ``s`` in ``{e} + generators``.  Returns the affine map
    ``P`` (last coordinate = constant) and the substituted system.
    """
    G = omega.group
    n = G.order
    T = G.table
    gens = _generators(G)
    anchors = [0] + gens
    U = n * len(anchors)
    w = omega.lift(m)
    P = np.zeros((n, n, U + 1), dtype=np.int64)
    known = np.zeros(n, dtype=bool)
    for j, s in enumerate(anchors):
        P[np.arange(n), s, np.arange(n) * len(anchors) + j] = 1
        known[s] = True
    queue = list(anchors)
    for h in queue:
        for s in gens:
            k = int(T[h, s])
            if known[k]:
                continue
            P[:, k] = (P[:, h] + P[T[:, h], s] - P[h, s][None, :]) % m
            P[:, k, U] = (P[:, k, U] + w[:, h, s]) % m
            known[k] = True
            queue.append(k)
    if not known.all():
        raise InvariantFailure("generators do not reach every element")
    g1, g2, g3 = (a.ravel() for a in np.indices((n, n, n)))
    E = (P[g2, g3] - P[T[g1, g2], g3] + P[g1, T[g2, g3]] - P[g1, g2]) % m
    A = E[:, :U]
    b = (w[g1, g2, g3] - E[:, U]) % m
    return P, A, b


def trivialize(omega: Cochain) -> Trivialization:
    """Find ``psi`` with ``d psi = omega`` or certify that none exists.

    Works over ``(1/m)Z/Z`` with ``m = lcm(denominators, |L|)``.  The system is
    first reduced along a spanning tree of the Cayley graph (see
    :func:`_tree_system`), then diagonalized over ``Z/m``; the certificate names
    the failing congruence of that diagonal form.
    """
    if omega.degree != 3:
        raise InputError("trivialize expects a 3-cochain")
    d_omega = coboundary(omega, check=False)
    if not d_omega.is_zero():
        raise NotACocycle("input is not a 3-cocycle", tuple(d_omega.nonzero()[0][0]))
    omega = omega.reduced()
    G = omega.group
    n = G.order
    # H^3(L, Q/Z) is killed by |L|, so (1/m)Z/Z with m = lcm(m0, |L|) loses nothing
    m = lcm(omega.modulus, n)
    if m > MAX_MODULUS:
        raise CoefficientOverflow(f"coefficient modulus {m} exceeds {MAX_MODULUS}")
    P, A, b = _tree_system(omega, m)
    zero_rows = ~A.any(axis=1)
    bad = np.flatnonzero(zero_rows & (b != 0))
    if len(bad):
        return Trivialization(None, m, {"index": -1, "diagonal": 0, "rhs": int(b[bad[0]]), "modulus": m})
    system = np.unique(np.column_stack([A, b])[~zero_rows], axis=0)
    if len(system):
        sol = solve_mod(system[:, :-1], system[:, -1], m)
        if sol.solution is None:
            i, s, c, mod = sol.certificate
            return Trivialization(None, m, {"index": i, "diagonal": s, "rhs": c, "modulus": mod})
        y = sol.solution
    else:
        y = np.zeros(A.shape[1], dtype=np.int64)
    psi = Cochain(G, 2, m, (P[:, :, :-1] @ y + P[:, :, -1]) % m)
    if omega.is_normalized():
        # d psi normalized forces psi(e, .) = psi(., e) = psi(e, e); constants are cocycles
        psi = Cochain(G, 2, m, psi.table - psi.table[0, 0])
        if not psi.is_normalized():
            raise InvariantFailure("witness could not be normalized")
    if coboundary(psi, check=False) != omega:
        raise InvariantFailure("trivialization witness does not satisfy d psi = omega")
    return Trivialization(psi.reduced(), m)


def brute_classes(L: FiniteGroup, k: int, m: int) -> int:
    """``|H^k(L, (1/m)Z/Z)|`` as ``|ker d_k| / |im d_{k-1}|`` over Z/m."""
    n = L.order
    if k < 1 or k + 1 > MAX_DEGREE:
        raise DegreeUnsupported(f"degree {k} not supported")
    if n ** k * m > BRUTE_LIMIT:
        raise TooLarge(f"|L|^k * m = {n ** k * m} exceeds {BRUTE_LIMIT}")
    ker_k = kernel_size_mod(coboundary_matrix(L, k), m)
    prev = coboundary_matrix(L, k - 1)
    image_prev = m ** prev.shape[1] // kernel_size_mod(prev, m)
    if ker_k % image_prev:
        raise InvariantFailure("image of d_{k-1} is not a subgroup of ker d_k")
    return ker_k // image_prev
