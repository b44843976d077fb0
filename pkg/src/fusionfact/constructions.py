"""Fusion ring and module data built from groups and cocycles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cohomology import Cochain, restrict, trivialize
from .errors import (
    AxiomViolation,
    CharacterConvergenceFailure,
    IdentityFailure,
    InputError,
    NumericalError,
    OrderBoundExceeded,
    RoundingResidualTooLarge,
    StabilizerTooLarge,
    ValidationFailed,
)
from .fusion import FusionModule, FusionRing, fp_data, ring_from_dense, validate_module
from .groups import FiniteGroup, Subgroup, conjugacy_classes, double_cosets, factorization_of

__all__ = [
    "vec_ring",
    "character_table",
    "rep_ring",
    "coset_module",
    "GTSimple",
    "gt_simples",
    "PointedCertificate",
    "pointed_classify",
]

REP_ORDER_LIMIT = 200
ROUNDING_TOL = 1e-6


def vec_ring(G: FiniteGroup) -> FusionRing:
    """Grothendieck ring of Vec(G, w): the group ring, independent of w."""
    n = G.order
    N = np.zeros((n, n, n), dtype=np.int64)
    a, b = np.indices((n, n))
    N[a, b, G.table] = 1
    return ring_from_dense(G.labels, G.inverses, N)


# -- characters ------------------------------------------------------------------

def _class_constants(G: FiniteGroup, classes, class_of) -> np.ndarray:
    """``a[i, j, k] = #{x in C_i : x^-1 z_k in C_j}`` for a fixed ``z_k in C_k``,
    so that ``K_i K_j = sum_k a[i, j, k] K_k`` for class sums ``K``."""
    r = len(classes)
    cls = np.array(class_of)
    inv = np.array(G.inverses)
    a = np.zeros((r, r, r), dtype=np.int64)
    for k, c in enumerate(classes):
        z = c[0]
        np.add.at(a, (cls, cls[G.table[inv, z]], k), 1)
    return a


def _characters_once(G: FiniteGroup, classes, a: np.ndarray, seed: int) -> np.ndarray:
    n = G.order
    r = len(classes)
    sizes = np.array([len(c) for c in classes], dtype=float)
    rng = np.random.default_rng(seed)
    M = np.einsum("i,ijk->jk", rng.standard_normal(r), a.astype(float))
    vals, vecs = np.linalg.eig(M)
    gaps = np.abs(vals[:, None] - vals[None, :])
    np.fill_diagonal(gaps, np.inf)
    if r > 1 and gaps.min() < 1e-8 * max(1.0, np.abs(vals).max()):
        raise CharacterConvergenceFailure("eigenvalues of the class-sum combination collide")
    chars = []
    for col in range(r):
        w = vecs[:, col]
        # central character values w_k = |C_k| chi(g_k) / chi(1), with w_0 = 1
        w = w / w[0]
        deg = math.sqrt(n / float(np.sum(np.abs(w) ** 2 / sizes)))
        if abs(deg - round(deg)) > ROUNDING_TOL:
            raise RoundingResidualTooLarge(f"character degree {deg} is not an integer")
        chars.append(round(deg) * w / sizes)
    X = np.array(chars)
    gram = (X * sizes) @ X.conj().T / n
    if np.abs(gram - np.eye(r)).max() > ROUNDING_TOL:
        raise CharacterConvergenceFailure("characters fail the orthogonality relations")
    return X


def character_table(G: FiniteGroup, seed: int = 0) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Conjugacy classes and the complex character table (rows = irreducibles),
    trivial character first, then by degree.

    Class-sum method: the central characters are the common eigenvectors of
    the class multiplication matrices, separated by diagonalizing a random
    real combination of them.  Seeds ``seed, seed+1, seed+2`` are tried.
    """
    if G.order > REP_ORDER_LIMIT:
        raise OrderBoundExceeded(f"character computation limited to order {REP_ORDER_LIMIT}")
    classes, class_of = conjugacy_classes(G)
    a = _class_constants(G, classes, class_of)
    last: Exception | None = None
    for s in (seed, seed + 1, seed + 2):
        try:
            X = _characters_once(G, classes, a, s)
            break
        except NumericalError as exc:
            last = exc
    else:
        raise last
    key = [(int(round(x[0].real)),
            tuple((-round(v.real, 6) + 0.0, -round(v.imag, 6) + 0.0) for v in x)) for x in X]
    order = sorted(range(len(X)), key=lambda i: key[i])
    return classes, X[order]


def _ring_from_characters(G: FiniteGroup, classes, X: np.ndarray) -> FusionRing:
    n = G.order
    r = len(X)
    sizes = np.array([len(c) for c in classes], dtype=float)
    raw = np.einsum("c,ic,jc,kc->ijk", sizes, X, X, X.conj()) / n
    N = np.rint(raw.real).astype(np.int64)
    resid = max(np.abs(raw.real - N).max(), np.abs(raw.imag).max())
    if resid > ROUNDING_TOL:
        raise RoundingResidualTooLarge(f"fusion multiplicities off integers by {resid:.2e}")
    dual = []
    for i in range(r):
        match = [j for j in range(r) if np.abs(X[j] - X[i].conj()).max() < ROUNDING_TOL]
        if len(match) != 1:
            raise ValidationFailed("dual character not found uniquely")
        dual.append(match[0])
    labels = ["1"] + [f"chi{i}" for i in range(1, r)]
    try:
        return ring_from_dense(labels, dual, N)
    except AxiomViolation as exc:
        raise ValidationFailed(f"character ring failed validation: {exc}") from exc


def rep_ring(G: FiniteGroup, seed: int = 0) -> FusionRing:
    """Representation ring of ``G``; basis = irreducible characters."""
    last: Exception | None = None
    for s in (seed, seed + 1, seed + 2):
        try:
            classes, X = character_table(G, s)
            R = _ring_from_characters(G, classes, X)
            degrees = tuple(int(round(x[0].real)) for x in X)
            if fp_data(R).integral_dims != degrees:
                raise ValidationFailed("FP dimensions differ from character degrees")
            if sum(d * d for d in degrees) != G.order:
                raise ValidationFailed("squared degrees do not sum to |G|")
            return R
        except NumericalError as exc:
            last = exc
    raise last


# -- modules over Vec(G) -----------------------------------------------------------

def left_cosets(G: FiniteGroup, L: Subgroup) -> tuple[list[int], list[int]]:
    """Minimal coset representatives (ascending) and the element -> coset map."""
    coset_of = [-1] * G.order
    reps = []
    idx = np.array(L.elements)
    for x in range(G.order):
        if coset_of[x] >= 0:
            continue
        for y in G.table[x, idx]:
            coset_of[int(y)] = len(reps)
        reps.append(x)
    return reps, coset_of


def coset_module(G: FiniteGroup, L: Subgroup) -> FusionModule:
    """The module over Vec(G) whose simples are the cosets ``xL``."""
    reps, coset_of = left_cosets(G, L)
    action = [[g, j, coset_of[G.mul(g, x)], 1] for g in range(G.order) for j, x in enumerate(reps)]
    mlabels = [f"{G.labels[x]}L" for x in reps]
    return validate_module(vec_ring(G), {"mlabels": mlabels, "action": action})


# -- group-theoretical simples ------------------------------------------------------

@dataclass(frozen=True)
class GTSimple:
    coset_rep: int
    stabilizer: tuple[int, ...]
    stab_irrep: int
    stab_irrep_dim: int
    fpdim: int


def gt_simples(G: FiniteGroup, L: Subgroup, seed: int = 0) -> list[GTSimple]:
    """Simple-object dimension data of C(G, 1, L, 1).

    One simple per (L-L double coset ``LgL``, irreducible of ``L^g = L meet gLg^-1``),
    of dimension ``[L : L^g] dim``.  The total ``sum fpdim^2 = |G|`` is checked exactly.
    """
    out = []
    for g, _ in double_cosets(G, L, L):
        stab = L.intersection(L.conjugate(g))
        if stab.order > REP_ORDER_LIMIT:
            raise StabilizerTooLarge(f"stabilizer of order {stab.order} at {g}")
        dims = fp_data(rep_ring(stab.as_group(), seed)).integral_dims
        index = L.order // stab.order
        for i, d in enumerate(dims):
            out.append(GTSimple(g, stab.elements, i, d, index * d))
    total = sum(s.fpdim ** 2 for s in out)
    if total != G.order:
        raise IdentityFailure(f"sum of squared dimensions {total} != |G| = {G.order}")
    return out


# -- pointed classification certificate -------------------------------------------

@dataclass
class PointedCertificate:
    group_order: int
    G1: tuple[int, ...]
    G2: tuple[int, ...]
    checks: dict[str, dict] = field(default_factory=dict)
    psi1: Cochain | None = None
    psi2: Cochain | None = None
    conclusion: str | None = None

    @property
    def positive(self) -> bool:
        return self.conclusion is not None

    @property
    def failed(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c["passed"]]


def pointed_classify(G: FiniteGroup, omega: Cochain, G1: Subgroup, G2: Subgroup,
                     omega2: Cochain | None = None) -> PointedCertificate:
    """Check the data (G = G1 G2 exact, omega trivial on G1, omega restricting to
    omega2 on G2) under which B = C(G, omega, G1, 1).

    Without ``omega2`` the restriction of omega to G2 is taken as the target and
    only its class is reported.
    """
    if omega.group != G or omega.degree != 3:
        raise InputError("omega must be a 3-cochain on G")
    cert = PointedCertificate(G.order, G1.elements, G2.elements)

    fac = factorization_of(G, G1, G2)
    cert.checks["exact_factorization"] = {
        "passed": fac.exact,
        "intersection": list(G1.intersection(G2).elements),
        "orders": [G1.order, G2.order, G.order],
    }

    t1 = trivialize(restrict(omega, G1))
    cert.psi1 = t1.psi
    cert.checks["trivial_on_G1"] = {"passed": bool(t1), "certificate": t1.certificate}

    w2 = restrict(omega, G2)
    if omega2 is None:
        t2 = trivialize(w2)
        cert.checks["restriction_to_G2"] = {
            "passed": True, "target": "restriction", "restriction_trivial": bool(t2),
            "certificate": t2.certificate,
        }
    else:
        if omega2.group != w2.group or omega2.degree != 3:
            raise InputError("omega2 must be a 3-cochain on G2 (numbered as the subgroup)")
        t2 = trivialize(w2 - omega2)
        cert.psi2 = t2.psi
        cert.checks["restriction_to_G2"] = {
            "passed": bool(t2), "target": "omega2", "certificate": t2.certificate,
        }

    if not cert.failed:
        cert.conclusion = (
            f"B = C(G, omega, G1, 1) with FPdim(B) = |G| = |G1|*|G2| = "
            f"{G.order} = {G1.order}*{G2.order}")
    return cert
