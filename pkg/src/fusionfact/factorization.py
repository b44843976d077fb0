"""Fusion subrings, products of subrings, and exact factorizations.

For subrings ``A, C`` of a fusion ring ``B``, ``AC`` is the set of basis
elements occurring in some ``x y`` with ``x in A``, ``y in C``.  It is only a
support set; it need not be closed under the product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import IdentityViolation, InvariantFailure, NotExact, RankBoundExceeded
from .fusion import FPData, FusionRing, fp_data, ring_from_dense

__all__ = [
    "FusionSubring",
    "DimIdentityReport",
    "FactorizationReport",
    "subring_generated",
    "enumerate_subrings",
    "product_support",
    "fpdim_of",
    "check_dim_identity",
    "is_exact_factorization",
    "enumerate_exact_factorizations",
    "deligne_product",
    "deligne_shadow_check",
]

MAX_RANK = 16
POWERSET_RANK = 12
REL_TOL = 1e-9


@dataclass(frozen=True)
class FusionSubring:
    ring: FusionRing = field(repr=False)
    support: tuple[int, ...]

    def __contains__(self, i: int) -> bool:
        return i in self.support

    @property
    def rank(self) -> int:
        return len(self.support)

    def is_trivial(self) -> bool:
        return self.support == (0,)

    def as_ring(self) -> FusionRing:
        """The subring as a fusion ring on its own basis (order of ``support``)."""
        idx = list(self.support)
        pos = {g: i for i, g in enumerate(idx)}
        R = self.ring
        return ring_from_dense([R.labels[i] for i in idx], [pos[R.dual[i]] for i in idx],
                               R.tensor[np.ix_(idx, idx, idx)])


def _close(R: FusionRing, seed: Iterable[int]) -> frozenset[int]:
    S = set(seed) | {0}
    S |= {R.dual[i] for i in S}
    N = R.tensor
    while True:
        idx = sorted(S)
        prod = set(np.flatnonzero(N[np.ix_(idx, idx)].any(axis=(0, 1))).tolist())
        new = prod | {R.dual[i] for i in prod}
        if new <= S:
            return frozenset(S)
        S |= new


def subring_generated(R: FusionRing, seed: Iterable[int]) -> FusionSubring:
    seed = [int(i) for i in seed]
    for i in seed:
        if not 0 <= i < R.rank:
            raise IndexError(f"basis index {i} out of range")
    return FusionSubring(R, tuple(sorted(_close(R, seed))))


def enumerate_subrings(R: FusionRing, max_rank: int = MAX_RANK) -> list[FusionSubring]:
    """All fusion subrings, sorted by size then support."""
    r = R.rank
    if r > max_rank:
        raise RankBoundExceeded(f"rank {r} exceeds subring enumeration bound {max_rank}")
    found: set[frozenset[int]] = set()
    if r <= POWERSET_RANK:
        others = range(1, r)
        for size in range(r):
            for subset in itertools.combinations(others, size):
                found.add(_close(R, subset))
    else:
        # every subring is a join of singleton closures
        singles = {_close(R, [i]) for i in range(r)}
        found = set(singles)
        frontier = list(singles)
        while frontier:
            nxt = []
            for X in frontier:
                for Y in singles:
                    if Y <= X:
                        continue
                    Z = _close(R, X | Y)
                    if Z not in found:
                        found.add(Z)
                        nxt.append(Z)
            frontier = nxt
    subs = [FusionSubring(R, tuple(sorted(s))) for s in found]
    subs.sort(key=lambda s: (s.rank, s.support))
    return subs


def product_support(R: FusionRing, A: FusionSubring, C: FusionSubring) -> tuple[int, ...]:
    block = R.tensor[np.ix_(A.support, C.support)]
    return tuple(int(k) for k in np.flatnonzero(block.any(axis=(0, 1))))


def fpdim_of(support: Iterable[int], fp: FPData) -> float:
    """Sum of squared FP dimensions over a set of basis elements."""
    return float(sum(fp.dims[i] ** 2 for i in support))


def _exact_fpdim(support: Iterable[int], fp: FPData) -> int | None:
    if fp.integral_dims is None:
        return None
    return sum(fp.integral_dims[i] ** 2 for i in support)


def _close_enough(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= REL_TOL * scale


@dataclass(frozen=True)
class DimIdentityReport:
    fpdim_A: float
    fpdim_C: float
    fpdim_D: float
    fpdim_AC: float
    fpdim_B: float
    relative_residual: float
    # coefficientwise residual of R_A R_C = FPdim(D) R_AC
    regular_residual: float
    bound: float  # FPdim(A) FPdim(C) / FPdim(D)
    is_factorization: bool
    exact: bool


def check_dim_identity(R: FusionRing, A: FusionSubring, C: FusionSubring,
                       tolerance: float = 1e-12) -> DimIdentityReport:
    """FPdim(A) FPdim(C) = FPdim(AC) FPdim(D) with D = A meet C, and the
    resulting lower bound FPdim(B) >= FPdim(A) FPdim(C) / FPdim(D).

    Raises :class:`IdentityViolation` when the identity fails, which can only
    happen for a broken ring or a bug.
    """
    fp = fp_data(R, tolerance)
    D = sorted(set(A.support) & set(C.support))
    AC = product_support(R, A, C)
    everything = range(R.rank)
    vals = [fpdim_of(s, fp) for s in (A.support, C.support, D, AC, everything)]
    a, c, d, ac, b = vals
    residual = abs(a * c - ac * d) / (b * b)

    dims = np.array(fp.dims)
    block = R.tensor[np.ix_(A.support, C.support)]
    rr = np.einsum("x,y,xyk->k", dims[list(A.support)], dims[list(C.support)], block)
    target = np.zeros(R.rank)
    target[list(AC)] = d * dims[list(AC)]
    regular_residual = float(np.abs(rr - target).max() / b)

    exact_vals = [_exact_fpdim(s, fp) for s in (A.support, C.support, D, AC, everything)]
    if exact_vals[0] is not None:
        ea, ec, ed, eac, eb = exact_vals
        holds = ea * ec == eac * ed
        is_fac = eb * ed == ea * ec
        if eb * ed < ea * ec:
            raise IdentityViolation("FPdim(B) FPdim(D) < FPdim(A) FPdim(C)")
        exact = True
    else:
        holds = residual <= REL_TOL
        is_fac = _close_enough(b * d, a * c, b * b)
        if b * d < a * c and not is_fac:
            raise IdentityViolation("FPdim(B) FPdim(D) < FPdim(A) FPdim(C)")
        exact = False
    if not holds or regular_residual > REL_TOL * max(1.0, d):
        raise IdentityViolation(
            f"FPdim(A)FPdim(C) != FPdim(AC)FPdim(D) for A={A.support}, C={C.support} "
            f"(relative residual {residual:.3e}, regular residual {regular_residual:.3e})")
    if is_fac != (len(AC) == R.rank):
        raise IdentityViolation("dimension equality and full product support disagree")
    return DimIdentityReport(a, c, d, ac, b, residual, regular_residual, a * c / d, is_fac, exact)


@dataclass(frozen=True)
class FactorizationReport:
    A: FusionSubring
    C: FusionSubring
    D: FusionSubring
    AC_support: tuple[int, ...]
    fpdims: dict[str, float]
    is_factorization: bool
    is_exact_dim: bool
    is_exact_unique: bool
    # bijection [x, y, z] with z = x y, or None
    bijection: list[tuple[int, int, int]] | None
    # why the unique-expression criterion fails, if it does
    counterexample: dict | None

    @property
    def exact(self) -> bool:
        return self.is_exact_dim


def _unique_expression(R: FusionRing, A: FusionSubring, C: FusionSubring):
    """Decide whether every basis element is uniquely ``x y`` (x in A, y in C)."""
    N = R.tensor
    image: dict[int, tuple[int, int]] = {}
    triples = []
    for x in A.support:
        for y in C.support:
            row = N[x, y]
            if row.sum() != 1:
                decomposition = [[int(k), int(row[k])] for k in np.flatnonzero(row)]
                return None, {"kind": "not_simple", "pair": [x, y], "decomposition": decomposition}
            z = int(np.flatnonzero(row)[0])
            if z in image:
                return None, {"kind": "not_injective", "pair": [x, y],
                              "other_pair": list(image[z]), "product": z}
            image[z] = (x, y)
            triples.append((x, y, z))
    if len(image) != R.rank:
        missing = [k for k in range(R.rank) if k not in image]
        return None, {"kind": "not_surjective", "missing": missing}
    return triples, None


def is_exact_factorization(R: FusionRing, A: FusionSubring, C: FusionSubring,
                           tolerance: float = 1e-12) -> FactorizationReport:
    """Decide ``B = A . C`` by the dimension criterion and by unique expression.

    The two verdicts are computed independently and must agree; a mismatch
    raises :class:`InvariantFailure`.
    """
    ident = check_dim_identity(R, A, C, tolerance)
    fp = fp_data(R, tolerance)
    D = FusionSubring(R, tuple(sorted(set(A.support) & set(C.support))))
    AC = product_support(R, A, C)

    if ident.exact:
        ea, ec, eb = (_exact_fpdim(s, fp) for s in (A.support, C.support, range(R.rank)))
        dims_match = eb == ea * ec
    else:
        dims_match = _close_enough(ident.fpdim_B, ident.fpdim_A * ident.fpdim_C,
                                   ident.fpdim_B)
    is_exact_dim = D.is_trivial() and dims_match

    triples, counter = _unique_expression(R, A, C)
    is_exact_unique = triples is not None

    if D.is_trivial() and counter is not None and counter["kind"] in ("not_simple", "not_injective"):
        raise InvariantFailure(f"trivial intersection but {counter['kind']}: {counter}")
    if is_exact_dim != is_exact_unique:
        raise InvariantFailure(
            f"exactness criteria disagree for A={A.support}, C={C.support}: "
            f"dimension={is_exact_dim}, unique expression={is_exact_unique}")
    if counter is None and not D.is_trivial():
        raise InvariantFailure("unique expression with nontrivial intersection")
    if counter is not None and not D.is_trivial():
        counter = {"kind": "intersection", "intersection": list(D.support), "detail": counter}

    fpdims = {"A": ident.fpdim_A, "C": ident.fpdim_C, "D": ident.fpdim_D,
              "AC": ident.fpdim_AC, "B": ident.fpdim_B}
    return FactorizationReport(A, C, D, AC, fpdims, ident.is_factorization,
                               is_exact_dim, is_exact_unique, triples, counter)


def enumerate_exact_factorizations(R: FusionRing, max_rank: int = MAX_RANK,
                                   tolerance: float = 1e-12
                                   ) -> list[tuple[FusionSubring, FusionSubring]]:
    """Ordered pairs ``(A, C)`` with ``R = A . C``; symmetric under swapping."""
    subs = enumerate_subrings(R, max_rank)
    pairs = [(A, C) for A in subs for C in subs
             if is_exact_factorization(R, A, C, tolerance).is_exact_dim]
    keys = {(A.support, C.support) for A, C in pairs}
    if any((c, a) not in keys for a, c in keys):
        raise InvariantFailure("exact factorizations are not closed under swapping factors")
    return pairs


def deligne_product(R1: FusionRing, R2: FusionRing) -> FusionRing:
    """Tensor product of fusion rings; pair ``(i, i')`` has index ``i * rank2 + i'``."""
    r1, r2 = R1.rank, R2.rank
    N = np.einsum("ijk,abc->iajbkc", R1.tensor, R2.tensor).reshape(r1 * r2, r1 * r2, r1 * r2)
    labels = [f"{a}*{b}" if r1 > 1 and r2 > 1 else (a if r2 == 1 else b)
              for a in R1.labels for b in R2.labels]
    if len(set(labels)) != len(labels):
        labels = [f"({a},{b})" for a in R1.labels for b in R2.labels]
    dual = [R1.dual[i] * r2 + R2.dual[j] for i in range(r1) for j in range(r2)]
    return ring_from_dense(labels, dual, N)


def deligne_shadow_check(R: FusionRing, A: FusionSubring, C: FusionSubring,
                         tolerance: float = 1e-12) -> bool:
    """Whether ``(x, y) -> x y`` is a ring isomorphism from ``A (x) C`` onto ``R``
    (the Grothendieck-ring shadow of a Deligne product decomposition)."""
    report = is_exact_factorization(R, A, C, tolerance)
    if not report.is_exact_dim:
        raise NotExact(f"A={A.support}, C={C.support} is not an exact factorization")
    phi = {(x, y): z for x, y, z in report.bijection}
    a_pos = {x: i for i, x in enumerate(A.support)}
    c_pos = {y: i for i, y in enumerate(C.support)}
    N = R.tensor
    # image of basis pairs as an index array over the product ring basis
    prod = deligne_product(A.as_ring(), C.as_ring())
    rc = len(C.support)
    img = np.empty(prod.rank, dtype=np.int64)
    for (x, y), z in phi.items():
        img[a_pos[x] * rc + c_pos[y]] = z
    return bool(np.array_equal(N[np.ix_(img, img, img)], prod.tensor))
