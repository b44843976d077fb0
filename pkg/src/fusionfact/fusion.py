"""Fusion rings, based modules over them, and Frobenius-Perron data.

A fusion ring is stored densely as an integer array ``N[i, j, k]`` (the
multiplicity of ``X_k`` in ``X_i X_j``) together with the sorted sparse
entry list used for equality, hashing and serialization.  The unit is
always basis index 0 after validation.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    ActionAxiomViolation,
    AssociativityViolation,
    AxiomViolation,
    ConvergenceFailure,
    Decomposable,
    DualityViolation,
    IndexOutOfRange,
    NormalizationFailure,
    NotTransitive,
    ReciprocityViolation,
    ResidualTooLarge,
    RingFormatError,
    UnitAxiomViolation,
)

__all__ = [
    "FusionRing",
    "FPData",
    "FusionModule",
    "validate_ring",
    "ring_violations",
    "ring_from_dense",
    "fusion_matrix",
    "fp_data",
    "regular_element",
    "validate_module",
    "perron_vector",
    "permute_ring",
    "find_isomorphism",
]

DEFAULT_TOLERANCE = 1e-12
POWER_ITERATION_TOL = 1e-14
POWER_ITERATION_CAP = 100_000


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _entries(dense: np.ndarray) -> tuple[tuple[int, ...], ...]:
    idx = np.argwhere(dense != 0)
    return tuple(tuple(int(x) for x in row) + (int(dense[tuple(row)]),) for row in idx)


@dataclass(frozen=True)
class FusionRing:
    """A validated fusion ring with unit at index 0.

    Construct through :func:`validate_ring` or :func:`ring_from_dense`.
    """

    labels: tuple[str, ...]
    dual: tuple[int, ...]
    entries: tuple[tuple[int, int, int, int], ...]
    tensor: np.ndarray = field(compare=False, repr=False)

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def unit(self) -> int:
        return 0

    def N(self, i: int, j: int, k: int) -> int:
        return int(self.tensor[i, j, k])

    def same_rules(self, other: "FusionRing") -> bool:
        """True when both rings have identical structure constants and duality
        in the given basis order (labels are ignored)."""
        return self.dual == other.dual and self.entries == other.entries

    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.tensor, self.tensor.transpose(1, 0, 2)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "labels": list(self.labels),
            "dual": list(self.dual),
            "tensor": [list(e) for e in self.entries],
        }


@dataclass(frozen=True)
class FPData:
    dims: tuple[float, ...]
    ring_dim: float
    regular: tuple[float, ...]
    integral_dims: tuple[int, ...] | None
    tolerance_used: float

    @property
    def exact_ring_dim(self) -> int | None:
        if self.integral_dims is None:
            return None
        return sum(d * d for d in self.integral_dims)


@dataclass(frozen=True)
class FusionModule:
    base: FusionRing
    mlabels: tuple[str, ...]
    entries: tuple[tuple[int, int, int, int], ...]
    mdims: tuple[float, ...]
    action: np.ndarray = field(compare=False, repr=False)

    @property
    def mrank(self) -> int:
        return len(self.mlabels)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ring": self.base.to_dict(),
            "mlabels": list(self.mlabels),
            "action": [list(e) for e in self.entries],
        }


# -- parsing -------------------------------------------------------------------

def _as_int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
        raise RingFormatError(f"{what} must be an integer, got {x!r}")
    return int(x)


def _parse_entries(raw_entries: Any, shape: tuple[int, int, int], what: str) -> np.ndarray:
    dense = np.zeros(shape, dtype=np.int64)
    seen = set()
    if raw_entries is None:
        raise RingFormatError(f"missing {what} entries")
    for entry in raw_entries:
        if len(entry) != 4:
            raise RingFormatError(f"{what} entry {entry!r} must have 4 components")
        i, j, k, n = (_as_int(x, f"{what} entry component") for x in entry)
        if not (0 <= i < shape[0] and 0 <= j < shape[1] and 0 <= k < shape[2]):
            raise RingFormatError(f"{what} entry {entry!r} has an index out of range")
        if n < 0:
            raise RingFormatError(f"{what} entry {entry!r} has a negative multiplicity")
        if (i, j, k) in seen:
            raise RingFormatError(f"duplicate {what} entry for {(i, j, k)}")
        seen.add((i, j, k))
        dense[i, j, k] = n
    return dense


def _parse_ring(raw: Mapping[str, Any]) -> tuple[list[str], list[int], np.ndarray, int | None]:
    if "labels" in raw:
        labels = [str(x) for x in raw["labels"]]
    elif "rank" in raw:
        labels = [str(i) for i in range(_as_int(raw["rank"], "rank"))]
    else:
        raise RingFormatError("ring description needs 'labels' or 'rank'")
    r = len(labels)
    if r == 0:
        raise RingFormatError("rank must be positive")
    if len(set(labels)) != r:
        raise RingFormatError("labels must be distinct")
    dual = [_as_int(x, "dual entry") for x in raw.get("dual", [])]
    if len(dual) != r:
        raise RingFormatError(f"dual must have length {r}")
    if any(not 0 <= d < r for d in dual):
        raise RingFormatError("dual entries out of range")
    dense = _parse_entries(raw.get("tensor"), (r, r, r), "tensor")
    unit = raw.get("unit")
    if unit is not None:
        unit = _as_int(unit, "unit")
        if not 0 <= unit < r:
            raise RingFormatError("unit out of range")
    return labels, dual, dense, unit


def _is_unit(N: np.ndarray, u: int) -> bool:
    eye = np.eye(N.shape[0], dtype=N.dtype)
    return bool(np.array_equal(N[u], eye) and np.array_equal(N[:, u, :], eye))


def _first(mask: np.ndarray) -> tuple[int, ...]:
    return tuple(int(x) for x in np.argwhere(mask)[0])


# -- axioms --------------------------------------------------------------------

def _strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    for a in (adj, adj.T):
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for w in np.flatnonzero(a[v]):
                w = int(w)
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != n:
            return False
    return True


def _check_axioms(N: np.ndarray, dual: Sequence[int]) -> list[AxiomViolation]:
    """Every axiom failure for a ring with unit candidate 0 (one witness each)."""
    r = N.shape[0]
    out: list[AxiomViolation] = []
    eye = np.eye(r, dtype=N.dtype)

    bad = N[0] != eye
    if bad.any():
        j, k = _first(bad)
        out.append(UnitAxiomViolation("unit times X_j is not X_j", (0, j, k)))
    else:
        bad = N[:, 0, :] != eye
        if bad.any():
            i, k = _first(bad)
            out.append(UnitAxiomViolation("X_i times unit is not X_i", (i, 0, k)))

    d = np.asarray(dual)
    if d[0] != 0:
        out.append(DualityViolation("dual does not fix the unit", (0, int(d[0]))))
    elif np.any(d[d] != np.arange(r)):
        i = int(np.flatnonzero(d[d] != np.arange(r))[0])
        out.append(DualityViolation("dual is not an involution", (i, int(d[i]))))
    else:
        expected = np.zeros((r, r), dtype=N.dtype)
        expected[np.arange(r), d] = 1
        bad = N[:, :, 0] != expected
        if bad.any():
            i, j = _first(bad)
            out.append(DualityViolation("unit multiplicity in X_i X_j must be [j = dual(i)]",
                                        (i, j, 0)))

    left = np.einsum("ijm,mkl->ijkl", N, N)
    right = np.einsum("jkm,iml->ijkl", N, N)
    bad = left != right
    if bad.any():
        out.append(AssociativityViolation("(X_i X_j) X_k != X_i (X_j X_k)", _first(bad)))

    if not any(isinstance(v, DualityViolation) for v in out):
        first = N[d]  # N[dual(i), k, j] after transposing the last two axes
        bad = N != first.transpose(0, 2, 1)
        if not bad.any():
            # N[k, dual(j), i] reindexed to (i, j, k)
            second = N[:, d, :].transpose(2, 1, 0)
            bad = N != second
        if bad.any():
            out.append(ReciprocityViolation("Frobenius reciprocity fails", _first(bad)))

    adj = N.sum(axis=0) > 0
    if not _strongly_connected(adj):
        reach = np.flatnonzero(~adj[0])
        out.append(NotTransitive("left multiplication is not irreducible",
                                 (0, int(reach[0])) if len(reach) else ()))
    return out


def ring_violations(raw: Mapping[str, Any]) -> list[AxiomViolation]:
    """All axiom violations of a raw ring description (empty if valid)."""
    try:
        validate_ring(raw)
    except AxiomViolation as exc:
        return exc.violations
    return []


def validate_ring(raw: Mapping[str, Any] | FusionRing) -> FusionRing:
    """Check the fusion ring axioms and return a canonical :class:`FusionRing`.

    The unit is taken from ``raw["unit"]`` when present and inferred
    otherwise; the basis is reordered so that it sits at index 0.  On
    failure the first violation is raised, with every violation found
    attached as ``exc.violations``.
    """
    if isinstance(raw, FusionRing):
        raw = raw.to_dict()
    labels, dual, N, unit = _parse_ring(raw)
    r = len(labels)
    if unit is None:
        unit = next((u for u in range(r) if _is_unit(N, u)), 0)
    if unit != 0:
        perm = [unit] + [i for i in range(r) if i != unit]
        inv = np.argsort(perm)
        N = N[np.ix_(perm, perm, perm)]
        dual = [int(inv[dual[p]]) for p in perm]
        labels = [labels[p] for p in perm]
    violations = _check_axioms(N, dual)
    if violations:
        first = violations[0]
        first.violations = violations
        raise first
    return FusionRing(tuple(labels), tuple(dual), _entries(N), _readonly(N))


def ring_from_dense(labels: Sequence[str], dual: Sequence[int], N: np.ndarray) -> FusionRing:
    N = np.asarray(N, dtype=np.int64)
    return validate_ring({"labels": list(labels), "dual": [int(x) for x in dual],
                          "tensor": [list(e) for e in _entries(N)]})


def permute_ring(R: FusionRing, perm: Sequence[int]) -> FusionRing:
    """Relabel so that new basis element ``p`` is old element ``perm[p]``."""
    perm = list(perm)
    inv = np.argsort(perm)
    N = R.tensor[np.ix_(perm, perm, perm)]
    dual = [int(inv[R.dual[p]]) for p in perm]
    return ring_from_dense([R.labels[p] for p in perm], dual, N)


def fusion_matrix(R: FusionRing, i: int) -> np.ndarray:
    """Left multiplication matrix ``(N_i)[j, k] = N_{ij}^k``."""
    if not 0 <= i < R.rank:
        raise IndexOutOfRange(f"basis index {i} out of range for rank {R.rank}")
    return R.tensor[i].copy()


# -- Frobenius-Perron ----------------------------------------------------------

def perron_vector(M: np.ndarray, tol: float = POWER_ITERATION_TOL,
                  max_iter: int = POWER_ITERATION_CAP) -> np.ndarray:
    """Positive eigenvector of an irreducible nonnegative matrix.

    Power iteration on ``M + I`` (the shift makes the matrix primitive),
    sup-normalized, stopping when successive iterates agree to ``tol``.
    """
    M = np.asarray(M, dtype=float)
    shifted = M + np.eye(M.shape[0])
    v = np.ones(M.shape[0])
    for _ in range(max_iter):
        w = shifted @ v
        w /= np.abs(w).max()
        if np.abs(w - v).max() < tol:
            return w
        v = w
    raise ConvergenceFailure(max_iter)


@functools.lru_cache(maxsize=512)
def _fp_cached(R: FusionRing, tolerance: float) -> FPData:
    N = R.tensor
    v = perron_vector(N.sum(axis=0))
    # (N_i v)[unit] = v[i], so reading dims off the unit row is a rescale
    d = v / v[0]
    residual = float(np.abs(np.outer(d, d) - N @ d).max())
    if residual > tolerance:
        raise ResidualTooLarge(residual)
    integral = None
    rounded = np.rint(d)
    if np.all(np.abs(d - rounded) <= tolerance):
        n = rounded.astype(np.int64)
        if np.array_equal(np.outer(n, n), N @ n):
            integral = tuple(int(x) for x in n)
            d = n.astype(float)
    dims = tuple(float(x) for x in d)
    return FPData(dims, float(np.dot(d, d)), dims, integral, tolerance)


def fp_data(R: FusionRing, tolerance: float = DEFAULT_TOLERANCE) -> FPData:
    """Frobenius-Perron dimensions of the basis, certified exactly when integral."""
    return _fp_cached(R, float(tolerance))


def regular_element(R: FusionRing, tolerance: float = DEFAULT_TOLERANCE) -> tuple[float, ...]:
    return fp_data(R, tolerance).regular


# -- modules -------------------------------------------------------------------

def _components(adj: np.ndarray) -> list[list[int]]:
    n = adj.shape[0]
    sym = adj | adj.T
    comp = [-1] * n
    out: list[list[int]] = []
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = len(out)
        members = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in np.flatnonzero(sym[v]):
                w = int(w)
                if comp[w] < 0:
                    comp[w] = len(out)
                    members.append(w)
                    queue.append(w)
        out.append(sorted(members))
    return out


def validate_module(R: FusionRing, raw: Mapping[str, Any],
                    tolerance: float = 1e-9) -> FusionModule:
    """Check a based module over ``R`` and compute its normalized FP dims.

    ``raw`` follows the module file format; ``raw["ring"]`` is ignored here
    (the caller resolves it to ``R``).
    """
    if "mlabels" in raw:
        mlabels = [str(x) for x in raw["mlabels"]]
    else:
        mlabels = [str(i) for i in range(_as_int(raw.get("mrank", 0), "mrank"))]
    mr = len(mlabels)
    if mr == 0:
        raise RingFormatError("module rank must be positive")
    r = R.rank
    A = _parse_entries(raw.get("action"), (r, mr, mr), "action")

    bad = A[0] != np.eye(mr, dtype=A.dtype)
    if bad.any():
        j, k = _first(bad)
        raise ActionAxiomViolation("unit does not act as the identity", (0, j, k))
    left = np.einsum("abm,mjk->abjk", R.tensor, A)
    right = np.einsum("bjm,amk->abjk", A, A)
    bad = left != right
    if bad.any():
        raise ActionAxiomViolation("(X_i X_i') M_j != X_i (X_i' M_j)", _first(bad))

    comps = _components(A.sum(axis=0) > 0)
    if len(comps) > 1:
        raise Decomposable(comps)

    fp = fp_data(R)
    d = np.array(fp.dims)
    try:
        m = perron_vector(A.sum(axis=0))
    except ConvergenceFailure as exc:
        raise NormalizationFailure(str(exc)) from exc
    m *= np.sqrt(fp.ring_dim / np.dot(m, m))

    scale = max(1.0, float(d.max() * m.max()))
    eig = np.abs(A @ m - d[:, None] * m[None, :]).max()
    if eig > tolerance * scale:
        raise NormalizationFailure(f"X R_M != FPdim(X) R_M (residual {eig:.3e})")
    # R_A M_j = FPdim(M_j) R_M, coefficientwise
    reg = np.einsum("i,ijk->jk", d, A)
    res = np.abs(reg - np.outer(m, m)).max()
    if res > tolerance * max(1.0, fp.ring_dim):
        raise NormalizationFailure(f"R_A M_j != FPdim(M_j) R_M (residual {res:.3e})")
    return FusionModule(R, tuple(mlabels), _entries(A), tuple(float(x) for x in m),
                        _readonly(A))


def regular_module(R: FusionRing) -> FusionModule:
    return validate_module(R, {"mlabels": list(R.labels),
                               "action": [list(e) for e in R.entries]})


# -- isomorphism search --------------------------------------------------------

def _signature(R: FusionRing, i: int) -> tuple:
    Ni = R.tensor[i]
    powers = []
    P = np.eye(R.rank, dtype=np.int64)
    for _ in range(6):
        P = P @ Ni
        powers.append(int(P[0, 0]))
    return (int(np.trace(Ni)), int(Ni.sum()), R.dual[i] == i,
            tuple(sorted(Ni.sum(axis=1).tolist())), tuple(powers))


def find_isomorphism(R1: FusionRing, R2: FusionRing) -> list[int] | None:
    """A basis bijection ``p`` with ``N2[p i, p j, p k] = N1[i, j, k]``, or None."""
    if R1.rank != R2.rank or \
            sorted(e[3] for e in R1.entries) != sorted(e[3] for e in R2.entries):
        return None
    r = R1.rank
    sig1 = [_signature(R1, i) for i in range(r)]
    sig2 = [_signature(R2, i) for i in range(r)]
    if sorted(sig1) != sorted(sig2):
        return None
    N1, N2 = R1.tensor, R2.tensor
    p = [-1] * r
    used = [False] * r
    order = list(range(r))

    def consistent(n: int) -> bool:
        idx = order[: n + 1]
        img = [p[i] for i in idx]
        return bool(np.array_equal(N1[np.ix_(idx, idx, idx)], N2[np.ix_(img, img, img)]))

    def extend(n: int) -> bool:
        if n == r:
            return True
        i = order[n]
        for c in range(r):
            if used[c] or sig1[i] != sig2[c]:
                continue
            p[i], used[c] = c, True
            if consistent(n) and extend(n + 1):
                return True
            p[i], used[c] = -1, False
        return False

    if not extend(0):
        return None
    if any(R2.dual[p[i]] != p[R1.dual[i]] for i in range(r)):
        return None
    return p
