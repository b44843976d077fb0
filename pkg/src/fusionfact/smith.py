"""Smith normal form over the integers and linear congruence solving.

``smith_normal_form`` is the exact integer algorithm (used for counting
kernels and images).  ``solve_mod`` diagonalizes over ``Z/m`` directly,
pivoting on units first; it never forms the row transform, which would be
quadratic in the (large) number of equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

__all__ = ["smith_normal_form", "invariant_factors", "kernel_size_mod", "solve_mod", "ModSolution"]

_INT64_SAFE = 1 << 40


class _Overflow(Exception):
    pass


def _snf(A: np.ndarray, transforms: bool):
    S = A.copy()
    m, n = S.shape
    dtype = S.dtype
    U = np.eye(m, dtype=dtype) if transforms else None
    V = np.eye(n, dtype=dtype) if transforms else None
    exact = dtype == object

    def guard(*arrays):
        if exact:
            return
        for a in arrays:
            if a.size and np.abs(a).max() > _INT64_SAFE:
                raise _Overflow

    def swap_rows(i, j):
        if i != j:
            S[[i, j]] = S[[j, i]]
            if transforms:
                U[[i, j]] = U[[j, i]]

    def swap_cols(i, j):
        if i != j:
            S[:, [i, j]] = S[:, [j, i]]
            if transforms:
                V[:, [i, j]] = V[:, [j, i]]

    t = 0
    while t < min(m, n):
        sub = S[t:, t:]
        nz = np.argwhere(sub != 0)
        if not len(nz):
            break
        mags = np.abs(sub[nz[:, 0], nz[:, 1]])
        i, j = nz[int(np.argmin(mags))]
        swap_rows(t, t + int(i))
        swap_cols(t, t + int(j))
        while True:
            p = S[t, t]
            # reduce the pivot column by floor division, then re-pivot on the smallest remainder
            col = S[t + 1:, t]
            if np.any(col != 0):
                q = col // p
                S[t + 1:] -= np.outer(q, S[t]).astype(dtype)
                if transforms:
                    U[t + 1:] -= np.outer(q, U[t]).astype(dtype)
                guard(S)
                col = S[t + 1:, t]
                if np.any(col != 0):
                    k = np.flatnonzero(col)
                    k = int(k[np.argmin(np.abs(col[k]))])
                    swap_rows(t, t + 1 + k)
                    continue
            row = S[t, t + 1:]
            if np.any(row != 0):
                q = row // p
                S[:, t + 1:] -= np.outer(S[:, t], q).astype(dtype)
                if transforms:
                    V[:, t + 1:] -= np.outer(V[:, t], q).astype(dtype)
                guard(S)
                row = S[t, t + 1:]
                if np.any(row != 0):
                    k = np.flatnonzero(row)
                    k = int(k[np.argmin(np.abs(row[k]))])
                    swap_cols(t, t + 1 + k)
                    continue
            # divisibility of the rest by the pivot
            rest = S[t + 1:, t + 1:]
            bad = np.argwhere(rest % p != 0) if rest.size else np.empty((0, 2))
            if len(bad):
                r0 = t + 1 + int(bad[0][0])
                S[t] += S[r0]
                if transforms:
                    U[t] += U[r0]
                continue
            break
        if S[t, t] < 0:
            S[t] *= -1
            if transforms:
                U[t] *= -1
        t += 1
    return S, U, V


def smith_normal_form(A, transforms: bool = True):
    """Return ``(S, U, V)`` with ``U @ A @ V == S``, ``S`` diagonal with
    nonnegative entries each dividing the next.  ``U, V`` are unimodular;
    they are ``None`` when ``transforms`` is false.

    Works in int64 and restarts with Python integers if entries grow.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    try:
        return _snf(A.astype(np.int64), transforms)
    except _Overflow:
        return _snf(A.astype(object), transforms)


def invariant_factors(A) -> list[int]:
    S, _, _ = smith_normal_form(A, transforms=False)
    k = min(S.shape)
    return [int(S[i, i]) for i in range(k) if S[i, i] != 0]


def kernel_size_mod(A, m: int) -> int:
    """Number of ``x in (Z/m)^cols`` with ``A x = 0 (mod m)``."""
    A = np.asarray(A)
    factors = invariant_factors(A)
    size = m ** (A.shape[1] - len(factors))
    for s in factors:
        size *= gcd(s, m)
    return size


# -- congruences ---------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
    return x, y, a


def _combine(p: int, a: int) -> tuple[int, int, int]:
    """Bezout coefficients, preferring a plain elimination when ``p | a`` so the
    pivot row and column are left alone (otherwise ``p == a`` acts as a swap
    and the Euclid loop can cycle)."""
    if a % p == 0:
        return 1, 0, p
    return _xgcd(p, a)


@dataclass
class ModSolution:
    solution: np.ndarray | None
    # (diagonal index, diagonal entry, transformed rhs, modulus) of the failing congruence
    certificate: tuple[int, int, int, int] | None
    diagonal: list[int]


def solve_mod(A, b, m: int) -> ModSolution:
    """Solve ``A x = b (mod m)``.

    Row and column operations invertible over ``Z/m`` bring ``A`` to
    diagonal form ``D`` while carrying ``b`` along (``P A Q = D``).  The system
    is solvable iff every ``gcd(d_i, m)`` divides the transformed ``b_i`` and
    the transformed ``b`` vanishes below the rank.
    """
    W = np.asarray(A, dtype=np.int64) % m
    rhs = np.asarray(b, dtype=np.int64) % m
    r, c = W.shape
    Q = np.eye(c, dtype=np.int64)
    t = 0

    def swap(i, j, axis):
        if i == j:
            return
        if axis == 0:
            W[[i, j]] = W[[j, i]]
            rhs[[i, j]] = rhs[[j, i]]
        else:
            W[:, [i, j]] = W[:, [j, i]]
            Q[:, [i, j]] = Q[:, [j, i]]

    # unit pivots: scale to 1 and clear row and column in one shot
    while t < min(r, c) and m > 1:
        piv = None
        for j in range(t, c):
            hits = np.flatnonzero(np.gcd(W[t:, j], m) == 1)
            if len(hits):
                piv = (t + int(hits[0]), j)
                break
        if piv is None:
            break
        swap(t, piv[0], 0)
        swap(t, piv[1], 1)
        u = pow(int(W[t, t]), -1, m)
        W[t] = (W[t] * u) % m
        rhs[t] = (rhs[t] * u) % m
        f = W[:, t].copy()
        f[t] = 0
        rows = np.flatnonzero(f)
        if len(rows):
            W[rows] = (W[rows] - np.outer(f[rows], W[t])) % m
            rhs[rows] = (rhs[rows] - f[rows] * rhs[t]) % m
        g = W[t].copy()
        g[t] = 0
        cols = np.flatnonzero(g)
        if len(cols):
            Q[:, cols] = (Q[:, cols] - np.outer(Q[:, t], g[cols])) % m
            W[t, cols] = 0
        t += 1

    # remaining block has no unit entries: integer Euclid steps (determinant 1)
    while t < min(r, c) and m > 1:
        sub = W[t:, t:]
        nz = np.argwhere(sub != 0)
        if not len(nz):
            break
        i, j = nz[int(np.argmin(sub[nz[:, 0], nz[:, 1]]))]
        swap(t, t + int(i), 0)
        swap(t, t + int(j), 1)
        while True:
            changed = False
            for i in np.flatnonzero(W[t + 1:, t]) + t + 1:
                p, a = int(W[t, t]), int(W[i, t])
                x, y, g = _combine(p, a)
                top = (x * W[t] + y * W[i]) % m
                W[i] = ((-a // g) * W[t] + (p // g) * W[i]) % m
                W[t] = top
                rt = (x * rhs[t] + y * rhs[i]) % m
                rhs[i] = ((-a // g) * rhs[t] + (p // g) * rhs[i]) % m
                rhs[t] = rt
                changed = True
            for j in np.flatnonzero(W[t, t + 1:]) + t + 1:
                p, a = int(W[t, t]), int(W[t, j])
                x, y, g = _combine(p, a)
                left = (x * W[:, t] + y * W[:, j]) % m
                W[:, j] = ((-a // g) * W[:, t] + (p // g) * W[:, j]) % m
                W[:, t] = left
                qleft = (x * Q[:, t] + y * Q[:, j]) % m
                Q[:, j] = ((-a // g) * Q[:, t] + (p // g) * Q[:, j]) % m
                Q[:, t] = qleft
                changed = True
            if not changed:
                break
        t += 1

    diag = [int(W[i, i]) for i in range(t)]
    y = np.zeros(c, dtype=np.int64)
    for i, s in enumerate(diag):
        g = gcd(s, m)
        ci = int(rhs[i])
        if ci % g:
            return ModSolution(None, (i, s, ci, m), diag)
        mg = m // g
        y[i] = (ci // g) * pow(s // g, -1, mg) % mg if mg > 1 else 0
    rest = np.flatnonzero(rhs[t:] % m) if m > 1 else []
    if len(rest):
        i = t + int(rest[0])
        return ModSolution(None, (i, 0, int(rhs[i]), m), diag)
    return ModSolution((Q @ y) % m, None, diag)
