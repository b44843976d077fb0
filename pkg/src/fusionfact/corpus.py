"""Named rings and groups used by the CLI and the test corpus."""

from __future__ import annotations

import functools
import re

from .constructions import rep_ring, vec_ring
from .errors import InputError
from .factorization import deligne_product
from .fusion import FusionRing, validate_ring
from .groups import builtin_group

__all__ = ["ISING", "FIBONACCI", "builtin_ring", "CORPUS_RINGS", "CORPUS_GROUPS"]


def _unit_entries(r: int) -> list[list[int]]:
    return [[0, j, j, 1] for j in range(r)] + [[i, 0, i, 1] for i in range(1, r)]


ISING = {
    "labels": ["1", "psi", "sigma"],
    "dual": [0, 1, 2],
    "tensor": _unit_entries(3) + [
        [1, 1, 0, 1], [1, 2, 2, 1], [2, 1, 2, 1], [2, 2, 0, 1], [2, 2, 1, 1],
    ],
}

FIBONACCI = {
    "labels": ["1", "tau"],
    "dual": [0, 1],
    "tensor": _unit_entries(2) + [[1, 1, 0, 1], [1, 1, 1, 1]],
}

CORPUS_GROUPS = ["C2", "C3", "C4", "C5", "C6", "C7", "C8", "S3", "S4", "D4", "Q8"]

CORPUS_RINGS = (
    [f"vec{g}" for g in CORPUS_GROUPS]
    + ["repS3", "repD4", "repQ8", "ising", "fibonacci", "fibfib", "isingfib"]
)


@functools.lru_cache(maxsize=None)
def builtin_ring(name: str) -> FusionRing:
    """``ising``, ``fibonacci``, ``vec<GROUP>``, ``rep<GROUP>``, ``fibfib``
    (Fibonacci squared) and ``isingfib`` (Ising times Fibonacci)."""
    key = name.strip()
    low = key.lower()
    if low == "ising":
        return validate_ring(ISING)
    if low in ("fibonacci", "fib"):
        return validate_ring(FIBONACCI)
    if low == "fibfib":
        return deligne_product(builtin_ring("fibonacci"), builtin_ring("fibonacci"))
    if low == "isingfib":
        return deligne_product(builtin_ring("ising"), builtin_ring("fibonacci"))
    m = re.match(r"^(vec|rep)(.+)$", key, re.IGNORECASE)
    if m:
        G = builtin_group(m.group(2))
        return vec_ring(G) if m.group(1).lower() == "vec" else rep_ring(G)
    raise InputError(f"unknown builtin ring {name!r}")
