from __future__ import annotations

import math
from typing import List, Optional, Tuple

from ..errors import NotSquareOfSquare
from .cyclotomic import Cyclo
from .matrices import CMatrix


def local_dimension(v: CMatrix) -> int:
    d = math.isqrt(v.dim)
    if d * d != v.dim or d < 2:
        raise NotSquareOfSquare(f"a {v.dim} x {v.dim} matrix is not an operator on two qudits")
    return d


def _realign(v: CMatrix, d: int) -> List[List[Cyclo]]:
    # R[(i,k), (j,l)] = V[ij, kl]; V = A (x) B  <=>  R = vec(A) vec(B)^T
    return [
        [v[i * d + j, k * d + l] for j in range(d) for l in range(d)]
        for i in range(d)
        for k in range(d)
    ]


def _swapped(v: CMatrix, d: int) -> CMatrix:
    # (SWAP V)[ij, kl] = V[ji, kl]
    return CMatrix._trusted(tuple(v.rows[j * d + i] for i in range(d) for j in range(d)))


def tensor_factors(v: CMatrix) -> Optional[Tuple[CMatrix, CMatrix]]:
    """
    (A, B) with V == A (x) B, or None.

    V[ij,kl] V[i'j',k'l'] == V[ij',kl'] V[i'j,k'l] for every index tuple is
    the vanishing of every 2 x 2 minor of the realigned matrix R, which for a
    nonzero R is checked against a single nonzero pivot.
    """
    d = local_dimension(v)
    r = _realign(v, d)
    pivot = next(((p, q) for p, row in enumerate(r) for q, x in enumerate(row) if x), None)
    if pivot is None:
        return None
    p, q = pivot
    corner = r[p][q]
    for a, row in enumerate(r):
        for b, x in enumerate(row):
            if x * corner != row[q] * r[p][b]:
                return None
    inv = corner.inverse()
    left = CMatrix([[r[i * d + k][q] for k in range(d)] for i in range(d)])
    right = CMatrix([[r[p][j * d + l] * inv for l in range(d)] for j in range(d)])
    return left, right


def is_product(v: CMatrix) -> bool:
    return tensor_factors(v) is not None


def is_swap_product(v: CMatrix) -> bool:
    return tensor_factors(_swapped(v, local_dimension(v))) is not None


def is_entangling(v: CMatrix) -> bool:
    """Neither A (x) B nor SWAP (A (x) B). Invariant under rescaling V."""
    return not is_product(v) and not is_swap_product(v)
