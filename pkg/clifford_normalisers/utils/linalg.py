from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import DimensionMismatch
from .cyclotomic import ONE, ZERO, Cyclo
from .matrices import CMatrix


# ----------------------------------------------------------------------
# exact
# ----------------------------------------------------------------------
def exact_nullspace(rows: Sequence[Sequence[Cyclo]], ncols: int) -> List[List[Cyclo]]:
    """
    Basis of {x : A x = 0} over the cyclotomic numbers.
    Rows are reduced one at a time against the running echelon form,
    so at most ncols rows are ever stored.
    """
    echelon: List[List[Cyclo]] = []
    pivots: List[int] = []
    for raw in rows:
        row = list(raw)
        for pivot_row, col in zip(echelon, pivots):
            factor = row[col]
            if factor:
                row = [a - factor * b if b else a for a, b in zip(row, pivot_row)]
        lead = next((c for c, x in enumerate(row) if x), None)
        if lead is None:
            continue
        inv = row[lead].inverse()
        row = [x * inv if x else ZERO for x in row]
        for index, pivot_row in enumerate(echelon):
            factor = pivot_row[lead]
            if factor:
                echelon[index] = [a - factor * b if b else a for a, b in zip(pivot_row, row)]
        echelon.append(row)
        pivots.append(lead)
        if len(pivots) == ncols:
            return []

    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vector = [ZERO] * ncols
        vector[f] = ONE
        for pivot_row, col in zip(echelon, pivots):
            if pivot_row[f]:
                vector[col] = -pivot_row[f]
        basis.append(vector)
    return basis


def kron_constraint_rows(u: CMatrix, u_image: CMatrix) -> List[List[Cyclo]]:
    """Rows of I (x) U^T - U' (x) I acting on n with n[d*j + k] = N[j, k]."""
    if u.dim != u_image.dim:
        raise DimensionMismatch(f"constraint pair has dimensions {u.dim} and {u_image.dim}")
    d = u.dim
    rows = []
    for j in range(d):
        for k in range(d):
            row = [ZERO] * (d * d)
            # (N U)[j, k] = sum_m N[j, m] U[m, k]
            for m in range(d):
                if u[m, k]:
                    row[d * j + m] = row[d * j + m] + u[m, k]
            # (U' N)[j, k] = sum_m U'[j, m] N[m, k]
            for m in range(d):
                if u_image[j, m]:
                    row[d * m + k] = row[d * m + k] - u_image[j, m]
            rows.append(row)
    return rows


def vector_to_matrix(vector: Sequence[Cyclo], d: int) -> CMatrix:
    return CMatrix([[vector[d * j + k] for k in range(d)] for j in range(d)])


def kron_constraint_nullspace(
    pairs: Sequence[Tuple[CMatrix, CMatrix]],
    row_hint: Optional[Sequence[int]] = None,
) -> List[CMatrix]:
    """
    Exact basis of all N with N U = U' N for every pair (U, U').
    With row_hint only those stacked rows are used; callers must check the
    result against the full constraint set themselves.
    """
    if not pairs:
        raise DimensionMismatch("no constraint pairs given")
    d = pairs[0][0].dim
    rows: List[List[Cyclo]] = []
    for u, u_image in pairs:
        if u.dim != d or u_image.dim != d:
            raise DimensionMismatch(f"constraint pairs mix dimensions {d} and {u.dim}/{u_image.dim}")
        rows.extend(kron_constraint_rows(u, u_image))
    if row_hint is not None:
        rows = [rows[i] for i in row_hint]
    return [vector_to_matrix(v, d) for v in exact_nullspace(rows, d * d)]


# ----------------------------------------------------------------------
# numeric
# ----------------------------------------------------------------------
def numeric_constraint(u: np.ndarray, u_image: np.ndarray) -> np.ndarray:
    d = u.shape[0]
    identity = np.eye(d)
    return np.kron(identity, u.T) - np.kron(u_image, identity)


def numeric_nullspace(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Columns spanning the numerical kernel of a (singular values below tol * largest)."""
    _, s, vh = linalg.svd(a)
    if s.size == 0 or s[0] == 0:
        return np.eye(a.shape[1], dtype=complex)
    rank = int(np.sum(s > tol * s[0]))
    return vh[rank:].conj().T


def independent_rows(a: np.ndarray, count: int) -> List[int]:
    """Indices of `count` numerically independent rows of a (pivoted QR on a^T)."""
    _, _, pivots = linalg.qr(a.T, mode="economic", pivoting=True)
    return sorted(int(p) for p in pivots[:count])


# shifts rounding boundaries away from short decimal fractions such as 1/128
_KEY_SHIFT = 0.3183098861837907 * (1 + 1j)


def matrix_key(array: np.ndarray, decimals: int = 6) -> bytes:
    scaled = np.asarray(array, dtype=complex) * 10.0**decimals + _KEY_SHIFT
    return (np.round(scaled) + (0.0 + 0.0j)).tobytes()


def projective_key(array: np.ndarray, decimals: int = 6) -> bytes:
    """Key invariant under nonzero scalar multiples: divide by the first entry of significant size."""
    flat = array.reshape(-1)
    scale = np.max(np.abs(flat))
    if scale == 0:
        return matrix_key(array, decimals)
    lead = flat[np.argmax(np.abs(flat) > 1e-6 * scale)]
    return matrix_key(array / lead, decimals)
