from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionMismatch, SingularGenerator
from .cyclotomic import ONE, ZERO, Cyclo, CycloLike, as_cyclo, format_cyclo, parse_cyclo

MAX_DIM = 16


class CMatrix:
    """Dense square matrix over the cyclotomic numbers. Immutable; hashed by its exact entries."""

    __slots__ = ("_rows", "_dim", "_key", "_hash", "_numeric")

    def __init__(self, rows: Sequence[Sequence[CycloLike]]):
        dim = len(rows)
        if dim == 0 or dim > MAX_DIM:
            raise DimensionMismatch(f"matrix dimension {dim} outside 1..{MAX_DIM}")
        converted = []
        for row in rows:
            if len(row) != dim:
                raise DimensionMismatch(f"matrix is not square: row of length {len(row)} in a {dim}-row matrix")
            converted.append(tuple(as_cyclo(x) for x in row))
        self._rows: Tuple[Tuple[Cyclo, ...], ...] = tuple(converted)
        self._dim = dim
        self._key = None
        self._hash = None
        self._numeric = None

    @classmethod
    def _trusted(cls, rows: Tuple[Tuple[Cyclo, ...], ...]) -> "CMatrix":
        obj = object.__new__(cls)
        obj._rows = rows
        obj._dim = len(rows)
        obj._key = None
        obj._hash = None
        obj._numeric = None
        return obj

    def __reduce__(self):
        return (CMatrix._trusted, (self._rows,))

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def identity(cls, dim: int) -> "CMatrix":
        return cls._trusted(tuple(tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim)))

    @classmethod
    def zeros(cls, dim: int) -> "CMatrix":
        return cls._trusted(tuple(tuple(ZERO for _ in range(dim)) for _ in range(dim)))

    @classmethod
    def diag(cls, values: Sequence[CycloLike]) -> "CMatrix":
        values = [as_cyclo(v) for v in values]
        dim = len(values)
        return cls._trusted(tuple(tuple(values[i] if i == j else ZERO for j in range(dim)) for i in range(dim)))

    @classmethod
    def scalar(cls, value: CycloLike, dim: int) -> "CMatrix":
        return cls.diag([value] * dim)

    @classmethod
    def from_literals(cls, rows: Sequence[Sequence[str]], scale: Optional[str] = None) -> "CMatrix":
        matrix = cls([[parse_cyclo(str(x)) for x in row] for row in rows])
        if scale is not None:
            matrix = matrix.scale(parse_cyclo(str(scale)))
        return matrix

    # ------------------------------------------------------------------
    # access
    # ------------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def rows(self) -> Tuple[Tuple[Cyclo, ...], ...]:
        return self._rows

    def __getitem__(self, index: Tuple[int, int]) -> Cyclo:
        i, j = index
        return self._rows[i][j]

    def entries(self) -> Iterable[Cyclo]:
        for row in self._rows:
            yield from row

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(x.key for x in self.entries())
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, CMatrix):
            return NotImplemented
        return self._dim == other._dim and self.key == other.key

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def numeric(self) -> np.ndarray:
        if self._numeric is None:
            array = np.array([[complex(x) for x in row] for row in self._rows], dtype=complex)
            array.setflags(write=False)
            self._numeric = array
        return self._numeric

    def to_literals(self) -> List[List[str]]:
        return [[format_cyclo(x) for x in row] for row in self._rows]

    def __repr__(self) -> str:
        return f"CMatrix({self.to_literals()})"

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------
    def _check_same(self, other: "CMatrix") -> None:
        if self._dim != other._dim:
            raise DimensionMismatch(f"dimension {self._dim} does not match {other._dim}")

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        if not isinstance(other, CMatrix):
            return NotImplemented
        self._check_same(other)
        d = self._dim
        columns = list(zip(*other._rows))
        out = []
        for row in self._rows:
            new_row = []
            for column in columns:
                acc = ZERO
                for a, b in zip(row, column):
                    if a and b:
                        acc = acc + a * b
                new_row.append(acc)
            out.append(tuple(new_row))
        return CMatrix._trusted(tuple(out))

    def __add__(self, other: "CMatrix") -> "CMatrix":
        self._check_same(other)
        return CMatrix._trusted(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)))

    def __sub__(self, other: "CMatrix") -> "CMatrix":
        self._check_same(other)
        return CMatrix._trusted(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)))

    def __neg__(self) -> "CMatrix":
        return CMatrix._trusted(tuple(tuple(-a for a in row) for row in self._rows))

    def scale(self, value: CycloLike) -> "CMatrix":
        value = as_cyclo(value)
        return CMatrix._trusted(tuple(tuple(value * a if a else ZERO for a in row) for row in self._rows))

    def kron(self, other: "CMatrix") -> "CMatrix":
        rows = []
        for row_a in self._rows:
            for row_b in other._rows:
                rows.append(tuple(a * b if a and b else ZERO for a in row_a for b in row_b))
        return CMatrix._trusted(tuple(rows))

    def transpose(self) -> "CMatrix":
        return CMatrix._trusted(tuple(zip(*self._rows)))

    def conj(self) -> "CMatrix":
        return CMatrix._trusted(tuple(tuple(a.conj() for a in row) for row in self._rows))

    def dagger(self) -> "CMatrix":
        return self.conj().transpose()

    def trace(self) -> Cyclo:
        acc = ZERO
        for i in range(self._dim):
            acc = acc + self._rows[i][i]
        return acc

    def power(self, exponent: int) -> "CMatrix":
        if exponent < 0:
            return self.inverse().power(-exponent)
        result = CMatrix.identity(self._dim)
        base = self
        while exponent:
            if exponent & 1:
                result = result @ base
            exponent >>= 1
            if exponent:
                base = base @ base
        return result

    def _eliminate(self, augment: bool):
        d = self._dim
        work = [list(row) + ([ONE if i == j else ZERO for j in range(d)] if augment else []) for i, row in enumerate(self._rows)]
        det = ONE
        for col in range(d):
            pivot = None
            for r in range(col, d):
                entry = work[r][col]
                if entry and (pivot is None or len(entry.key[1]) < len(work[pivot][col].key[1])):
                    pivot = r
            if pivot is None:
                return ZERO, None
            if pivot != col:
                work[col], work[pivot] = work[pivot], work[col]
                det = -det
            pivot_value = work[col][col]
            det = det * pivot_value
            inv = pivot_value.inverse()
            work[col] = [x * inv if x else ZERO for x in work[col]]
            for r in range(d):
                if r == col or not work[r][col]:
                    continue
                factor = work[r][col]
                work[r] = [a - factor * b if b else a for a, b in zip(work[r], work[col])]
        return det, work

    def det(self) -> Cyclo:
        return self._eliminate(augment=False)[0]

    def is_invertible(self) -> bool:
        return bool(self.det())

    def inverse(self) -> "CMatrix":
        det, work = self._eliminate(augment=True)
        if work is None:
            raise SingularGenerator(f"matrix {self.to_literals()} is singular")
        d = self._dim
        return CMatrix._trusted(tuple(tuple(row[d:]) for row in work))

    # ------------------------------------------------------------------
    # predicates
    # ------------------------------------------------------------------
    def is_scalar(self) -> bool:
        first = self._rows[0][0]
        return all((x == first) if i == j else not x for i, row in enumerate(self._rows) for j, x in enumerate(row))

    def is_identity(self) -> bool:
        return self.is_scalar() and self._rows[0][0] == ONE

    def is_diagonal(self) -> bool:
        return all(not x for i, row in enumerate(self._rows) for j, x in enumerate(row) if i != j)

    def is_generalised_permutation(self) -> bool:
        """Exactly one nonzero entry in every row and every column."""
        rows_ok = all(sum(1 for x in row if x) == 1 for row in self._rows)
        cols_ok = all(sum(1 for x in column if x) == 1 for column in zip(*self._rows))
        return rows_ok and cols_ok

    def is_hermitian(self) -> bool:
        return self == self.dagger()

    def is_unitary(self) -> bool:
        return (self @ self.dagger()).is_identity()

    def first_nonzero(self) -> Cyclo:
        for x in self.entries():
            if x:
                return x
        return ZERO

    def normalised(self) -> "CMatrix":
        """Scalar multiple whose first nonzero entry (row-major) equals 1."""
        lead = self.first_nonzero()
        if not lead or lead == ONE:
            return self
        return self.scale(lead.inverse())

    def proportionality(self, other: "CMatrix") -> Optional[Cyclo]:
        """c with self == c * other, or None."""
        self._check_same(other)
        c = None
        for a, b in zip(self.entries(), other.entries()):
            if not b:
                if a:
                    return None
                continue
            if c is None:
                c = a / b
                if not c:
                    return None
            elif a != c * b:
                return None
        return c


def kron_all(matrices: Sequence[CMatrix]) -> CMatrix:
    result = matrices[0]
    for m in matrices[1:]:
        result = result.kron(m)
    return result


# ----------------------------------------------------------------------
# gate library
# ----------------------------------------------------------------------
def pauli_x() -> CMatrix:
    return CMatrix([[0, 1], [1, 0]])


def pauli_z() -> CMatrix:
    return CMatrix.diag([1, -1])


def pauli_y() -> CMatrix:
    i = parse_cyclo("i")
    return CMatrix([[0, -i], [i, 0]])


def inverse_sqrt2() -> Cyclo:
    return parse_cyclo("1/2*w8^1 + 1/2*w8^7")


def hadamard() -> CMatrix:
    return CMatrix([[1, 1], [1, -1]]).scale(inverse_sqrt2())


def phase_gate() -> CMatrix:
    return CMatrix.diag([1, parse_cyclo("i")])


def z_root(k: int) -> CMatrix:
    """diag(1, w_{2k}), the k-th root of Z."""
    return CMatrix.diag([1, parse_cyclo(f"w{2 * k}^1")])


def t_gate() -> CMatrix:
    return z_root(4)


def controlled_z() -> CMatrix:
    return CMatrix.diag([1, 1, 1, -1])


def cnot() -> CMatrix:
    return CMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def swap() -> CMatrix:
    return CMatrix([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


GATE_LIBRARY = {
    "I": lambda: CMatrix.identity(2),
    "X": pauli_x,
    "Y": pauli_y,
    "Z": pauli_z,
    "H": hadamard,
    "P": phase_gate,
    "S": phase_gate,
    "T": t_gate,
    "CZ": controlled_z,
    "CNOT": cnot,
    "CX": cnot,
    "SWAP": swap,
}


def library_gate(name: str) -> Optional[CMatrix]:
    """Gate by library name; 'Zroot(k)' gives diag(1, w_{2k})."""
    key = name.strip()
    if key.upper() in GATE_LIBRARY:
        return GATE_LIBRARY[key.upper()]()
    if key.startswith("Zroot(") and key.endswith(")"):
        return z_root(int(key[len("Zroot("):-1]))
    return None
