"""
Finite matrix groups over the cyclotomic numbers.

A MatrixGroup stores its elements twice: exactly (CMatrix, keyed canonically)
and as a stacked complex array. Products, inverses and conjugates of
elements are indexed through rounded numeric keys, which is sound while no
two elements share a key (checked on construction; a collision switches the
group to exact lookups). lookup and lookup_projective match arbitrary
matrices exactly.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import (
    ClosureBudgetExceeded,
    DimensionMismatch,
    NonScalarCentre,
    NotAMember,
    SingularGenerator,
    ToleranceNotMet,
)
from .cyclotomic import ONE, ZERO, Cyclo, root_of_root_of_unity, root_of_unity
from .linalg import matrix_key, projective_key
from .matrices import CMatrix

DEFAULT_MAX_ORDER = 10_000
MAX_GROUP_DIM = 4
COMMUTE_TOL = 1e-7


class MatrixGroup:
    """
    A finite group of d x d cyclotomic matrices.

    Built by close_group, tensor_square or extend_by_scalars; treat it as
    immutable. Indices into `elements` are the currency of every lookup.
    """

    def __init__(
        self,
        generators: Sequence[CMatrix],
        elements: Sequence[CMatrix],
        name: str = "",
        numeric: Optional[np.ndarray] = None,
        base: Optional["MatrixGroup"] = None,
        irreducible: Optional[bool] = None,
    ):
        if not elements:
            raise DimensionMismatch("a group needs at least one element")
        self.name = name
        self.dim = elements[0].dim
        self.elements: Tuple[CMatrix, ...] = tuple(elements)
        self._index: Dict[tuple, int] = {g.key: i for i, g in enumerate(self.elements)}
        if numeric is None:
            numeric = np.array([g.numeric() for g in self.elements], dtype=complex)
        self.numeric: np.ndarray = numeric
        self._numeric_index: Dict[bytes, int] = {}
        for i, array in enumerate(numeric):
            self._numeric_index.setdefault(matrix_key(array), i)
        self.numeric_keys_unique = len(self._numeric_index) == len(self.elements)

        identity = self._index.get(CMatrix.identity(self.dim).key)
        if identity is None:
            raise NotAMember(f"element list of {name or 'the group'} does not contain the identity")
        self.identity_index = identity
        self.generators: Tuple[CMatrix, ...] = tuple(generators)
        self.generator_indices: Tuple[int, ...] = tuple(self._exact_index(g) for g in self.generators)

        # set for tensor squares: elements[k] == base[k // R] (x) base[reps[k % R]]
        self.base = base
        self._irreducible = irreducible

        self._projective_table: Optional[Dict[bytes, List[int]]] = None
        self._orders: Optional[List[int]] = None
        self._inverses: Optional[List[int]] = None
        self._traces: Dict[int, Cyclo] = {}
        self._signatures: Dict[int, tuple] = {}
        self._comm: Dict[int, Tuple[FrozenSet[int], FrozenSet[int]]] = {}
        self._conjugations: Dict[int, List[int]] = {}
        self._scalars: Optional[List[int]] = None
        self._cosets: Optional[Tuple[List[int], List[int], List[int]]] = None
        self._rep_position: Optional[Dict[int, int]] = None
        self._centre: Optional[Tuple[List[CMatrix], int]] = None

    # ------------------------------------------------------------------
    # size and membership
    # ------------------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, matrix: CMatrix) -> bool:
        return matrix.key in self._index

    def __repr__(self) -> str:
        return f"MatrixGroup(name={self.name!r}, dim={self.dim}, order={self.order})"

    @property
    def is_tensor_square(self) -> bool:
        return self.base is not None

    def lookup(self, matrix: CMatrix) -> Optional[int]:
        """Index of matrix in the group, or None."""
        if matrix.dim != self.dim:
            return None
        return self._index.get(matrix.key)

    def lookup_numeric(self, array: np.ndarray) -> Optional[int]:
        """Index of the element numerically equal to array, or None. Not a proof of membership."""
        return self._numeric_index.get(matrix_key(array))

    def lookup_projective_numeric(self, array: np.ndarray) -> Optional[int]:
        """Index of an element numerically proportional to array, or None."""
        candidates = self._projective_candidates(array) or self._projective_scan(array)
        return candidates[0] if candidates else None

    def _exact_index(self, matrix: CMatrix) -> int:
        found = self.lookup(matrix)
        if found is None:
            raise NotAMember(f"{matrix.to_literals()} is not an element of {self.name or 'the group'}")
        return found

    def _resolve(self, array: np.ndarray, exact: Callable[[], CMatrix]) -> int:
        found = self._numeric_index.get(matrix_key(array)) if self.numeric_keys_unique else None
        if found is None:
            found = self._exact_index(exact())
        return found

    def lookup_projective(self, matrix: CMatrix) -> Optional[Tuple[int, Cyclo]]:
        """(index, c) with matrix == c * elements[index], or None."""
        if matrix.dim != self.dim:
            return None
        tried = set()
        for candidates in (self._projective_candidates(matrix.numeric()), None):
            if candidates is None:
                candidates = self._projective_scan(matrix.numeric())
            for index in candidates:
                if index in tried:
                    continue
                tried.add(index)
                c = matrix.proportionality(self.elements[index])
                if c is not None:
                    return index, c
        return None

    def _projective_candidates(self, array: np.ndarray) -> List[int]:
        if self._projective_table is None:
            table: Dict[bytes, List[int]] = {}
            for i, element in enumerate(self.numeric):
                table.setdefault(projective_key(element), []).append(i)
            self._projective_table = table
        return self._projective_table.get(projective_key(array), [])

    def _projective_scan(self, array: np.ndarray, tol: float = 1e-6) -> List[int]:
        # Cauchy-Schwarz is tight exactly for proportional matrices
        flat = self.numeric.reshape(self.order, -1)
        target = np.asarray(array).reshape(-1)
        overlaps = np.abs(flat.conj() @ target)
        norms = np.linalg.norm(flat, axis=1) * np.linalg.norm(target)
        return [int(i) for i in np.nonzero(np.abs(overlaps - norms) <= tol * norms)[0]]

    # ------------------------------------------------------------------
    # products
    # ------------------------------------------------------------------
    def index_of(self, matrix: CMatrix) -> int:
        """Index of matrix; NotAMember if it is not an element."""
        return self._exact_index(matrix)

    def generated_size(self, indices: Sequence[int]) -> int:
        """Order of the subgroup generated by the given elements."""
        seen = {self.identity_index}
        frontier = [self.identity_index]
        while frontier:
            following = []
            for x in frontier:
                for g in indices:
                    y = self.product_index(x, g)
                    if y not in seen:
                        seen.add(y)
                        following.append(y)
            frontier = following
        return len(seen)

    def product_index(self, i: int, j: int) -> int:
        return self._resolve(self.numeric[i] @ self.numeric[j], lambda: self.elements[i] @ self.elements[j])

    def inverse_index(self, i: int) -> int:
        if self._inverses is None:
            inverses = np.linalg.inv(self.numeric)
            self._inverses = [
                self._resolve(inverses[k], lambda k=k: self.elements[k].inverse()) for k in range(self.order)
            ]
        return self._inverses[i]

    def power_index(self, i: int, k: int) -> int:
        if k < 0:
            return self.power_index(self.inverse_index(i), -k)
        result = self.identity_index
        for _ in range(k % self.element_orders[i]):
            result = self.product_index(result, i)
        return result

    def conjugation_permutation(self, t: int) -> List[int]:
        """[index of t x t^-1 for every x]."""
        if t not in self._conjugations:
            t_inv = self.inverse_index(t)
            images = np.matmul(np.matmul(self.numeric[t], self.numeric), self.numeric[t_inv])
            exact_t, exact_t_inv = self.elements[t], self.elements[t_inv]
            self._conjugations[t] = [
                self._resolve(images[x], lambda x=x: exact_t @ self.elements[x] @ exact_t_inv)
                for x in range(self.order)
            ]
        return self._conjugations[t]

    # ------------------------------------------------------------------
    # element statistics
    # ------------------------------------------------------------------
    @property
    def element_orders(self) -> List[int]:
        if self._orders is None:
            orders = [0] * self.order
            for i in range(self.order):
                if orders[i]:
                    continue
                powers = [i]
                current = i
                while current != self.identity_index:
                    current = self.product_index(current, i)
                    powers.append(current)
                n = len(powers)
                # powers[k - 1] = g**k has order n / gcd(n, k)
                for k, p in enumerate(powers, 1):
                    if not orders[p]:
                        orders[p] = n // math.gcd(n, k)
            self._orders = orders
        return self._orders

    @property
    def order_index(self) -> Dict[int, List[int]]:
        index: Dict[int, List[int]] = {}
        for i, k in enumerate(self.element_orders):
            index.setdefault(k, []).append(i)
        return index

    def trace(self, i: int) -> Cyclo:
        if i not in self._traces:
            self._traces[i] = self.elements[i].trace()
        return self._traces[i]

    def signature(self, i: int) -> tuple:
        """Exact traces of g, g^2, ..., g^d: a conjugation invariant that fixes the spectrum."""
        if i not in self._signatures:
            values = []
            current = i
            for _ in range(self.dim):
                values.append(self.trace(current).key)
                current = self.product_index(current, i)
            self._signatures[i] = tuple(values)
        return self._signatures[i]

    def comm_index(self, i: int) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        """(Comm(g), NComm(g)) for g = elements[i]."""
        if i not in self._comm:
            a = self.numeric[i]
            gap = np.abs(np.matmul(a, self.numeric) - np.matmul(self.numeric, a)).max(axis=(1, 2))
            comm = frozenset(int(j) for j in np.nonzero(gap < COMMUTE_TOL)[0])
            self._comm[i] = (comm, frozenset(range(self.order)) - comm)
        return self._comm[i]

    def commute(self, i: int, j: int) -> bool:
        return j in self.comm_index(i)[0]

    # ------------------------------------------------------------------
    # scalars and cosets of the scalar subgroup
    # ------------------------------------------------------------------
    def scalar_indices(self) -> List[int]:
        if self._scalars is None:
            stack = self.numeric
            diagonal = np.einsum("gii->gi", stack)
            off = np.abs(stack - np.einsum("gi,ij->gij", diagonal, np.eye(self.dim))).max(axis=(1, 2))
            spread = np.abs(diagonal - diagonal[:, :1]).max(axis=1)
            candidates = np.nonzero((off < COMMUTE_TOL) & (spread < COMMUTE_TOL))[0]
            self._scalars = [int(i) for i in candidates if self.elements[int(i)].is_scalar()]
        return self._scalars

    def _coset_data(self) -> Tuple[List[int], List[int], List[int]]:
        if self._cosets is None:
            scalars = self.scalar_indices()
            reps: List[int] = []
            rep_of = [-1] * self.order
            scalar_of = [-1] * self.order
            for i in range(self.order):
                if rep_of[i] >= 0:
                    continue
                reps.append(i)
                for z in scalars:
                    j = self.product_index(z, i)
                    rep_of[j] = i
                    scalar_of[j] = z
            self._cosets = (reps, rep_of, scalar_of)
        return self._cosets

    def coset_representatives(self) -> List[int]:
        """Smallest index in every class of G / (scalars in G), ascending."""
        return self._coset_data()[0]

    def coset_decomposition(self, i: int) -> Tuple[int, int]:
        """(rep, z) with elements[i] == elements[z] @ elements[rep] and z scalar."""
        _, rep_of, scalar_of = self._coset_data()
        return rep_of[i], scalar_of[i]

    @property
    def centre(self) -> Tuple[List[CMatrix], int]:
        if self._centre is None:
            self._centre = compute_centre(self)
        return self._centre

    @property
    def centre_min_phase(self) -> Tuple[int, Cyclo]:
        """(s, w_s): w_s I generates the centre."""
        _, s = self.centre
        return s, root_of_unity(s, 1) if s > 1 else ONE

    # ------------------------------------------------------------------
    # tensor squares
    # ------------------------------------------------------------------
    def factors(self, k: int) -> Tuple[int, int]:
        """(a, b) with elements[k] == base[a] (x) base[b]."""
        if self.base is None:
            raise DimensionMismatch(f"{self.name or 'group'} is not a tensor square")
        reps = self.base.coset_representatives()
        return k // len(reps), reps[k % len(reps)]

    def pair_index(self, a: int, b: int) -> int:
        """Index of base[a] (x) base[b]."""
        if self.base is None:
            raise DimensionMismatch(f"{self.name or 'group'} is not a tensor square")
        base = self.base
        if self._rep_position is None:
            self._rep_position = {r: p for p, r in enumerate(base.coset_representatives())}
        rep, z = base.coset_decomposition(b)
        # a (x) z*rep == (z*a) (x) rep
        left = base.product_index(z, a)
        return left * len(self._rep_position) + self._rep_position[rep]


# ----------------------------------------------------------------------
# construction
# ----------------------------------------------------------------------
def _check_generators(generators: Sequence[CMatrix]) -> int:
    if not generators:
        raise DimensionMismatch("a group needs at least one generator")
    dim = generators[0].dim
    if dim > MAX_GROUP_DIM:
        raise DimensionMismatch(f"dimension {dim} is outside the supported 1..{MAX_GROUP_DIM}")
    for g in generators:
        if g.dim != dim:
            raise DimensionMismatch(f"generator of dimension {g.dim} among dimension-{dim} generators")
        if not g.is_invertible():
            raise SingularGenerator(f"generator {g.to_literals()} is singular")
    return dim


def close_group(generators: Sequence[CMatrix], max_order: int = DEFAULT_MAX_ORDER, name: str = "") -> MatrixGroup:
    """Breadth-first product closure; the identity is always element 0."""
    generators = list(generators)
    dim = _check_generators(generators)
    identity = CMatrix.identity(dim)
    elements = [identity]
    seen = {identity.key}
    frontier = [identity]
    while frontier:
        following = []
        for x in frontier:
            for g in generators:
                y = x @ g
                if y.key in seen:
                    continue
                if len(elements) >= max_order:
                    raise ClosureBudgetExceeded(
                        f"closure of {name or 'the generators'} exceeds {max_order} elements"
                    )
                seen.add(y.key)
                elements.append(y)
                following.append(y)
        frontier = following
    return MatrixGroup(generators, elements, name=name)


def element_order(g: CMatrix, group: MatrixGroup) -> int:
    return group.element_orders[group.index_of(g)]


def compute_centre(group: MatrixGroup) -> Tuple[List[CMatrix], int]:
    """Elements commuting with every generator, and their number s."""
    stack = group.numeric
    mask = np.ones(group.order, dtype=bool)
    for t in group.generator_indices:
        a = stack[t]
        mask &= np.abs(np.matmul(a, stack) - np.matmul(stack, a)).max(axis=(1, 2)) < COMMUTE_TOL
    centre = []
    for i in np.nonzero(mask)[0]:
        g = group.elements[int(i)]
        if all(g @ t == t @ g for t in group.generators):
            centre.append(g)
    for g in centre:
        if not g.is_scalar():
            raise NonScalarCentre(
                f"central element {g.to_literals()} of {group.name or 'the group'} is not scalar"
            )
    return centre, len(centre)


def is_irreducible(group: MatrixGroup) -> bool:
    """(1/|G|) sum |tr g|^2 == 1, evaluated exactly."""
    if group._irreducible is None:
        total = ZERO
        for i in range(group.order):
            t = group.trace(i)
            if t:
                total = total + t * t.conj()
        group._irreducible = total == Cyclo.rational(group.order)
    return group._irreducible


def tensor_square(group: MatrixGroup, max_order: int = DEFAULT_MAX_ORDER) -> MatrixGroup:
    """
    G (x) G as {g (x) r : g in G, r a representative of G / Z}.
    Pairs differing by a central scalar give the same product, so these are
    all distinct and exhaust the tensor square.
    """
    d = group.dim
    if d * d > MAX_GROUP_DIM:
        raise DimensionMismatch(f"tensor square of a dimension-{d} group is outside 1..{MAX_GROUP_DIM}")
    reps = group.coset_representatives()
    size = group.order * len(reps)
    if size > max_order:
        raise ClosureBudgetExceeded(f"tensor square of {group.name or 'the group'} has {size} > {max_order} elements")

    elements = [g.kron(group.elements[r]) for g in group.elements for r in reps]
    numeric = np.einsum("aij,bkl->abikjl", group.numeric, group.numeric[reps]).reshape(size, d * d, d * d)
    identity = CMatrix.identity(d)
    generators = [g.kron(identity) for g in group.generators] + [identity.kron(g) for g in group.generators]
    irreducible = group._irreducible
    if irreducible is None and d > 1:
        irreducible = is_irreducible(group)
    result = MatrixGroup(
        generators,
        elements,
        name=f"{group.name} (x) {group.name}" if group.name else "",
        numeric=numeric,
        base=group,
        irreducible=irreducible,
    )
    # scalars of G (x) G are exactly z (x) I for scalars z of G
    assert len(result.scalar_indices()) == len(group.scalar_indices())
    return result


def extend_by_scalars(
    group: MatrixGroup, m: int, max_order: int = DEFAULT_MAX_ORDER, name: Optional[str] = None
) -> MatrixGroup:
    """The group mu_M * G with M = lcm(m, s), listed directly from coset representatives."""
    s = len(group.scalar_indices())
    total = s * m // math.gcd(s, m)
    if total == s:
        return group
    reps = group.coset_representatives()
    size = len(reps) * total
    if size > max_order:
        raise ClosureBudgetExceeded(
            f"scalar extension of {group.name or 'the group'} by w_{total} has {size} > {max_order} elements"
        )
    roots = [root_of_unity(total, k) for k in range(total)]
    elements = [group.elements[r].scale(c) if k else group.elements[r] for r in reps for k, c in enumerate(roots)]
    phases = np.array([complex(c) for c in roots])
    numeric = (phases[None, :, None, None] * group.numeric[reps][:, None]).reshape(size, group.dim, group.dim)
    generators = list(group.generators) + [CMatrix.scalar(roots[1], group.dim)]
    return MatrixGroup(
        generators,
        elements,
        name=name if name is not None else f"{group.name}'",
        numeric=numeric,
        irreducible=group._irreducible,
    )


def unitarize(group: MatrixGroup, tol: float = 1e-9) -> Tuple[List[np.ndarray], np.ndarray]:
    """E with E g E^-1 unitary for every g, from the principal square root of sum g^dagger g."""
    stack = group.numeric
    average = np.einsum("gji,gjk->ik", stack.conj(), stack) / group.order
    e = linalg.sqrtm(average)
    e_inv = np.linalg.inv(e)
    images = np.matmul(np.matmul(e, stack), e_inv)
    residual = float(
        np.abs(np.matmul(images, np.conj(np.swapaxes(images, 1, 2))) - np.eye(group.dim)).max()
    )
    if residual > tol:
        raise ToleranceNotMet(f"unitarized {group.name or 'group'} has residual {residual:.3e} > {tol:.1e}")
    return list(images), e


def prune_generators(generators: Sequence[CMatrix], max_order: int = DEFAULT_MAX_ORDER) -> List[CMatrix]:
    """Greedily drop generators the others already generate."""
    kept = [g for g in generators if not g.is_identity()]
    if not kept:
        return list(generators[:1])
    target = close_group(kept, max_order).order
    index = 0
    while index < len(kept) and len(kept) > 1:
        trial = kept[:index] + kept[index + 1:]
        if close_group(trial, max_order).order == target:
            kept = trial
        else:
            index += 1
    return kept


def conjugacy_classes(group: MatrixGroup) -> List[List[int]]:
    """Orbits under conjugation by the generators, ordered by smallest index."""
    permutations = [group.conjugation_permutation(t) for t in group.generator_indices]
    class_of = [-1] * group.order
    classes: List[List[int]] = []
    for start in range(group.order):
        if class_of[start] >= 0:
            continue
        label = len(classes)
        class_of[start] = label
        orbit = [start]
        frontier = [start]
        while frontier:
            following = []
            for x in frontier:
                for permutation in permutations:
                    y = permutation[x]
                    if class_of[y] < 0:
                        class_of[y] = label
                        orbit.append(y)
                        following.append(y)
            frontier = following
        classes.append(sorted(orbit))
    return classes


def special_linear_companion(group: MatrixGroup, max_order: int = DEFAULT_MAX_ORDER) -> MatrixGroup:
    """Generators rescaled to determinant 1; same central quotient as the input."""
    scaled = []
    for g in group.generators:
        root = root_of_root_of_unity(g.det(), group.dim)
        scaled.append(g.scale(root.inverse()))
    name = f"{group.name} (special linear)" if group.name else ""
    return close_group(scaled, max_order, name=name)


def projectively_equal(a: MatrixGroup, b: MatrixGroup) -> bool:
    """Same elements up to scalar multiples."""
    if a.dim != b.dim:
        return False
    return all(b.lookup_projective(a.elements[r]) is not None for r in a.coset_representatives()) and all(
        a.lookup_projective(b.elements[r]) is not None for r in b.coset_representatives()
    )
