"""
Linear and projective normalisers of finite matrix groups.

The search assigns every generator U_t an image U'_t in G with the same
order and spectrum, keeps commutation and product spectra consistent between
generator pairs, and solves N U_t = U'_t N for all t. Floating point only
prunes: a branch survives while the stacked constraints keep a numerical
kernel, and once that kernel is one-dimensional the remaining images are read
off N U N^-1. Every reported N is then solved for exactly over the cyclotomic
numbers and re-verified against the group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import NotIrreducible, SchurBoundViolation, SearchBudgetExceeded
from ..memory import RunMemory, ensure_memory
from ..models import ImageAssignment, NormaliserRecord, NormaliserReport, PhaseFunction, SearchStats
from ..utils.cyclotomic import root_of_unity
from ..utils.entangling import is_entangling
from ..utils.groups import MatrixGroup, conjugacy_classes, extend_by_scalars, is_irreducible, tensor_square
from ..utils.linalg import (
    independent_rows,
    kron_constraint_nullspace,
    numeric_constraint,
    numeric_nullspace,
    projective_key,
)
from ..utils.matrices import CMatrix
from .phase_functions import canonical_phase, compute_phase_functions, phase_extension_order, phase_range

SINGULAR_COND = 1e8


def search_generators(group: MatrixGroup) -> List[int]:
    """Generator indices with redundant ones greedily dropped."""
    kept: List[int] = []
    for g in group.generator_indices:
        if g != group.identity_index and g not in kept:
            kept.append(g)
    if not kept:
        return [group.identity_index]
    index = 0
    while index < len(kept) and len(kept) > 1:
        trial = kept[:index] + kept[index + 1:]
        if group.generated_size(trial) == group.order:
            kept = trial
        else:
            index += 1
    return kept


@dataclass
class _Search:
    group: MatrixGroup
    gens: List[int]
    memory: RunMemory
    irreducible: bool
    modulo_inner: bool = False
    exhaustive: bool = False
    stats: SearchStats = field(default_factory=SearchStats)
    found: List[NormaliserRecord] = field(default_factory=list)
    seen: Dict[bytes, int] = field(default_factory=dict)

    def __post_init__(self):
        settings = self.memory.settings
        self.tol = settings.numeric_tol
        self.max_assignments = settings.max_assignments
        self.full_verify_limit = settings.full_verify_limit
        self.d = self.group.dim
        self.gen_exact = [self.group.elements[g] for g in self.gens]
        self.gen_numeric = [self.group.numeric[g] for g in self.gens]
        self.candidates = self._candidates()
        self.stats.candidates_per_generator = [len(c) for c in self.candidates]

    # ------------------------------------------------------------------
    # filters
    # ------------------------------------------------------------------
    def _candidates(self) -> List[List[int]]:
        group = self.group
        everything = list(range(group.order))
        if self.exhaustive:
            return [everything for _ in self.gens]
        orders = group.element_orders
        out = []
        for t, g in enumerate(self.gens):
            signature = group.signature(g)
            chosen = [i for i in everything if orders[i] == orders[g] and group.signature(i) == signature]
            if t == 0 and self.modulo_inner:
                # conjugating by G moves the first image to its class representative
                leaders = {cls[0] for cls in conjugacy_classes(group)}
                chosen = [i for i in chosen if i in leaders]
            out.append(chosen)
        return out

    def _consistent(self, images: Sequence[int], t: int, c: int) -> bool:
        group = self.group
        for u, image in enumerate(images):
            if group.commute(self.gens[u], self.gens[t]) != group.commute(image, c):
                return False
            if group.signature(group.product_index(self.gens[u], self.gens[t])) != group.signature(
                group.product_index(image, c)
            ):
                return False
        return True

    def _count(self) -> None:
        self.stats.assignments_enumerated += 1
        if self.stats.assignments_enumerated > self.max_assignments:
            raise SearchBudgetExceeded(
                f"normaliser search on {self.group.name or 'group'} enumerated more than "
                f"{self.max_assignments} assignments (candidates per generator: "
                f"{self.stats.candidates_per_generator})"
            )

    # ------------------------------------------------------------------
    # search
    # ------------------------------------------------------------------
    def run(self) -> None:
        self._extend([], None)

    def _extend(self, images: List[int], rows: Optional[np.ndarray]) -> None:
        t = len(images)
        if t == len(self.gens):
            self._leaf(images, rows)
            return
        for c in self.candidates[t]:
            self._count()
            if self.exhaustive:
                self._extend(images + [c], None)
                continue
            if not self._consistent(images, t, c):
                continue
            block = numeric_constraint(self.gen_numeric[t], self.group.numeric[c])
            stacked = block if rows is None else np.vstack([rows, block])
            kernel = numeric_nullspace(stacked, self.tol)
            if kernel.shape[1] == 0:
                self.stats.pruned_numeric += 1
                continue
            if kernel.shape[1] == 1 and t + 1 < len(self.gens):
                completed = self._complete(images + [c], kernel[:, 0])
                if completed is None:
                    self.stats.pruned_numeric += 1
                    continue
                self._leaf(completed, None)
                continue
            self._extend(images + [c], stacked)

    def _complete(self, prefix: List[int], vector: np.ndarray) -> Optional[List[int]]:
        n = vector.reshape(self.d, self.d)
        if np.linalg.cond(n) > SINGULAR_COND:
            return None
        n_inv = np.linalg.inv(n)
        images = list(prefix)
        for u in range(len(prefix), len(self.gens)):
            image = self.group.lookup_numeric(n @ self.gen_numeric[u] @ n_inv)
            if image is None:
                return None
            images.append(image)
        return images

    def _all_rows(self, images: Sequence[int]) -> np.ndarray:
        return np.vstack(
            [numeric_constraint(u, self.group.numeric[i]) for u, i in zip(self.gen_numeric, images)]
        )

    def _leaf(self, images: List[int], rows: Optional[np.ndarray]) -> None:
        group = self.group
        pairs = [(u, group.elements[i]) for u, i in zip(self.gen_exact, images)]
        numeric_rows = None
        if not self.exhaustive:
            numeric_rows = self._all_rows(images) if rows is None else rows
            if self.modulo_inner:
                kernel = numeric_nullspace(numeric_rows, self.tol)
                if kernel.shape[1] == 1:
                    key = projective_key(kernel[:, 0].reshape(self.d, self.d))
                    if key in self.seen:
                        self.stats.duplicate_cosets += 1
                        return
        basis = self._exact_basis(pairs, numeric_rows)
        if not basis:
            return
        if len(basis) > 1:
            if self.irreducible:
                raise SchurBoundViolation(
                    f"assignment {[group.elements[i].to_literals() for i in images]} of the irreducible group "
                    f"{group.name or ''} has a {len(basis)}-dimensional intertwiner space"
                )
            self.memory.warn(
                f"{len(basis)}-dimensional intertwiner space for a reducible group; keeping one invertible element"
            )
            basis = [b for b in basis if b.is_invertible()][:1]
            if not basis:
                return
        n = basis[0].normalised()
        if not n.is_invertible():
            self.stats.singular_discarded += 1
            self.memory.warn(f"singular intertwiner {n.to_literals()} discarded")
            return
        if not self._verify(n):
            self.memory.warn(f"{n.to_literals()} failed full-group re-verification; discarded")
            return
        self.stats.verified += 1
        if self.modulo_inner:
            self._mark_coset(n)
        self.found.append(
            NormaliserRecord(
                matrix=n,
                assignment=ImageAssignment(images=list(images), matrices=[group.elements[i] for i in images]),
                generalised_permutation=n.is_generalised_permutation(),
                verified=True,
            )
        )

    def _exact_basis(self, pairs, numeric_rows: Optional[np.ndarray]) -> List[CMatrix]:
        self.stats.exact_solves += 1
        if numeric_rows is not None:
            hint = independent_rows(numeric_rows, self.d * self.d - 1)
            basis = kron_constraint_nullspace(pairs, row_hint=hint)
            if len(basis) == 1 and all(basis[0] @ u == v @ basis[0] for u, v in pairs):
                return basis
        return kron_constraint_nullspace(pairs)

    def _verify(self, n: CMatrix) -> bool:
        """
        Exact certificate: N U_t N^-1 lies in G for every generator U_t, so
        N G N^-1 is a subgroup of G of order |G|, i.e. G itself. The sweep over
        all elements repeats this exactly up to full_verify_limit and as a
        numeric cross-check above it.
        """
        group = self.group
        n_inv = n.inverse()
        if any(group.lookup(n @ g @ n_inv) is None for g in group.generators):
            return False
        if group.order <= self.full_verify_limit:
            return all(group.lookup(n @ g @ n_inv) is not None for g in group.elements)
        a = n.numeric()
        images = np.matmul(np.matmul(a, group.numeric), np.linalg.inv(a))
        return all(group.lookup_numeric(x) is not None for x in images)

    def _mark_coset(self, n: CMatrix) -> None:
        label = len(self.found)
        for array in np.matmul(self.group.numeric, n.numeric()):
            self.seen.setdefault(projective_key(array), label)


def _degenerate_report(group: MatrixGroup, report: NormaliserReport) -> NormaliserReport:
    identity = CMatrix.identity(group.dim)
    report.degenerate = True
    report.notes.append("every unitary normalises a group of scalars; only the identity is reported")
    report.found.append(
        NormaliserRecord(
            matrix=identity,
            assignment=ImageAssignment(
                images=list(group.generator_indices), matrices=[group.elements[g] for g in group.generator_indices]
            ),
            generalised_permutation=True,
            verified=True,
        )
    )
    return report


def find_normalisers(
    group: MatrixGroup,
    memory: Optional[RunMemory] = None,
    modulo_inner: bool = False,
    exhaustive: bool = False,
    target: str = "G",
    name: Optional[str] = None,
) -> NormaliserReport:
    """One normaliser per image assignment (or per coset N G with modulo_inner), first nonzero entry 1."""
    memory = ensure_memory(memory)
    report = NormaliserReport(
        group_name=name if name is not None else group.name,
        group_order=group.order,
        target=target,
        mode="linear",
        modulo_inner=modulo_inner,
    )
    if all(group.elements[g].is_scalar() for g in group.generator_indices):
        memory.log(f"{report.group_name or 'group'} consists of scalars; normaliser search skipped")
        return _degenerate_report(group, report)

    irreducible = is_irreducible(group)
    if not irreducible:
        memory.warn(f"{report.group_name or 'group'} acts reducibly; the normaliser list may be incomplete")

    gens = search_generators(group)
    search = _Search(
        group=group,
        gens=gens,
        memory=memory,
        irreducible=irreducible,
        modulo_inner=modulo_inner,
        exhaustive=exhaustive,
    )
    search.run()
    report.found = search.found
    report.search_stats = search.stats
    report.notes.append(
        "one representative per coset N G" if modulo_inner else "one representative per image assignment"
    )
    memory.log(
        f"Linear normalisers of {report.group_name or 'group'} (order {group.order}): "
        f"{len(report.found)} found, {search.stats.assignments_enumerated} assignments enumerated"
    )
    return report


# ----------------------------------------------------------------------
# projective normalisers
# ----------------------------------------------------------------------
def is_linear_normaliser(matrix: CMatrix, group: MatrixGroup) -> bool:
    if matrix.dim != group.dim or not matrix.is_invertible():
        return False
    inverse = matrix.inverse()
    return all(group.lookup(matrix @ g @ inverse) is not None for g in group.generators)


def is_projective_normaliser(matrix: CMatrix, group: MatrixGroup) -> bool:
    """N g N^-1 equals a group element up to a scalar, for every generator g."""
    if matrix.dim != group.dim or not matrix.is_invertible():
        return False
    inverse = matrix.inverse()
    return all(group.lookup_projective(matrix @ g @ inverse) is not None for g in group.generators)


def realise_projective(
    matrix: CMatrix, group: MatrixGroup, full_verify_limit: int = 200
) -> Optional[Tuple[ImageAssignment, PhaseFunction]]:
    """
    Images V_t and canonical phases f(U_t) with N U_t N^-1 = f(U_t) V_t,
    0 <= arg f(U_t) < 2 pi / s; None if N is not a projective normaliser of G.

    The generator images are found exactly and already certify N; the sweep
    over all elements is exact up to full_verify_limit and numeric above it.
    """
    s, _ = group.centre_min_phase
    inverse = matrix.inverse()
    images, phases = [], []
    for g in group.generators:
        hit = group.lookup_projective(matrix @ g @ inverse)
        if hit is None:
            return None
        index, c = hit
        phase, q = canonical_phase(c, s)
        if q:
            index = group.index_of(group.elements[index].scale(root_of_unity(s, q)))
        images.append(index)
        phases.append(phase)

    if group.order <= full_verify_limit:
        if any(group.lookup_projective(matrix @ g @ inverse) is None for g in group.elements):
            return None
    else:
        a = matrix.numeric()
        conjugated = np.matmul(np.matmul(a, group.numeric), np.linalg.inv(a))
        if any(group.lookup_projective_numeric(x) is None for x in conjugated):
            return None
    assignment = ImageAssignment(images=images, matrices=[group.elements[i] for i in images])
    return assignment, PhaseFunction(phases=phases)


def find_projective_normalisers(
    group: MatrixGroup,
    memory: Optional[RunMemory] = None,
    modulo_inner: bool = False,
    exhaustive: bool = False,
    target: str = "G",
) -> NormaliserReport:
    """Linear normalisers of G' = <phi I : phi in Phi(G)> G, re-verified directly against G."""
    memory = ensure_memory(memory)
    settings = memory.settings
    if not is_irreducible(group):
        raise NotIrreducible(f"{group.name or 'group'} acts reducibly; projective normalisers need an irreducible group")
    s, _ = group.centre_min_phase
    functions = compute_phase_functions(group, memory)
    m = phase_extension_order(functions, s)
    extended = extend_by_scalars(group, m, settings.max_order)
    memory.log(f"Scalar extension of {group.name or 'group'} by w_{m}: order {extended.order}")

    linear = find_normalisers(
        extended, memory, modulo_inner=modulo_inner, exhaustive=exhaustive, target=target, name=group.name
    )
    report = NormaliserReport(
        group_name=group.name,
        group_order=group.order,
        target=target,
        mode="projective",
        phase_functions=functions,
        phase_range=phase_range(functions, s),
        search_stats=linear.search_stats,
        degenerate=linear.degenerate,
        modulo_inner=modulo_inner,
        notes=linear.notes + [f"searched the scalar extension of order {extended.order}"],
    )
    for record in linear.found:
        realised = realise_projective(record.matrix, group, settings.full_verify_limit)
        if realised is None:
            memory.warn(f"{record.matrix.to_literals()} is not a projective normaliser of {group.name}; dropped")
            continue
        assignment, phases = realised
        report.found.append(
            NormaliserRecord(
                matrix=record.matrix,
                assignment=assignment,
                phase_function=phases,
                generalised_permutation=record.generalised_permutation,
                verified=True,
            )
        )
    memory.log(f"Projective normalisers of {group.name or 'group'}: {len(report.found)} verified")
    return report


def classify_entangling(group: MatrixGroup, memory: Optional[RunMemory] = None) -> NormaliserReport:
    """Projective normalisers of G (x) G modulo G (x) G, each flagged entangling or not."""
    memory = ensure_memory(memory)
    square = memory.tensor_squares.get(id(group))
    if square is None or square.base is not group:
        square = tensor_square(group, memory.settings.max_order)
        memory.tensor_squares[id(group)] = square
    report = find_projective_normalisers(square, memory, modulo_inner=True, target="G_tensor_G")
    for record in report.found:
        record.entangling = is_entangling(record.matrix)
    verdict = "entangling" if report.entangling else "not entangling"
    memory.log(f"{group.name or 'group'}: {verdict} ({len(report.found)} normaliser cosets of the tensor square)")
    return report


# ----------------------------------------------------------------------
# cosets of G inside a projective normaliser group
# ----------------------------------------------------------------------
def coset_closure(generators: Sequence[CMatrix], group: MatrixGroup, max_cosets: int = 10_000) -> List[CMatrix]:
    """Representatives of <generators> G modulo G and scalars; generators must normalise G projectively."""
    reps = [CMatrix.identity(group.dim)]
    keys: Dict[bytes, int] = {}

    def mark(matrix: CMatrix, label: int) -> None:
        for array in np.matmul(group.numeric, matrix.numeric()):
            keys.setdefault(projective_key(array), label)

    mark(reps[0], 0)
    frontier = [0]
    while frontier:
        following = []
        for r in frontier:
            for g in generators:
                product = (reps[r] @ g).normalised()
                if projective_key(product.numeric()) in keys:
                    continue
                if len(reps) >= max_cosets:
                    raise SearchBudgetExceeded(f"coset closure exceeds {max_cosets} cosets")
                reps.append(product)
                mark(product, len(reps) - 1)
                following.append(len(reps) - 1)
        frontier = following
    return reps


def in_coset_closure(matrix: CMatrix, reps: Sequence[CMatrix], group: MatrixGroup) -> bool:
    """Exact test that matrix = c g R for a scalar c, g in G and a representative R."""
    target = matrix.numeric()
    for r in reps:
        if group.lookup_projective_numeric(target @ np.linalg.inv(r.numeric())) is None:
            continue
        if group.lookup_projective(matrix @ r.inverse()) is not None:
            return True
    return False
