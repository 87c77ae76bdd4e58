"""
Teleportation with an irreducible unitary group as the correction set.

Alice measures wires 1 and 2 with the rank-one POVM
A_i = (d / |G|) |b_i><b_i|, |b_i> = (U_i^dagger (x) I) sum_j |jj>;
outcome i leaves Bob's wire 3 in U_i |alpha>. Everything is checked on the
unnormalised identity (A_i (x) I)|alpha>|Phi> = (d / |G|) |b_i> (x) U_i|alpha>,
which avoids square roots.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

from ..errors import InputError, NotIrreducible
from ..memory import RunMemory, ensure_memory
from ..models import TeleportationOutcome, TeleportationPOVM, TeleportationReport
from ..utils.cyclotomic import ZERO, Cyclo, CycloLike, as_cyclo
from ..utils.groups import MatrixGroup, is_irreducible
from ..utils.matrices import CMatrix


def _entangled_vector(u: CMatrix) -> List[Cyclo]:
    """(U^dagger (x) I) sum_j |jj>, i.e. the rows of U^dagger laid end to end."""
    d = u.dim
    return [u[j, i].conj() for i in range(d) for j in range(d)]


def build_teleportation_povm(group: MatrixGroup, memory: Optional[RunMemory] = None) -> TeleportationPOVM:
    memory = ensure_memory(memory)
    if not is_irreducible(group):
        raise NotIrreducible(f"{group.name or 'group'} acts reducibly; its teleportation POVM is not complete")
    for g in group.generators:
        if not g.is_unitary():
            raise InputError(f"generator {g.to_literals()} of {group.name or 'the group'} is not unitary")

    d = group.dim
    weight = Fraction(d, group.order)
    vectors, elements = [], []
    total = CMatrix.zeros(d * d)
    for u in group.elements:
        b = _entangled_vector(u)
        a = CMatrix([[weight * x * y.conj() if x and y else ZERO for y in b] for x in b])
        vectors.append(b)
        elements.append(a)
        total = total + a
    complete = total.is_identity()
    if not complete:
        memory.warn(f"teleportation POVM of {group.name or 'group'} does not sum to the identity")
    memory.log(f"Teleportation POVM of {group.name or 'group'}: {len(elements)} rank-one elements, complete={complete}")
    return TeleportationPOVM(
        elements=elements, vectors=vectors, corrections=list(group.elements), weight=weight, complete=complete
    )


def _apply(u: CMatrix, vector: Sequence[Cyclo]) -> List[Cyclo]:
    d = u.dim
    out = []
    for i in range(d):
        total = ZERO
        for j in range(d):
            if u[i, j] and vector[j]:
                total = total + u[i, j] * vector[j]
        out.append(total)
    return out


def verify_teleportation(
    group: MatrixGroup,
    state: Sequence[CycloLike],
    memory: Optional[RunMemory] = None,
    povm: Optional[TeleportationPOVM] = None,
) -> TeleportationReport:
    """Check every outcome: Bob holds U_i |alpha> and the outcome has probability 1/|G|."""
    memory = ensure_memory(memory)
    d = group.dim
    alpha = [as_cyclo(a) for a in state]
    if len(alpha) != d:
        raise InputError(f"test state has {len(alpha)} amplitudes, expected {d}")
    norm = ZERO
    for a in alpha:
        norm = norm + a * a.conj()
    if norm != 1:
        raise InputError(f"test state has squared norm {norm}, not 1")
    if povm is None:
        povm = build_teleportation_povm(group, memory)

    # |alpha>_1 (x) sum_j |jj>_23, indexed as (wires 1 and 2) * d + wire 3
    pair = d * d
    psi = [ZERO] * (pair * d)
    for a, amplitude in enumerate(alpha):
        for j in range(d):
            psi[(a * d + j) * d + j] = amplitude

    outcomes = []
    for i, (element, b, u) in enumerate(zip(povm.elements, povm.vectors, povm.corrections)):
        w = []
        for x in range(pair):
            for c in range(d):
                total = ZERO
                for y in range(pair):
                    if element[x, y] and psi[y * d + c]:
                        total = total + element[x, y] * psi[y * d + c]
                w.append(total)
        bob = _apply(u, alpha)
        expected = [povm.weight * bx * bc for bx in b for bc in bob]
        overlap = ZERO
        for p, q in zip(psi, w):
            if p and q:
                overlap = overlap + p.conj() * q
        overlap = overlap / d
        probability = overlap.as_fraction() if overlap.is_rational() else Fraction(-1)
        outcomes.append(
            TeleportationOutcome(index=i, correction=u, probability=probability, matches=w == expected)
        )

    report = TeleportationReport(
        group_name=group.name, order=group.order, complete=povm.complete, state=alpha, outcomes=outcomes
    )
    memory.log(
        f"Teleportation over {group.name or 'group'}: {sum(o.matches for o in outcomes)}/{len(outcomes)} "
        f"outcomes reproduce U_i|alpha>, all_match={report.all_match}"
    )
    return report
