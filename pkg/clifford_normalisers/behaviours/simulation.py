"""
Classical simulation of normaliser circuits.

An observable is a phase times one group element per wire. Conjugating it
by a gate that normalises G (or G (x) G) gives another such observable,
so a circuit is simulated by walking its gates backwards through
precomputed conjugation tables and evaluating a product of single-wire
matrix elements at the end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..errors import (
    AdaptiveGateRejected,
    CircuitError,
    DimensionMismatch,
    NoDilationGate,
    NotANormaliser,
    ObservableError,
)
from ..memory import RunMemory, ensure_memory
from ..models import Circuit, CircuitFile, ExpectationResult, Gate, MeasurementMarker, Observable, ObservableSpec
from ..utils.cyclotomic import ONE, ZERO, Cyclo, CycloLike, as_cyclo, parse_cyclo, root_of_unity
from ..utils.groups import MatrixGroup, tensor_square
from ..utils.matrices import CMatrix, cnot, controlled_z, inverse_sqrt2, library_gate
from .group_loading import matrix_from_spec, resolve_group
from .normaliser_search import is_linear_normaliser, is_projective_normaliser
from .phase_functions import canonical_phase


@dataclass
class ConjugationTable:
    """gate . elements[x] . gate^-1 == phases[x] * elements[images[x]]."""

    group: MatrixGroup
    phases: List[Cyclo]
    images: List[int]
    trivial: List[bool]

    def __getitem__(self, x: int) -> Tuple[Cyclo, int]:
        return self.phases[x], self.images[x]

    def __len__(self) -> int:
        return len(self.images)


def _square_of(group: MatrixGroup, memory: RunMemory) -> MatrixGroup:
    square = memory.tensor_squares.get(id(group))
    if square is None or square.base is not group:
        square = tensor_square(group, memory.settings.max_order)
        memory.tensor_squares[id(group)] = square
    return square


def _target(group: MatrixGroup, arity: int, memory: RunMemory) -> MatrixGroup:
    if arity == 1:
        return group
    if arity == 2:
        return _square_of(group, memory)
    raise CircuitError(f"gates act on one or two wires, not {arity}")


def conjugation_table(
    gate: CMatrix, group: MatrixGroup, arity: int = 1, memory: Optional[RunMemory] = None
) -> ConjugationTable:
    """
    Exact table of g -> (c, g') with gate g gate^-1 = c g' over G (arity 1)
    or G (x) G (arity 2); c is canonical, 0 <= arg c < 2 pi / s.
    """
    memory = ensure_memory(memory)
    target = _target(group, arity, memory)
    if gate.dim != target.dim:
        raise DimensionMismatch(f"gate of dimension {gate.dim} cannot act on {arity} wire(s) of dimension {group.dim}")
    inverse = gate.inverse()

    generator_images = {}
    for t in target.generator_indices:
        hit = target.lookup_projective(gate @ target.elements[t] @ inverse)
        if hit is None:
            raise NotANormaliser(
                f"{gate.to_literals()} sends {target.elements[t].to_literals()} outside "
                f"{target.name or 'the group'} up to phase"
            )
        generator_images[t] = (hit[1], hit[0])

    # conjugation is a homomorphism, so images of products are products of images
    raw: List[Optional[Tuple[Cyclo, int]]] = [None] * target.order
    raw[target.identity_index] = (ONE, target.identity_index)
    frontier = [target.identity_index]
    while frontier:
        following = []
        for x in frontier:
            c_x, i_x = raw[x]
            for t in target.generator_indices:
                y = target.product_index(x, t)
                if raw[y] is not None:
                    continue
                c_t, i_t = generator_images[t]
                raw[y] = (c_x * c_t, target.product_index(i_x, i_t))
                following.append(y)
        frontier = following

    s, _ = target.centre_min_phase
    scalar_of = {q: target.index_of(CMatrix.scalar(root_of_unity(s, q), target.dim)) for q in range(1, s)}
    phases, images, trivial = [], [], []
    for c, index in raw:
        phase, q = canonical_phase(c, s)
        if q:
            index = target.product_index(scalar_of[q], index)
        phases.append(phase)
        images.append(index)
        trivial.append(phase == ONE)
    memory.log(
        f"Conjugation table of {gate.to_literals()} over {target.name or 'group'}: {target.order} entries",
        logging.DEBUG,
    )
    return ConjugationTable(group=target, phases=phases, images=images, trivial=trivial)


def _backward_table(gate: Gate, group: MatrixGroup, memory: RunMemory) -> ConjugationTable:
    """Table of g -> U^-1 g U, memoised per distinct gate."""
    key = (gate.matrix.key, len(gate.wires), id(group))
    table = memory.conjugation_tables.get(key)
    if table is None:
        table = conjugation_table(gate.matrix.inverse(), group, len(gate.wires), memory)
        memory.conjugation_tables[key] = table
    return table


# ----------------------------------------------------------------------
# circuits
# ----------------------------------------------------------------------
def gate(spec: Union[str, CMatrix], *wires: int, mode: str = "projective", name: Optional[str] = None) -> Gate:
    """Gate from a library name or a matrix."""
    if isinstance(spec, str):
        matrix = library_gate(spec)
        if matrix is None:
            raise CircuitError(f"unknown library gate {spec!r}")
        return Gate(name=name or spec, matrix=matrix, wires=list(wires), mode=mode)
    return Gate(name=name or "custom", matrix=spec, wires=list(wires), mode=mode)


def _check_state(vector: Sequence[Cyclo], d: int, wire: int) -> None:
    if len(vector) != d:
        raise CircuitError(f"input state of wire {wire} has {len(vector)} amplitudes, expected {d}")
    norm = ZERO
    for a in vector:
        norm = norm + a * a.conj()
    if norm != 1:
        raise CircuitError(f"input state of wire {wire} has squared norm {norm}, not 1")


def _check_gate(g: Gate, group: MatrixGroup, n_wires: int, memory: RunMemory, verified: Dict[tuple, bool]) -> None:
    arity = len(g.wires)
    if any(w < 0 or w >= n_wires for w in g.wires) or len(set(g.wires)) != arity:
        raise CircuitError(f"gate {g.name} has invalid wires {g.wires} for {n_wires} wire(s)")
    target = _target(group, arity, memory)
    if g.matrix.dim != target.dim:
        raise DimensionMismatch(f"gate {g.name} is {g.matrix.dim} x {g.matrix.dim}, expected {target.dim}")
    key = (g.matrix.key, arity, g.mode)
    if key not in verified:
        if not g.matrix.is_unitary():
            raise CircuitError(f"gate {g.name} {g.matrix.to_literals()} is not unitary")
        check = is_linear_normaliser if g.mode == "linear" else is_projective_normaliser
        verified[key] = check(g.matrix, target)
    if not verified[key]:
        raise NotANormaliser(
            f"gate {g.name} {g.matrix.to_literals()} is not a {g.mode} normaliser of {target.name or 'the group'}"
        )


def make_circuit(
    group: MatrixGroup,
    inputs: Sequence[Sequence[CycloLike]],
    gates: Sequence[Gate],
    measurements: Sequence[MeasurementMarker] = (),
    memory: Optional[RunMemory] = None,
) -> Circuit:
    """A verified circuit: unit-norm inputs, every gate a normaliser of G or G (x) G."""
    memory = ensure_memory(memory)
    d = group.dim
    states = [[as_cyclo(a) for a in vector] for vector in inputs]
    if not states:
        raise CircuitError("a circuit needs at least one wire")
    for wire, vector in enumerate(states):
        _check_state(vector, d, wire)
    verified: Dict[tuple, bool] = {}
    for g in gates:
        _check_gate(g, group, len(states), memory, verified)
    for marker in measurements:
        if marker.wire >= len(states) or marker.after > len(gates):
            raise CircuitError(f"measurement on wire {marker.wire} after gate {marker.after} is out of range")
    circuit = Circuit(
        dim=d,
        n_wires=len(states),
        group=group,
        gates=list(gates),
        input=states,
        measurements=list(measurements),
    )
    memory.log(f"Circuit on {circuit.n_wires} wire(s) over {group.name or 'group'}: {len(gates)} verified gates")
    return circuit


def build_circuit(spec: CircuitFile, memory: Optional[RunMemory] = None, base_dir: Optional[Path] = None) -> Circuit:
    memory = ensure_memory(memory)
    group = resolve_group(spec.group, memory, base_dir)
    if len(spec.input) != spec.wires:
        raise CircuitError(f"circuit declares {spec.wires} wire(s) but gives {len(spec.input)} input state(s)")
    inputs = [[parse_cyclo(a) for a in vector] for vector in spec.input]

    gates = []
    for position, g in enumerate(spec.gates):
        if g.condition is not None:
            raise AdaptiveGateRejected(
                f"gate {position} ({g.name or 'inline'}) is conditioned on a measurement outcome; "
                "adaptive gate choices are not classically simulable this way"
            )
        if g.matrix is not None:
            gates.append(Gate(name=g.name or f"gate{position}", matrix=matrix_from_spec(g.matrix), wires=g.wires, mode=g.mode))
        elif g.name is not None:
            gates.append(gate(g.name, *g.wires, mode=g.mode))
        else:
            raise CircuitError(f"gate {position} has neither a name nor a matrix")

    markers = [MeasurementMarker(wire=m.wire, after=len(gates) if m.after is None else m.after) for m in spec.measure]
    return make_circuit(group, inputs, gates, markers, memory)


# ----------------------------------------------------------------------
# observables
# ----------------------------------------------------------------------
def make_observable(
    group: MatrixGroup,
    n_wires: int,
    matrix: CMatrix,
    wires: Sequence[int] = (0,),
    hermitian_wrapper: bool = False,
) -> Observable:
    """matrix on each listed wire, identity elsewhere; matrix must be in G up to phase."""
    exact = group.lookup(matrix)
    hit = (exact, ONE) if exact is not None else group.lookup_projective(matrix)
    if hit is None:
        raise ObservableError(f"observable {matrix.to_literals()} is not an element of {group.name or 'G'} up to phase")
    index, c = hit
    if any(w < 0 or w >= n_wires for w in wires) or len(set(wires)) != len(wires):
        raise ObservableError(f"observable wires {list(wires)} invalid for {n_wires} wire(s)")
    factors = [group.identity_index] * n_wires
    for w in wires:
        factors[w] = index
    return Observable(phase=c ** len(wires), factors=factors, hermitian_wrapper=hermitian_wrapper)


def observable_from_spec(spec: ObservableSpec, circuit: Circuit) -> Observable:
    if spec.matrix is not None:
        matrix = matrix_from_spec(spec.matrix)
    else:
        matrix = library_gate(spec.name)
        if matrix is None:
            raise ObservableError(f"unknown observable {spec.name!r}")
    return make_observable(circuit.group, circuit.n_wires, matrix, spec.wires, spec.hermitian_wrapper)


def propagate(
    circuit: Circuit, observable: Observable, memory: Optional[RunMemory] = None
) -> Tuple[Observable, int]:
    """(C^dagger O C, number of table lookups), one lookup per gate."""
    memory = ensure_memory(memory)
    group = circuit.group
    if len(observable.factors) != circuit.n_wires:
        raise ObservableError(f"observable has {len(observable.factors)} factors for {circuit.n_wires} wire(s)")
    square = _square_of(group, memory) if any(len(g.wires) == 2 for g in circuit.gates) else None

    local: Dict[int, ConjugationTable] = {}
    factors = list(observable.factors)
    phase = observable.phase
    lookups = 0
    for g in reversed(circuit.gates):
        table = local.get(id(g.matrix))
        if table is None:
            table = local[id(g.matrix)] = _backward_table(g, group, memory)
        if len(g.wires) == 1:
            w = g.wires[0]
            x = factors[w]
            if not table.trivial[x]:
                phase = phase * table.phases[x]
            factors[w] = table.images[x]
        else:
            a, b = g.wires
            x = square.pair_index(factors[a], factors[b])
            if not table.trivial[x]:
                phase = phase * table.phases[x]
            factors[a], factors[b] = square.factors(table.images[x])
        lookups += 1
    return Observable(phase=phase, factors=factors, hermitian_wrapper=observable.hermitian_wrapper), lookups


def _matrix_element(state: Sequence[Cyclo], matrix: CMatrix) -> Cyclo:
    total = ZERO
    for i, a in enumerate(state):
        if not a:
            continue
        row = ZERO
        for j, b in enumerate(state):
            if b and matrix[i, j]:
                row = row + matrix[i, j] * b
        total = total + a.conj() * row
    return total


def evaluate(circuit: Circuit, observable: Observable) -> Cyclo:
    """phase * prod_w <a_w| g_w |a_w> for an already propagated observable."""
    group = circuit.group
    value = observable.phase
    for w, index in enumerate(observable.factors):
        if index == group.identity_index:
            continue
        value = value * _matrix_element(circuit.input[w], group.elements[index])
        if not value:
            break
    if observable.hermitian_wrapper:
        value = value + value.conj()
    return value


def _is_hermitian(observable: Observable, group: MatrixGroup) -> bool:
    """(c (x) g_w)^dagger == c (x) g_w, factor by factor up to scalars."""
    product = observable.phase.conj()
    for index in observable.factors:
        g = group.elements[index]
        ratio = g.dagger().proportionality(g)
        if ratio is None:
            return False
        product = product * ratio
    return product == observable.phase


def _squares_to_identity(observable: Observable, group: MatrixGroup) -> bool:
    product = observable.phase * observable.phase
    for index in observable.factors:
        square = group.elements[index] @ group.elements[index]
        if not square.is_scalar():
            return False
        product = product * square[0, 0]
    return product == ONE


def expectation_of(
    circuit: Circuit, observable: Observable, memory: Optional[RunMemory] = None
) -> ExpectationResult:
    """<psi_0| C^dagger O C |psi_0> for a product input, measurements dilated first."""
    memory = ensure_memory(memory)
    if circuit.measurements:
        extra = len(circuit.measurements)
        circuit = dilate_measurements(circuit, memory)
        observable = Observable(
            phase=observable.phase,
            factors=list(observable.factors) + [circuit.group.identity_index] * extra,
            hermitian_wrapper=observable.hermitian_wrapper,
        )
    group = circuit.group
    if observable.hermitian_wrapper:
        hermitian = True
    else:
        hermitian = _is_hermitian(observable, group)
        if not hermitian:
            memory.warn("observable is not Hermitian; the expectation value is complex (use the A + A^dagger wrapper)")

    propagated, lookups = propagate(circuit, observable, memory)
    value = evaluate(circuit, propagated)
    result = ExpectationResult(
        value=value, hermitian=hermitian, gates=len(circuit.gates), lookups=lookups, propagated=propagated
    )
    if hermitian and not observable.hermitian_wrapper and _squares_to_identity(observable, group):
        result.p0 = (ONE + value) / 2
        result.p1 = (ONE - value) / 2
    memory.log(f"Expectation over {len(circuit.gates)} gates: {value} ({lookups} table lookups)")
    return result


def expectation(
    circuit: Circuit,
    target_wire: int,
    observable_matrix: CMatrix,
    memory: Optional[RunMemory] = None,
    hermitian_wrapper: bool = False,
) -> ExpectationResult:
    """Expectation of observable_matrix on target_wire after the circuit."""
    observable = make_observable(circuit.group, circuit.n_wires, observable_matrix, [target_wire], hermitian_wrapper)
    return expectation_of(circuit, observable, memory)


# ----------------------------------------------------------------------
# measurement dilation
# ----------------------------------------------------------------------
def _dilation_gate(group: MatrixGroup, memory: RunMemory) -> Tuple[Gate, List[Cyclo]]:
    """(two-wire gate, ancilla state): CNOT with |0>, else CZ with |+>."""
    if group.dim != 2:
        raise NoDilationGate(f"measurement dilation is available for qubits only, not dimension {group.dim}")
    square = _square_of(group, memory)
    if is_projective_normaliser(cnot(), square):
        return Gate(name="CNOT", matrix=cnot(), wires=[0, 1]), [ONE, ZERO]
    if is_projective_normaliser(controlled_z(), square):
        plus = inverse_sqrt2()
        return Gate(name="CZ", matrix=controlled_z(), wires=[0, 1]), [plus, plus]
    raise NoDilationGate(f"neither CNOT nor CZ normalises {square.name or 'the tensor square'}")


def dilate_measurements(circuit: Circuit, memory: Optional[RunMemory] = None) -> Circuit:
    """Replace every non-adaptive measurement by an entangling gate onto a fresh ancilla."""
    memory = ensure_memory(memory)
    if not circuit.measurements:
        return circuit
    template, ancilla_state = _dilation_gate(circuit.group, memory)
    markers = sorted(enumerate(circuit.measurements), key=lambda item: (item[1].after, item[0]))

    gates: List[Gate] = []
    inputs = [list(v) for v in circuit.input]
    cursor = 0
    for _, marker in markers:
        gates.extend(circuit.gates[cursor:marker.after])
        cursor = marker.after
        ancilla = len(inputs)
        inputs.append(list(ancilla_state))
        gates.append(Gate(name=template.name, matrix=template.matrix, wires=[marker.wire, ancilla], mode=template.mode))
    gates.extend(circuit.gates[cursor:])

    memory.log(f"Dilated {len(markers)} measurement(s) with {template.name} onto fresh ancillas")
    return Circuit(
        dim=circuit.dim,
        n_wires=len(inputs),
        group=circuit.group,
        gates=gates,
        input=inputs,
        measurements=[],
    )
