import time

import numpy as np
import pytest

from clifford_normalisers.behaviours.group_loading import load_circuit_file
from clifford_normalisers.behaviours.simulation import (
    build_circuit,
    conjugation_table,
    dilate_measurements,
    expectation,
    expectation_of,
    gate,
    make_circuit,
    make_observable,
    observable_from_spec,
    propagate,
)
from clifford_normalisers.errors import (
    AdaptiveGateRejected,
    CircuitError,
    NoDilationGate,
    NotANormaliser,
    ObservableError,
)
from clifford_normalisers.models import CircuitFile, GateSpec, MeasurementMarker
from clifford_normalisers.utils.cyclotomic import I_UNIT, ONE, ZERO, root_of_unity
from clifford_normalisers.utils.groups import close_group
from clifford_normalisers.utils.matrices import (
    CMatrix,
    cnot,
    controlled_z,
    hadamard,
    inverse_sqrt2,
    kron_all,
    pauli_x,
    pauli_y,
    pauli_z,
    phase_gate,
    t_gate,
)

R = inverse_sqrt2()
ZERO_KET = [ONE, ZERO]
ONE_KET = [ZERO, ONE]
PLUS = [R, R]
PLUS_I = [R, R * I_UNIT]


# ----------------------------------------------------------------------
# dense oracle
# ----------------------------------------------------------------------
def _apply(state, matrix, wires, n, d=2):
    k = len(wires)
    psi = state.reshape([d] * n)
    op = matrix.reshape([d] * (2 * k))
    psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(wires)))
    psi = np.moveaxis(psi, list(range(k)), list(wires))
    return psi.reshape(-1)


def _full(matrix, wires, n, d=2):
    basis = np.eye(d ** n, dtype=complex)
    return np.array([_apply(column, matrix, wires, n, d) for column in basis]).T


def _product_state(inputs):
    state = np.array([1.0 + 0j])
    for vector in inputs:
        state = np.kron(state, np.array([complex(a) for a in vector]))
    return state


def _dense_measured_expectation(circuit, matrix, wires):
    """Density-matrix run with a Z-basis dephasing at every marker."""
    n = circuit.n_wires
    psi = _product_state(circuit.input)
    rho = np.outer(psi, psi.conj())
    projectors = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]

    def dephase(rho, wire):
        return sum(_full(p, [wire], n) @ rho @ _full(p, [wire], n) for p in projectors)

    for position in range(len(circuit.gates) + 1):
        for marker in circuit.measurements:
            if marker.after == position:
                rho = dephase(rho, marker.wire)
        if position < len(circuit.gates):
            g = circuit.gates[position]
            u = _full(g.matrix.numeric(), g.wires, n)
            rho = u @ rho @ u.conj().T
    observable = np.eye(2 ** n, dtype=complex)
    for w in wires:
        observable = _full(matrix.numeric(), [w], n) @ observable
    return np.trace(observable @ rho)


def _exact_apply(state, matrix, wires, n):
    """Exact dense action; wire 0 is the most significant bit."""
    k = len(wires)
    out = [ZERO] * len(state)
    for index, amplitude in enumerate(state):
        if amplitude.is_zero():
            continue
        bits = [(index >> (n - 1 - w)) & 1 for w in range(n)]
        column = 0
        for w in wires:
            column = 2 * column + bits[w]
        for row in range(2 ** k):
            entry = matrix[row, column]
            if entry.is_zero():
                continue
            for position, w in enumerate(wires):
                bits[w] = (row >> (k - 1 - position)) & 1
            target = 0
            for bit in bits:
                target = 2 * target + bit
            out[target] = out[target] + entry * amplitude
    return out


def _exact_expectation(circuit, matrix, wires):
    n = circuit.n_wires
    state = [ONE]
    for vector in circuit.input:
        state = [a * b for a in state for b in vector]
    for g in circuit.gates:
        state = _exact_apply(state, g.matrix, g.wires, n)
    observed = state
    for w in wires:
        observed = _exact_apply(observed, matrix, [w], n)
    total = ZERO
    for a, b in zip(state, observed):
        total = total + a.conj() * b
    return total


# ----------------------------------------------------------------------
# conjugation tables
# ----------------------------------------------------------------------
def test_hadamard_table(pauli, memory):
    table = conjugation_table(hadamard(), pauli, memory=memory)
    assert len(table) == pauli.order
    assert table[pauli.index_of(pauli_z())] == (ONE, pauli.index_of(pauli_x()))
    assert table[pauli.index_of(pauli_x())] == (ONE, pauli.index_of(pauli_z()))
    assert sorted(table.images) == list(range(pauli.order))
    assert all(table.trivial)


def test_phase_gate_table_carries_phase(xz, memory):
    table = conjugation_table(phase_gate(), xz, memory=memory)
    phase, image = table[xz.index_of(pauli_x())]
    assert phase == I_UNIT
    assert xz.elements[image] == pauli_x() @ pauli_z()
    assert not table.trivial[xz.index_of(pauli_x())]
    assert table[xz.index_of(pauli_z())] == (ONE, xz.index_of(pauli_z()))


def test_table_entries_match_direct_conjugation(g2, memory):
    u = t_gate()
    u_inv = u.inverse()
    table = conjugation_table(u, g2, memory=memory)
    for x in range(g2.order):
        phase, image = table[x]
        assert u @ g2.elements[x] @ u_inv == g2.elements[image].scale(phase)


def test_controlled_z_table(pauli, memory):
    table = conjugation_table(controlled_z(), pauli, arity=2, memory=memory)
    square = table.group
    x, z, i = pauli.index_of(pauli_x()), pauli.index_of(pauli_z()), pauli.identity_index
    phase, image = table[square.pair_index(x, i)]
    assert phase == ONE
    assert square.elements[image] == pauli_x().kron(pauli_z())
    phase, image = table[square.pair_index(z, i)]
    assert square.elements[image].scale(phase) == pauli_z().kron(CMatrix.identity(2))


def test_non_normaliser_table_raises(pauli, memory):
    with pytest.raises(NotANormaliser):
        conjugation_table(t_gate(), pauli, memory=memory)


def test_conjugation_tables_hold_on_random_elements(pauli, g2, memory):
    cases = [
        (hadamard(), pauli, 1),
        (phase_gate(), pauli, 1),
        (phase_gate(), g2, 1),
        (t_gate(), g2, 1),
        (pauli_x(), g2, 1),
        (controlled_z(), pauli, 2),
        (cnot(), pauli, 2),
        (controlled_z(), g2, 2),
    ]
    tables = [(u, u.inverse(), conjugation_table(u, group, arity, memory)) for u, group, arity in cases]
    rng = np.random.default_rng(11)
    for _ in range(1000):
        u, u_inv, table = tables[rng.integers(0, len(tables))]
        x = int(rng.integers(0, table.group.order))
        phase, image = table[x]
        assert u @ table.group.elements[x] @ u_inv == table.group.elements[image].scale(phase)


# ----------------------------------------------------------------------
# exact expectation values
# ----------------------------------------------------------------------
def test_empty_circuit(pauli, memory):
    circuit = make_circuit(pauli, [ZERO_KET], [], memory=memory)
    result = expectation(circuit, 0, pauli_z(), memory)
    assert result.value == 1
    assert result.p0 == 1 and result.p1 == 0
    assert expectation(circuit, 0, pauli_x(), memory).value == 0


def test_single_hadamard(pauli, memory):
    circuit = make_circuit(pauli, [ZERO_KET], [gate("H", 0)], memory=memory)
    assert expectation(circuit, 0, pauli_x(), memory).value == 1
    result = expectation(circuit, 0, pauli_z(), memory)
    assert result.value == 0
    assert result.p0 == ONE / 2
    assert result.lookups == 1


def test_product_of_plus_states_propagates_to_x_x(pauli, memory):
    circuit = make_circuit(
        pauli, [ZERO_KET, ZERO_KET], [gate("H", 0), gate("CZ", 0, 1), gate("H", 1)], memory=memory
    )
    observable = make_observable(pauli, 2, pauli_z(), [1])
    propagated, lookups = propagate(circuit, observable, memory)
    assert lookups == 3
    back = kron_all([pauli.elements[i] for i in propagated.factors]).scale(propagated.phase)
    assert back == pauli_x().kron(pauli_x())
    assert expectation_of(circuit, observable, memory).value == 0

    propagated, _ = propagate(circuit, make_observable(pauli, 2, pauli_z(), [0]), memory)
    back = kron_all([pauli.elements[i] for i in propagated.factors]).scale(propagated.phase)
    assert back == pauli_x().kron(CMatrix.identity(2))


def test_bell_circuit_sample(samples, memory):
    spec = load_circuit_file(samples / "bell.circ")
    circuit = build_circuit(spec, memory, samples)
    result = expectation_of(circuit, observable_from_spec(spec.observable, circuit), memory)
    assert result.value == 1
    assert result.hermitian
    assert result.p0 == 1 and result.p1 == 0
    xx = make_observable(circuit.group, 2, pauli_x(), [0, 1])
    assert expectation_of(circuit, xx, memory).value == 1
    assert expectation(circuit, 0, pauli_z(), memory).value == 0


def test_complex_input_amplitudes(pauli, memory):
    circuit = make_circuit(pauli, [PLUS_I], [], memory=memory)
    assert expectation(circuit, 0, pauli_y(), memory).value == 1
    circuit = make_circuit(pauli, [PLUS_I], [gate("S", 0)], memory=memory)
    assert expectation(circuit, 0, pauli_x(), memory).value == -1


def _random_circuit(rng, n, names, n_gates, states):
    inputs = [states[k] for k in rng.integers(0, len(states), size=n)]
    gates = []
    for _ in range(n_gates):
        name = names[rng.integers(0, len(names))]
        if name in ("CZ", "CNOT"):
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(gate(name, int(a), int(b)))
        else:
            gates.append(gate(name, int(rng.integers(0, n))))
    return inputs, gates


def _random_observable(rng, n):
    matrix = [pauli_x(), pauli_y(), pauli_z()][rng.integers(0, 3)]
    size = int(rng.integers(1, n + 1))
    wires = sorted(int(w) for w in rng.choice(n, size=size, replace=False))
    return matrix, wires


@pytest.mark.parametrize("seed", range(100))
def test_random_pauli_circuits_match_exact_dense_simulation(pauli, memory, seed):
    rng = np.random.default_rng(seed)
    n = 3
    inputs, gates = _random_circuit(rng, n, ["H", "S", "X", "Z", "CZ", "CNOT"], 20, [ZERO_KET, ONE_KET, PLUS, PLUS_I])
    circuit = make_circuit(pauli, inputs, gates, memory=memory)
    for _ in range(3):
        matrix, wires = _random_observable(rng, n)
        result = expectation_of(circuit, make_observable(pauli, n, matrix, wires), memory)
        assert result.value == _exact_expectation(circuit, matrix, wires)


@pytest.mark.parametrize("seed", range(100, 200))
def test_random_g2_circuits_match_exact_dense_simulation(g2, memory, seed):
    rng = np.random.default_rng(seed)
    n = 2
    states = [ZERO_KET, ONE_KET, PLUS, [R, R * root_of_unity(8, 1)]]
    inputs, gates = _random_circuit(rng, n, ["T", "S", "X", "Z", "CZ"], 16, states)
    circuit = make_circuit(g2, inputs, gates, memory=memory)
    for _ in range(3):
        matrix, wires = _random_observable(rng, n)
        result = expectation_of(circuit, make_observable(g2, n, matrix, wires), memory)
        assert result.value == _exact_expectation(circuit, matrix, wires)


def test_tables_are_reused_across_runs(pauli, memory):
    circuit = make_circuit(pauli, [ZERO_KET], [gate("H", 0), gate("S", 0), gate("H", 0)], memory=memory)
    expectation(circuit, 0, pauli_z(), memory)
    cached = len(memory.conjugation_tables)
    expectation(circuit, 0, pauli_x(), memory)
    assert len(memory.conjugation_tables) == cached == 2


def test_non_hermitian_observable(pauli, memory):
    circuit = make_circuit(pauli, [PLUS_I], [], memory=memory)
    xz = pauli_x() @ pauli_z()
    result = expectation(circuit, 0, xz, memory)
    assert result.value == -I_UNIT
    assert not result.hermitian
    assert result.p0 is None
    assert any("not Hermitian" in line for line in memory.history)

    wrapped = expectation(circuit, 0, xz, memory, hermitian_wrapper=True)
    assert wrapped.value == 0
    assert wrapped.hermitian


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------
def test_gate_outside_the_normaliser(pauli, xz, memory):
    with pytest.raises(NotANormaliser):
        make_circuit(pauli, [ZERO_KET], [gate("T", 0)], memory=memory)
    with pytest.raises(NotANormaliser):
        make_circuit(xz, [ZERO_KET], [gate("S", 0, mode="linear")], memory=memory)
    make_circuit(xz, [ZERO_KET], [gate("S", 0)], memory=memory)


def test_invalid_circuits(pauli, memory):
    with pytest.raises(CircuitError):
        make_circuit(pauli, [[ONE, ONE]], [], memory=memory)
    with pytest.raises(CircuitError):
        make_circuit(pauli, [ZERO_KET], [gate("H", 1)], memory=memory)
    with pytest.raises(CircuitError):
        make_circuit(pauli, [ZERO_KET, ZERO_KET], [gate("CZ", 0, 0)], memory=memory)
    with pytest.raises(CircuitError):
        make_circuit(pauli, [ZERO_KET], [gate(pauli_x().scale(2), 0)], memory=memory)
    with pytest.raises(CircuitError):
        make_circuit(pauli, [ZERO_KET], [], [MeasurementMarker(wire=0, after=2)], memory=memory)
    with pytest.raises(CircuitError):
        gate("nonsense", 0)


def test_adaptive_gate_rejected(memory):
    spec = CircuitFile(
        group="pauli",
        wires=1,
        input=[["1", "0"]],
        gates=[GateSpec(name="X", wires=[0], condition={"wire": 0, "outcome": 1})],
    )
    with pytest.raises(AdaptiveGateRejected):
        build_circuit(spec, memory)


def test_observable_outside_group(pauli):
    with pytest.raises(ObservableError):
        make_observable(pauli, 1, hadamard())
    with pytest.raises(ObservableError):
        make_observable(pauli, 1, pauli_z(), [1])


# ----------------------------------------------------------------------
# measurement dilation
# ----------------------------------------------------------------------
def test_pauli_dilation_uses_cnot(pauli, memory):
    circuit = make_circuit(pauli, [ZERO_KET], [gate("H", 0)], [MeasurementMarker(wire=0, after=1)], memory=memory)
    dilated = dilate_measurements(circuit, memory)
    assert dilated.n_wires == 2
    assert dilated.gates[-1].matrix == cnot()
    assert dilated.gates[-1].wires == [0, 1]
    assert dilated.input[1] == ZERO_KET
    assert dilated.measurements == []


def test_g2_dilation_falls_back_to_cz(g2, memory):
    circuit = make_circuit(g2, [ZERO_KET], [], [MeasurementMarker(wire=0, after=0)], memory=memory)
    dilated = dilate_measurements(circuit, memory)
    assert dilated.gates[0].matrix == controlled_z()
    assert dilated.input[1] == PLUS


def test_dilation_needs_qubits(memory):
    group = close_group([CMatrix.scalar(I_UNIT, 1)])
    circuit = make_circuit(group, [[ONE]], [], [MeasurementMarker(wire=0, after=0)], memory=memory)
    with pytest.raises(NoDilationGate):
        dilate_measurements(circuit, memory)


def test_measured_sample(samples, memory):
    spec = load_circuit_file(samples / "measured.circ")
    circuit = build_circuit(spec, memory, samples)
    observable = observable_from_spec(spec.observable, circuit)
    assert expectation_of(circuit, observable, memory).value == 0
    unmeasured = circuit.model_copy(update={"measurements": []})
    assert expectation_of(unmeasured, observable, memory).value == 1


@pytest.mark.parametrize("group_name", ["pauli", "g2"])
def test_measured_circuits_match_density_matrices(request, memory, group_name):
    group = request.getfixturevalue(group_name)
    gates = [gate("S", 1), gate("X", 0), gate("CZ", 0, 1), gate("S", 0), gate("CZ", 0, 1), gate("Z", 1)]
    if group_name == "pauli":
        gates = [gate("H", 0)] + gates + [gate("H", 1), gate("CNOT", 1, 0), gate("H", 0)]
    markers = [MeasurementMarker(wire=1, after=3), MeasurementMarker(wire=0, after=3), MeasurementMarker(wire=1, after=5)]
    inputs = [PLUS, [R, R * root_of_unity(8, 3)]] if group_name == "g2" else [ZERO_KET, PLUS_I]
    circuit = make_circuit(group, inputs, gates, markers, memory=memory)
    for matrix in (pauli_x(), pauli_y(), pauli_z()):
        for wires in ([0], [1], [0, 1]):
            result = expectation_of(circuit, make_observable(group, 2, matrix, wires), memory)
            expected = _dense_measured_expectation(circuit, matrix, wires)
            assert abs(complex(result.value) - expected) < 1e-9


# ----------------------------------------------------------------------
# scaling
# ----------------------------------------------------------------------
@pytest.mark.slow
def test_doubling_a_wide_circuit_at_most_doubles_the_time(pauli, memory):
    n = 50
    rng = np.random.default_rng(0)
    inputs, block = _random_circuit(rng, n, ["H", "S", "X", "Z", "CZ", "CNOT"], 1000, [ZERO_KET, PLUS])
    observable = make_observable(pauli, n, pauli_z(), list(range(0, n, 7)))

    def timed(repeats):
        circuit = make_circuit(pauli, inputs, block * repeats, memory=memory)
        best = float("inf")
        for _ in range(3):
            start = time.perf_counter()
            expectation_of(circuit, observable, memory)
            best = min(best, time.perf_counter() - start)
        return best

    timed(1)
    small = timed(100)
    large = timed(200)
    assert large / small <= 2.2
