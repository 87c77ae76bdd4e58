import pytest

from clifford_normalisers.behaviours.normaliser_search import (
    classify_entangling,
    coset_closure,
    find_normalisers,
    find_projective_normalisers,
    in_coset_closure,
    is_linear_normaliser,
    is_projective_normaliser,
    realise_projective,
    search_generators,
)
from clifford_normalisers.behaviours.phase_functions import compute_phase_functions
from clifford_normalisers.catalog import dihedral_odd_extension_entry, entry_group, get_entry, gm_entry
from clifford_normalisers.errors import NotIrreducible, SearchBudgetExceeded
from clifford_normalisers.memory import RunMemory
from clifford_normalisers.settings import Settings
from clifford_normalisers.utils.cyclotomic import I_UNIT, root_of_unity
from clifford_normalisers.utils.entangling import is_entangling, is_product
from clifford_normalisers.utils.groups import close_group, tensor_square
from clifford_normalisers.utils.matrices import (
    CMatrix,
    controlled_z,
    hadamard,
    pauli_x,
    pauli_z,
    phase_gate,
    swap,
    t_gate,
)


def test_pauli_linear_normalisers(pauli, memory):
    report = find_normalisers(pauli, memory)
    assert len(report.found) == 24
    assert all(record.verified for record in report.found)
    assert hadamard().normalised() in report.matrices
    assert phase_gate() in report.matrices
    assert CMatrix.identity(2) in report.matrices
    for n in report.matrices:
        assert n.first_nonzero() == 1
        assert is_linear_normaliser(n, pauli)


def test_generator_certificate_holds_without_the_element_sweep(pauli):
    memory = RunMemory(settings=Settings(full_verify_limit=0).apply())
    report = find_normalisers(pauli, memory)
    assert len(report.found) == 24
    assert all(record.verified for record in report.found)
    for n in report.matrices:
        assert is_linear_normaliser(n, pauli)


def test_pauli_normalisers_modulo_inner(pauli, memory):
    report = find_normalisers(pauli, memory, modulo_inner=True)
    assert len(report.found) == 6
    assert report.search_stats.assignments_enumerated > 0


def test_search_keeps_needed_generators(pauli, xz):
    assert len(search_generators(pauli)) == 3
    assert len(search_generators(xz)) == 2


def test_exhaustive_search_agrees_with_pruned(xz, memory):
    pruned = find_normalisers(xz, memory)
    exhaustive = find_normalisers(xz, memory, exhaustive=True)
    assert len(pruned.found) == 8
    assert {n.key for n in pruned.matrices} == {n.key for n in exhaustive.matrices}
    assert exhaustive.search_stats.assignments_enumerated >= pruned.search_stats.assignments_enumerated


def test_scalar_group_is_degenerate(memory):
    group = close_group([CMatrix.scalar(I_UNIT, 2)])
    report = find_normalisers(group, memory)
    assert report.degenerate
    assert report.matrices == [CMatrix.identity(2)]


def test_assignment_budget(pauli):
    memory = RunMemory(settings=Settings(max_assignments=3))
    with pytest.raises(SearchBudgetExceeded):
        find_normalisers(pauli, memory)


def test_projective_normalisers_of_xz(xz, memory):
    report = find_projective_normalisers(xz, memory)
    assert report.mode == "projective"
    assert len(report.phase_functions) == 4
    assert phase_gate() in report.matrices
    assert all(record.phase_function is not None for record in report.found)
    assert any(not record.phase_function.is_trivial for record in report.found)


def test_projective_search_needs_irreducible_group(memory):
    with pytest.raises(NotIrreducible):
        find_projective_normalisers(close_group([CMatrix.diag([1, -1])]), memory)


def test_projective_membership(pauli, g2):
    assert is_projective_normaliser(t_gate(), g2)
    assert not is_projective_normaliser(t_gate(), pauli)
    assert not is_projective_normaliser(CMatrix.identity(4), pauli)


def test_realise_projective_phase_window(xz):
    assignment, phases = realise_projective(phase_gate(), xz)
    # S X S^-1 = i XZ and S Z S^-1 = Z
    assert phases.phases == [I_UNIT, 1]
    assert assignment.matrices == [pauli_x() @ pauli_z(), pauli_z()]
    assert realise_projective(t_gate(), xz) is None


def test_clifford_cosets_of_pauli(pauli):
    reps = coset_closure([hadamard(), phase_gate()], pauli)
    assert len(reps) == 6
    assert in_coset_closure(hadamard() @ phase_gate() @ pauli_x(), reps, pauli)
    assert not in_coset_closure(t_gate(), reps, pauli)


@pytest.mark.slow
def test_xz_tensor_square_has_entangling_normalisers(xz, memory):
    report = classify_entangling(xz, memory)
    assert report.target == "G_tensor_G"
    assert report.entangling
    assert any(record.entangling for record in report.found)


def test_pauli_projective_normalisers_generate_the_clifford_cosets(pauli, memory):
    report = find_projective_normalisers(pauli, memory)
    reps = coset_closure(report.matrices, pauli)
    assert len(reps) == 6
    assert in_coset_closure(hadamard(), reps, pauli)
    assert in_coset_closure(phase_gate(), reps, pauli)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_gm_root_of_z_is_a_projective_normaliser(m, memory):
    group, _ = entry_group(gm_entry(m))
    report = find_projective_normalisers(group, memory)
    root = CMatrix.diag([1, root_of_unity(4 * m, 1)])
    assert root in report.matrices
    assert is_projective_normaliser(root, group)


def test_perfect_group_has_only_the_trivial_phase_function(memory):
    group, quarantined = entry_group(get_entry("dodecahedral-120-5-rep1"))
    if quarantined:
        pytest.skip("catalogue entry closes to an unexpected order")
    functions = compute_phase_functions(group, memory)
    assert len(functions) == 1
    assert functions[0].is_trivial


@pytest.mark.slow
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_gm_square_normalisers_come_from_cz_swap_and_local_gates(m, memory):
    group, _ = entry_group(gm_entry(m))
    report = classify_entangling(group, memory)
    assert report.entangling
    square = tensor_square(group)
    assert is_projective_normaliser(controlled_z(), square)
    identity = CMatrix.identity(2)
    local = find_projective_normalisers(group, memory, modulo_inner=True).matrices
    generators = [controlled_z(), swap()] + [n.kron(identity) for n in local] + [identity.kron(n) for n in local]
    reps = coset_closure(generators, square)
    assert all(in_coset_closure(n, reps, square) for n in report.matrices)


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_dihedral_square_normalisers_are_local_permutations(n, memory):
    group, _ = entry_group(dihedral_odd_extension_entry(n))
    report = classify_entangling(group, memory)
    assert report.found
    assert not report.entangling
    for record in report.found:
        assert record.generalised_permutation
        assert record.matrix.is_generalised_permutation()
        assert record.entangling is False
    square = tensor_square(group)
    products = (matrix @ g for matrix in report.matrices for g in square)
    diagonal = [product for product in products if product.is_diagonal()]
    assert diagonal
    for matrix in diagonal:
        assert is_product(matrix)
        assert not is_entangling(matrix)
