import pytest

from clifford_normalisers.behaviours.classification import classify_entry, run_u2_classification
from clifford_normalisers.catalog import catalog_entries, dihedral_odd_entry, gm_entry, pauli_entry
from clifford_normalisers.errors import ClassificationMismatch
from clifford_normalisers.memory import RunMemory
from clifford_normalisers.models import CatalogEntry
from clifford_normalisers.settings import Settings
from clifford_normalisers.utils.matrices import CMatrix


def test_odd_dihedral_is_not_entangling(memory):
    row = classify_entry(dihedral_odd_entry(3), memory)
    assert row.status == "pass"
    assert row.entangling is False
    assert row.base_group == "dihedral D6 (order 6)"
    assert row.entangling_gates == []
    assert row.normaliser_count > 0


def test_wrong_order_is_quarantined(memory):
    entry = pauli_entry().model_copy(update={"gap_id": (8, 1), "classify": True})
    row = classify_entry(entry, memory)
    assert row.status == "quarantined"
    assert "16" in row.note
    assert any("quarantined" in line for line in memory.history)


def test_reducible_entry_is_an_error(memory):
    entry = CatalogEntry(
        name="reducible",
        family="cyclic",
        base_group="cyclic C2 (order 2)",
        generators=[CMatrix.diag([1, -1])],
        expected_entangling=False,
    )
    with pytest.raises(ClassificationMismatch) as excinfo:
        run_u2_classification(memory, entries=[entry])
    table = excinfo.value.table
    assert table.rows[0].status == "error"
    assert not table.passed


def test_flipped_expectation_fails_the_run(memory):
    entry = dihedral_odd_entry(3).model_copy(update={"expected_entangling": True})
    with pytest.raises(ClassificationMismatch) as excinfo:
        run_u2_classification(memory, entries=[entry])
    row = excinfo.value.table.rows[0]
    assert row.status == "fail"
    assert row.note == "expected entangling"


def test_entries_not_marked_for_classification_are_skipped(memory):
    table = run_u2_classification(memory, entries=[pauli_entry()])
    assert table.rows == []
    assert table.passed


@pytest.mark.slow
def test_small_families_pass(memory):
    table = run_u2_classification(memory, entries=[dihedral_odd_entry(3), gm_entry(1), gm_entry(2)])
    assert table.passed
    verdicts = {row.name: row.entangling for row in table.rows}
    assert verdicts == {"dihedral-odd(3)": False, "Gm(1)": True, "Gm(2)": True}
    assert all(row.entangling_gates for row in table.rows if row.entangling)


@pytest.mark.slow
def test_worker_pool_matches_serial_run():
    entries = [dihedral_odd_entry(3), dihedral_odd_entry(5), gm_entry(1)]
    serial = run_u2_classification(RunMemory(settings=Settings().apply()), entries=entries)
    pooled = run_u2_classification(RunMemory(settings=Settings(workers=2).apply()), entries=entries)
    assert [row.to_structured() for row in serial.rows] == [row.to_structured() for row in pooled.rows]


def test_quarantined_entry_fails_the_run(memory):
    entry = dihedral_odd_entry(3).model_copy(update={"gap_id": (12, 4)})
    with pytest.raises(ClassificationMismatch) as excinfo:
        run_u2_classification(memory, entries=[entry])
    table = excinfo.value.table
    assert table.rows[0].status == "quarantined"
    assert table.rows[0].entangling is None
    assert not table.passed
    assert "dihedral-odd(3) (quarantined)" in str(excinfo.value)


@pytest.mark.slow
def test_full_catalogue_run():
    memory = RunMemory(settings=Settings().apply())
    table = run_u2_classification(memory)
    assert len(table.rows) == len(catalog_entries())
    assert all(row.status == "pass" for row in table.rows), [(row.name, row.status, row.note) for row in table.rows]
    entangling = {row.name for row in table.rows if row.entangling}
    assert entangling == {"Gm(1)", "Gm(2)", "Gm(3)", "Gm(4)"}
    names = {row.name for row in table.rows}
    assert {"dihedral-odd(3)", "dihedral-odd(5)", "dihedral-odd(7)", "tetrahedral-M1", "octahedral-96-192"} <= names
