from fractions import Fraction

import pytest

from clifford_normalisers.behaviours.normaliser_search import find_projective_normalisers
from clifford_normalisers.behaviours.phase_functions import (
    canonical_phase,
    compute_phase_functions,
    phase_extension_order,
    phase_range,
    phase_values,
    relator_vectors,
    root_order,
)
from clifford_normalisers.catalog import entry_group, get_entry
from clifford_normalisers.models import PhaseFunction
from clifford_normalisers.utils.cyclotomic import I_UNIT, ONE, Cyclo, root_of_unity


@pytest.mark.parametrize(
    "value, s, expected",
    [
        (I_UNIT, 4, (ONE, 1)),
        (root_of_unity(8, 1), 4, (root_of_unity(8, 1), 0)),
        (root_of_unity(8, 3), 4, (root_of_unity(8, 1), 1)),
        (-ONE, 1, (-ONE, 0)),
        (ONE, 6, (ONE, 0)),
    ],
)
def test_canonical_phase(value, s, expected):
    c, q = canonical_phase(value, s)
    assert (c, q) == expected
    assert c * root_of_unity(s, 1) ** q == value


def test_canonical_phase_rejects_non_roots():
    with pytest.raises(ValueError):
        canonical_phase(Cyclo.rational(2), 4)
    with pytest.raises(ValueError):
        root_order(Cyclo.rational(Fraction(1, 2)))


def test_root_order():
    assert root_order(ONE) == 1
    assert root_order(I_UNIT) == 4
    assert root_order(root_of_unity(12, 8)) == 3


def test_xz_admits_four_phase_functions(xz, memory):
    functions = compute_phase_functions(xz, memory)
    assert len(functions) == 4
    assert functions[0].is_trivial
    assert not any(f.is_trivial for f in functions[1:])
    assert set(phase_values(functions)) == {ONE, I_UNIT}
    assert phase_extension_order(functions, 2) == 4
    assert any("Phase functions" in line for line in memory.history)


def test_odd_dihedral_phase_functions(dihedral3):
    functions = compute_phase_functions(dihedral3)
    assert len(functions) == 2
    assert [f.phases[0] for f in functions] == [ONE, ONE]
    assert [f.phases[1] for f in functions] == [ONE, -ONE]
    assert phase_extension_order(functions, 1) == 2


def test_pauli_phase_functions_are_canonical(pauli):
    s, _ = pauli.centre_min_phase
    for f in compute_phase_functions(pauli):
        for phase in f.phases:
            c, q = canonical_phase(phase, s)
            assert q == 0 and c == phase


def test_relator_vectors_shape(xz):
    relators = relator_vectors(xz)
    assert relators.shape[1] == len(xz.generators)
    assert relators.shape[0] > 0


W3 = root_of_unity(3, 1)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("tetrahedral-M1", [ONE, W3, W3 * W3]),
        ("tetrahedral-M2", [ONE, W3, W3 * W3]),
        ("tetrahedral-M3", [ONE, W3, W3 * W3]),
        ("octahedral-48-29", [ONE, I_UNIT]),
        ("dodecahedral-120-5-rep1", [ONE]),
        ("dodecahedral-120-5-rep2", [ONE]),
        ("dihedral-odd(3)", [ONE, -ONE]),
        ("dihedral-odd(5)", [ONE, -ONE]),
        ("dihedral-odd(7)", [ONE, -ONE]),
    ],
)
def test_catalogue_phase_ranges(name, expected, memory):
    group, quarantined = entry_group(get_entry(name))
    assert not quarantined
    s, _ = group.centre_min_phase
    functions = compute_phase_functions(group, memory)
    assert functions[0].is_trivial
    assert phase_range(functions, s) == expected


def test_phase_range_folds_the_centre_back():
    # with centre {1, -1} the canonical window holds w6, which is -w3^2
    values = [PhaseFunction(phases=[ONE, root_of_unity(6, 1)]), PhaseFunction(phases=[W3, ONE])]
    assert phase_range(values, 2) == [ONE, W3, W3 * W3]
    assert phase_range(values, 1) == [ONE, W3, root_of_unity(6, 1)]


def test_tetrahedral_report_carries_the_range(memory):
    group, _ = entry_group(get_entry("tetrahedral-M1"))
    report = find_projective_normalisers(group, memory)
    assert report.to_structured()["phase_range"] == ["1", "w3^1", "w3^2"]
