from fractions import Fraction
from functools import lru_cache

import pytest

from clifford_normalisers.behaviours.teleportation import build_teleportation_povm, verify_teleportation
from clifford_normalisers.catalog import entry_group, get_entry
from clifford_normalisers.errors import InputError, NotIrreducible
from clifford_normalisers.utils.cyclotomic import I_UNIT, ONE, ZERO, Cyclo, root_of_unity
from clifford_normalisers.utils.groups import close_group
from clifford_normalisers.utils.matrices import CMatrix, inverse_sqrt2


def test_pauli_povm(pauli, memory):
    povm = build_teleportation_povm(pauli, memory)
    assert len(povm.elements) == 16
    assert povm.complete
    assert povm.weight == Fraction(1, 8)
    assert povm.corrections == list(pauli.elements)
    assert all(e.is_hermitian() for e in povm.elements)


STATES = [
    [ONE, ZERO],
    [ZERO, ONE],
    [Cyclo.rational(Fraction(3, 5)), Cyclo.rational(Fraction(4, 5))],
    [Cyclo.rational(Fraction(3, 5)), Cyclo.rational(Fraction(4, 5)) * I_UNIT],
    [inverse_sqrt2(), inverse_sqrt2() * root_of_unity(8, 1)],
]


@lru_cache(maxsize=None)
def _group(name):
    group, _ = entry_group(get_entry(name))
    return group


@pytest.mark.parametrize("name, order", [("pauli", 16), ("Gm(1)", 8), ("Gm(2)", 32), ("Gm(3)", 72)])
@pytest.mark.parametrize("state", STATES)
def test_teleportation_reproduces_every_state(name, order, state, memory):
    group = _group(name)
    report = verify_teleportation(group, state, memory)
    assert report.order == order
    assert report.all_match
    assert len(report.outcomes) == order
    assert all(o.probability == Fraction(1, order) for o in report.outcomes)


def test_g2_povm_has_one_element_per_group_element(g2, memory):
    povm = build_teleportation_povm(g2, memory)
    assert len(povm.elements) == g2.order == 32
    assert povm.complete
    report = verify_teleportation(g2, [ONE, ZERO], memory, povm=povm)
    assert report.all_match
    assert report.to_structured()["outcomes"][0]["probability"] == "1/32"


def test_reducible_group_rejected(memory):
    with pytest.raises(NotIrreducible):
        build_teleportation_povm(close_group([CMatrix.identity(2)]), memory)
    with pytest.raises(NotIrreducible):
        build_teleportation_povm(close_group([CMatrix.diag([1, -1])]), memory)


def test_non_unitary_group_rejected(xz, memory):
    e = CMatrix.from_literals([["2", "1"], ["0", "1"]])
    e_inv = e.inverse()
    skewed = close_group([e @ g @ e_inv for g in xz.generators])
    with pytest.raises(InputError):
        build_teleportation_povm(skewed, memory)


def test_bad_test_states(pauli, memory):
    with pytest.raises(InputError):
        verify_teleportation(pauli, [ONE, ONE], memory)
    with pytest.raises(InputError):
        verify_teleportation(pauli, [ONE], memory)
