import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from clifford_normalisers.catalog import dihedral_odd_entry, entry_group, gm_entry, pauli_entry  # noqa: E402
from clifford_normalisers.memory import RunMemory  # noqa: E402
from clifford_normalisers.settings import Settings  # noqa: E402
from clifford_normalisers.utils.groups import tensor_square  # noqa: E402

SAMPLES = ROOT / "samples"


@pytest.fixture(scope="session")
def samples() -> Path:
    return SAMPLES


@pytest.fixture
def memory() -> RunMemory:
    return RunMemory(settings=Settings().apply())


@pytest.fixture(scope="session")
def pauli():
    group, _ = entry_group(pauli_entry())
    return group


@pytest.fixture(scope="session")
def xz():
    """<X, Z>, order 8."""
    group, _ = entry_group(gm_entry(1))
    return group


@pytest.fixture(scope="session")
def g2():
    """<X, diag(1, i)>, order 32."""
    group, _ = entry_group(gm_entry(2))
    return group


@pytest.fixture(scope="session")
def dihedral3():
    group, _ = entry_group(dihedral_odd_entry(3))
    return group


@pytest.fixture(scope="session")
def pauli_square(pauli):
    return tensor_square(pauli)
