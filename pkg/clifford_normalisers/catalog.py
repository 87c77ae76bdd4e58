"""
Finite subgroups of U(2) used as teleportation groups.

Fixed entries are covering-group representations whose central quotients
are the tetrahedral, octahedral and icosahedral groups, listed by their
SmallGroup ids. Families (dihedral, binary dihedral, G_m) are built from
parameters. Entries are data: a closure whose order disagrees with the
recorded id marks the entry quarantined instead of being patched.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import CatalogError
from .models import CatalogEntry
from .utils.cyclotomic import ONE, Cyclo, root_of_unity
from .utils.groups import DEFAULT_MAX_ORDER, MatrixGroup, close_group
from .utils.matrices import CMatrix, inverse_sqrt2, pauli_x, pauli_z

TETRAHEDRAL = "tetrahedral A4 (order 12)"
OCTAHEDRAL = "octahedral S4 (order 24)"
ICOSAHEDRAL = "icosahedral A5 (order 60)"


def _m(rows: Sequence[Sequence[str]], scale: Optional[Cyclo] = None) -> CMatrix:
    matrix = CMatrix.from_literals(rows)
    return matrix if scale is None else matrix.scale(scale)


def _diag(*values: Cyclo) -> CMatrix:
    return CMatrix.diag(list(values))


def _w(n: int, k: int = 1) -> Cyclo:
    return root_of_unity(n, k)


# ----------------------------------------------------------------------
# fixed entries
# ----------------------------------------------------------------------
def _tetrahedral_m1() -> CatalogEntry:
    # SmallGroup [24,3] = SL(2,3)
    return CatalogEntry(
        name="tetrahedral-M1",
        family="tetrahedral",
        gap_id=(24, 3),
        base_group=TETRAHEDRAL,
        generators=[
            _m([["w8^1", "w8^1"], ["w8^3", "w8^7"]], inverse_sqrt2()),
            _m([["-i", "0"], ["0", "i"]]),
        ],
        expected_entangling=False,
        expected_phase_range="powers of w3",
        source="tetrahedral covering group, first representation",
    )


def _tetrahedral_m2() -> CatalogEntry:
    return CatalogEntry(
        name="tetrahedral-M2",
        family="tetrahedral",
        gap_id=(24, 3),
        base_group=TETRAHEDRAL,
        generators=[
            _m([["w24^11", "w24^11"], ["w24^17", "w24^5"]], inverse_sqrt2()),
            _m([["-i", "0"], ["0", "i"]]),
        ],
        expected_entangling=False,
        expected_phase_range="powers of w3",
        source="tetrahedral covering group, second representation",
    )


def _tetrahedral_m3() -> CatalogEntry:
    return CatalogEntry(
        name="tetrahedral-M3",
        family="tetrahedral",
        gap_id=(24, 3),
        base_group=TETRAHEDRAL,
        generators=[
            _m([["w24^19", "w24^19"], ["w24^1", "w24^13"]], inverse_sqrt2()),
            _m([["-i", "0"], ["0", "i"]]),
        ],
        expected_entangling=False,
        expected_phase_range="powers of w3",
        source="tetrahedral covering group, third representation",
    )


def _tetrahedral_72_25() -> CatalogEntry:
    # M2 with the w3 phases adjoined
    return CatalogEntry(
        name="tetrahedral-72-25",
        family="tetrahedral",
        gap_id=(72, 25),
        base_group=TETRAHEDRAL,
        generators=[
            _m([["w24^11", "w24^11"], ["w24^17", "w24^5"]], inverse_sqrt2()),
            _m([["w12^1", "0"], ["0", "w12^7"]]),
        ],
        expected_entangling=False,
        expected_phase_range="powers of w3",
        source="tetrahedral scalar extension",
    )


def _octahedral_48_29() -> CatalogEntry:
    # SmallGroup [48,29] = GL(2,3)
    return CatalogEntry(
        name="octahedral-48-29",
        family="octahedral",
        gap_id=(48, 29),
        base_group=OCTAHEDRAL,
        generators=[
            _m([["1", "-i"], ["i", "-1"]], inverse_sqrt2()),
            _m([["w8^3", "w8^7"], ["w8^5", "w8^5"]], inverse_sqrt2()),
        ],
        expected_entangling=False,
        expected_phase_range="1 and i",
        source="octahedral covering group",
    )


def _octahedral_96_192() -> CatalogEntry:
    return CatalogEntry(
        name="octahedral-96-192",
        family="octahedral",
        gap_id=(96, 192),
        base_group=OCTAHEDRAL,
        generators=[
            _m([["1", "-i"], ["i", "-1"]], inverse_sqrt2()),
            _m([["w8^1", "w8^5"], ["w8^3", "w8^3"]], inverse_sqrt2()),
        ],
        expected_entangling=False,
        expected_phase_range="1 and i",
        source="octahedral scalar extension",
    )


def _dodecahedral_rep1() -> CatalogEntry:
    # GL(2, C) representation of SmallGroup [120,5] = SL(2,5); not unitary
    return CatalogEntry(
        name="dodecahedral-120-5-rep1",
        family="icosahedral",
        gap_id=(120, 5),
        base_group=ICOSAHEDRAL,
        generators=[
            _m(
                [
                    [
                        "w15^1 - w15^2 + w15^4 - w15^8 - w15^11 - w15^14",
                        "-2*w15^1 - 2*w15^4 - w15^7 - w15^13",
                    ],
                    [
                        "-w15^11 - w15^14",
                        "-w15^1 - w15^4 - w15^7 + w15^11 - w15^13 + w15^14",
                    ],
                ]
            ),
            _m(
                [
                    [
                        "-w15^1 + w15^2 - w15^4 + w15^8 + w15^11 + w15^14",
                        "w15^1 + w15^4",
                    ],
                    [
                        "w15^2 + w15^8 + 2*w15^11 + 2*w15^14",
                        "w15^1 + w15^4 + w15^7 - w15^11 + w15^13 - w15^14",
                    ],
                ]
            ),
        ],
        expected_entangling=False,
        expected_phase_range="trivial",
        source="icosahedral covering group, first representation",
    )


def _dodecahedral_rep2() -> CatalogEntry:
    half = Cyclo.rational(1) / 2
    return CatalogEntry(
        name="dodecahedral-120-5-rep2",
        family="icosahedral",
        gap_id=(120, 5),
        base_group=ICOSAHEDRAL,
        generators=[
            _m(
                [
                    [
                        "-2*w15^1 - 2*w15^4 - w15^7 - w15^11 - w15^13 - w15^14",
                        "2*w15^2 + w15^7 + 2*w15^8 + w15^11 + w15^13 + w15^14",
                    ],
                    [
                        "-w15^7 + w15^11 - w15^13 + w15^14",
                        "w15^7 - w15^11 + w15^13 - w15^14",
                    ],
                ],
                half,
            ),
            _m(
                [
                    [
                        "w15^1 + w15^2 + w15^4 + w15^7 + w15^8 + 2*w15^11 + w15^13 + 2*w15^14",
                        "w15^1 - w15^2 + w15^4 + w15^7 - w15^8 + w15^13",
                    ],
                    [
                        "w15^1 - w15^2 + w15^4 + w15^7 - w15^8 + w15^13",
                        "w15^1 - w15^2 + w15^4 - w15^7 - w15^8 - w15^13",
                    ],
                ],
                half,
            ),
        ],
        expected_entangling=False,
        expected_phase_range="trivial",
        source="icosahedral covering group, second representation",
    )


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------
def pauli_entry() -> CatalogEntry:
    return CatalogEntry(
        name="pauli",
        family="dihedral",
        gap_id=(16, 13),
        base_group="Klein four (order 4)",
        generators=[pauli_x(), pauli_z(), CMatrix.scalar(_w(4), 2)],
        expected_entangling=True,
        expected_phase_range="trivial",
        source="single-qubit Pauli group",
        classify=False,
    )


def dihedral_odd_entry(n: int, r: int = 1) -> CatalogEntry:
    """rho_r of D_2n: a -> diag(w_n^r, w_n^-r), b -> X."""
    if n < 3 or n % 2 == 0:
        raise CatalogError(f"dihedral-odd needs an odd n >= 3, got {n}")
    if math.gcd(r, n) != 1:
        raise CatalogError(f"dihedral-odd({n},{r}) needs gcd(r, n) = 1")
    return CatalogEntry(
        name=f"dihedral-odd({n})" if r == 1 else f"dihedral-odd({n},{r})",
        family="dihedral",
        gap_id=None,
        base_group=f"dihedral D{2 * n} (order {2 * n})",
        generators=[_diag(_w(n, r), _w(n, -r)), pauli_x()],
        expected_entangling=False,
        expected_phase_range="1 and -1",
        source="odd dihedral representation",
    )


def dihedral_odd_extension_entry(n: int) -> CatalogEntry:
    """G' = <diag(w_2n, w_2n^-1), X>, the odd dihedral group with -I adjoined."""
    if n < 3 or n % 2 == 0:
        raise CatalogError(f"dihedral-odd-extension needs an odd n >= 3, got {n}")
    return CatalogEntry(
        name=f"dihedral-odd-extension({n})",
        family="dihedral",
        base_group=f"dihedral D{2 * n} (order {2 * n})",
        generators=[_diag(_w(2 * n), _w(2 * n, -1)), pauli_x()],
        expected_entangling=False,
        expected_phase_range="1 and -1",
        source="odd dihedral scalar extension",
        classify=False,
    )


def gm_entry(m: int) -> CatalogEntry:
    """G_m = <X, Z^(1/m)> with Z^(1/m) = diag(1, w_2m); order 8 m^2."""
    if m < 1:
        raise CatalogError(f"Gm needs m >= 1, got {m}")
    return CatalogEntry(
        name=f"Gm({m})",
        family="dihedral",
        base_group=f"dihedral D{4 * m} (order {4 * m})",
        generators=[pauli_x(), _diag(ONE, _w(2 * m))],
        expected_entangling=True,
        expected_phase_range=f"powers of w{4 * m}",
        source="even dihedral family",
    )


def binary_dihedral_entry(n: int, r: int = 1) -> CatalogEntry:
    """rho_r of Q_4n: a -> diag(w_2n^r, w_2n^-r), b -> [[0, (-1)^r], [1, 0]]."""
    if n < 2:
        raise CatalogError(f"binary-dihedral needs n >= 2, got {n}")
    if math.gcd(r, 2 * n) != 1:
        raise CatalogError(f"binary-dihedral({n},{r}) needs gcd(r, 2n) = 1")
    sign = -1 if r % 2 else 1
    return CatalogEntry(
        name=f"binary-dihedral({n},{r})",
        family="dihedral",
        base_group=f"dihedral D{2 * n} (order {2 * n})",
        generators=[_diag(_w(2 * n, r), _w(2 * n, -r)), CMatrix([[0, sign], [1, 0]])],
        expected_entangling=n % 2 == 0,
        expected_phase_range="",
        source="binary dihedral representation",
        classify=False,
    )


FIXED_ENTRIES: Dict[str, Callable[[], CatalogEntry]] = {
    "tetrahedral-M1": _tetrahedral_m1,
    "tetrahedral-M2": _tetrahedral_m2,
    "tetrahedral-M3": _tetrahedral_m3,
    "tetrahedral-72-25": _tetrahedral_72_25,
    "octahedral-48-29": _octahedral_48_29,
    "octahedral-96-192": _octahedral_96_192,
    "dodecahedral-120-5-rep1": _dodecahedral_rep1,
    "dodecahedral-120-5-rep2": _dodecahedral_rep2,
    "pauli": pauli_entry,
}

_FAMILY = re.compile(r"^(?P<family>[A-Za-z\-]+)\((?P<args>[\d,\s]+)\)$")
_FAMILIES: Dict[str, Callable[..., CatalogEntry]] = {
    "dihedral-odd": dihedral_odd_entry,
    "dihedral-odd-extension": dihedral_odd_extension_entry,
    "gm": gm_entry,
    "binary-dihedral": binary_dihedral_entry,
}


def catalog_entries(odd: Sequence[int] = (3, 5, 7), gm: Sequence[int] = (1, 2, 3, 4)) -> List[CatalogEntry]:
    """Entries of the classification run: the fixed groups, then the sampled families."""
    entries = [build() for name, build in FIXED_ENTRIES.items() if name != "pauli"]
    entries.extend(dihedral_odd_entry(n) for n in odd)
    entries.extend(gm_entry(m) for m in gm)
    return entries


def get_entry(name: str) -> CatalogEntry:
    """A fixed entry by name, or a family member such as 'Gm(2)' or 'binary-dihedral(4,3)'."""
    key = name.strip()
    if key in FIXED_ENTRIES:
        return FIXED_ENTRIES[key]()
    match = _FAMILY.match(key)
    if match is None:
        raise CatalogError(f"unknown catalogue entry {name!r}")
    build = _FAMILIES.get(match.group("family").lower())
    if build is None:
        raise CatalogError(f"unknown catalogue family {match.group('family')!r}")
    args = [int(part) for part in match.group("args").split(",") if part.strip()]
    try:
        return build(*args)
    except TypeError as exc:
        raise CatalogError(f"wrong number of parameters in {name!r}") from exc


def entry_names() -> List[str]:
    return list(FIXED_ENTRIES) + [
        "dihedral-odd(n[,r])",
        "dihedral-odd-extension(n)",
        "Gm(m)",
        "binary-dihedral(n,r)",
    ]


def entry_group(entry: CatalogEntry, max_order: int = DEFAULT_MAX_ORDER) -> Tuple[MatrixGroup, bool]:
    """(closure, quarantined): quarantined when the closure order disagrees with the recorded id."""
    group = close_group(entry.generators, max_order, name=entry.name)
    quarantined = entry.gap_id is not None and group.order != entry.gap_id[0]
    return group, quarantined
