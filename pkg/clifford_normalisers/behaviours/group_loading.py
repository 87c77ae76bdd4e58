from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from ..catalog import FIXED_ENTRIES, entry_group, get_entry
from ..errors import CatalogError, DimensionMismatch, GroupFileError, NonScalarCentre
from ..memory import RunMemory, ensure_memory
from ..models import CircuitFile, GroupFile, GroupSummary, MatrixFile, MatrixLiteral, MatrixSpec
from ..utils.cyclotomic import root_of_unity
from ..utils.groups import MatrixGroup, close_group, is_irreducible
from ..utils.matrices import CMatrix, library_gate


def load_input_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GroupFileError(f"cannot read {path}: {exc}") from exc


def matrix_from_spec(spec: MatrixSpec) -> CMatrix:
    if isinstance(spec, MatrixLiteral):
        return CMatrix.from_literals(spec.entries, spec.scale)
    return CMatrix.from_literals(spec)


def load_group_file(path: Path, max_order: int, memory: Optional[RunMemory] = None) -> MatrixGroup:
    memory = ensure_memory(memory)
    try:
        spec = GroupFile.model_validate(load_input_json(path))
    except ValidationError as exc:
        raise GroupFileError(f"invalid group file {path}: {exc}") from exc
    generators = [matrix_from_spec(g) for g in spec.generators]
    for g in generators:
        if g.dim != spec.dim:
            raise DimensionMismatch(f"generator {g.to_literals()} in {path} is not {spec.dim} x {spec.dim}")
    group = close_group(generators, max_order, name=spec.name or Path(path).stem)
    memory.log(f"Loaded group {group.name} from {path}: order {group.order}")
    return group


def load_matrix_file(path: Path) -> CMatrix:
    try:
        spec = MatrixFile.model_validate(load_input_json(path))
    except ValidationError as exc:
        raise GroupFileError(f"invalid matrix file {path}: {exc}") from exc
    return CMatrix.from_literals(spec.entries, spec.scale)


def load_circuit_file(path: Path) -> CircuitFile:
    try:
        return CircuitFile.model_validate(load_input_json(path))
    except ValidationError as exc:
        raise GroupFileError(f"invalid circuit file {path}: {exc}") from exc


def _looks_like_catalog(reference: str) -> bool:
    return reference in FIXED_ENTRIES or ("(" in reference and reference.endswith(")"))


def resolve_group(
    reference: str, memory: Optional[RunMemory] = None, base_dir: Optional[Path] = None
) -> MatrixGroup:
    """A catalogue name such as 'pauli' or 'Gm(2)', or a group file path."""
    memory = ensure_memory(memory)
    max_order = memory.settings.max_order
    if reference in memory.groups:
        return memory.groups[reference]
    if _looks_like_catalog(reference):
        entry = get_entry(reference)
        group, quarantined = entry_group(entry, max_order)
        if quarantined:
            memory.warn(f"catalogue entry {entry.name} closes to order {group.order}, not {entry.gap_id[0]}")
        memory.log(f"Loaded catalogue group {entry.name}: order {group.order}")
    else:
        path = Path(reference)
        if not path.is_absolute() and base_dir is not None and not path.exists():
            path = base_dir / path
        if not path.exists():
            raise CatalogError(f"{reference!r} is neither a catalogue entry nor an existing group file")
        group = load_group_file(path, max_order, memory)
    memory.groups[reference] = group
    return group


def resolve_matrix(reference: Union[str, Path]) -> CMatrix:
    """A gate library name ('CZ', 'Zroot(4)', ...) or a matrix file path."""
    gate = library_gate(str(reference))
    if gate is not None:
        return gate
    path = Path(reference)
    if not path.exists():
        raise GroupFileError(f"{reference!s} is neither a library gate nor an existing matrix file")
    return load_matrix_file(path)


def summarise_group(group: MatrixGroup, memory: Optional[RunMemory] = None) -> GroupSummary:
    memory = ensure_memory(memory)
    irreducible = is_irreducible(group)
    try:
        _, s = group.centre
        scalar_centre = True
        generator = root_of_unity(s, 1)
    except NonScalarCentre:
        s = len(group.scalar_indices())
        scalar_centre = False
        generator = None
        memory.warn(f"{group.name or 'group'} has a non-scalar centre")
    summary = GroupSummary(
        name=group.name,
        dim=group.dim,
        order=group.order,
        irreducible=irreducible,
        centre_order=s,
        centre_generator=generator,
        scalar_centre=scalar_centre,
        generators=list(group.generators),
        element_orders=dict(Counter(group.element_orders)),
    )
    memory.log(f"Summarised {group.name or 'group'}: order {group.order}, irreducible={irreducible}")
    return summary
