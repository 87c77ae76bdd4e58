from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from .settings import Settings
from .utils.cyclotomic import Cyclo, format_cyclo, format_root
from .utils.matrices import CMatrix


def literal_matrix(matrix: CMatrix) -> List[List[str]]:
    return matrix.to_literals()


def literal_fraction(value: Fraction) -> str:
    return str(value)


class ExactModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)


# ----------------------------------------------------------------------
# normalisers
# ----------------------------------------------------------------------
class ImageAssignment(ExactModel):
    """Generator t is sent to elements[images[t]]."""

    images: List[int]
    matrices: List[CMatrix]

    def to_structured(self) -> List[List[List[str]]]:
        return [literal_matrix(m) for m in self.matrices]


class PhaseFunction(ExactModel):
    phases: List[Cyclo]

    @property
    def is_trivial(self) -> bool:
        return all(p == 1 for p in self.phases)

    def to_structured(self) -> List[str]:
        return [format_cyclo(p) for p in self.phases]


class NormaliserRecord(ExactModel):
    matrix: CMatrix
    assignment: ImageAssignment
    phase_function: Optional[PhaseFunction] = None
    entangling: Optional[bool] = None
    generalised_permutation: bool = False
    verified: bool = False

    def to_structured(self) -> Dict[str, Any]:
        return {
            "matrix": literal_matrix(self.matrix),
            "assignment": self.assignment.to_structured(),
            "phase_function": self.phase_function.to_structured() if self.phase_function else None,
            "entangling": self.entangling,
            "generalised_permutation": self.generalised_permutation,
            "verified": self.verified,
        }


class SearchStats(ExactModel):
    candidates_per_generator: List[int] = Field(default_factory=list)
    assignments_enumerated: int = 0
    pruned_numeric: int = 0
    exact_solves: int = 0
    singular_discarded: int = 0
    duplicate_cosets: int = 0
    verified: int = 0

    def to_structured(self) -> Dict[str, Any]:
        return self.model_dump()


class NormaliserReport(ExactModel):
    group_name: str
    group_order: int
    target: Literal["G", "G_tensor_G"] = "G"
    mode: Literal["linear", "projective"] = "linear"
    found: List[NormaliserRecord] = Field(default_factory=list)
    phase_functions: List[PhaseFunction] = Field(default_factory=list)
    phase_range: List[Cyclo] = Field(default_factory=list)
    search_stats: SearchStats = Field(default_factory=SearchStats)
    degenerate: bool = False
    modulo_inner: bool = False
    notes: List[str] = Field(default_factory=list)

    @property
    def entangling(self) -> bool:
        return any(record.entangling for record in self.found)

    @property
    def matrices(self) -> List[CMatrix]:
        return [record.matrix for record in self.found]

    def to_structured(self) -> Dict[str, Any]:
        return {
            "group": self.group_name,
            "order": self.group_order,
            "target": self.target,
            "mode": self.mode,
            "degenerate": self.degenerate,
            "modulo_inner": self.modulo_inner,
            "entangling": self.entangling,
            "phase_functions": [f.to_structured() for f in self.phase_functions],
            "phase_range": [format_root(p) for p in self.phase_range],
            "found": [record.to_structured() for record in self.found],
            "search_stats": self.search_stats.to_structured(),
            "notes": list(self.notes),
        }


# ----------------------------------------------------------------------
# catalogue and classification
# ----------------------------------------------------------------------
class CatalogEntry(ExactModel):
    name: str
    family: str
    gap_id: Optional[Tuple[int, int]] = None
    base_group: str
    generators: List[CMatrix]
    expected_entangling: bool
    expected_phase_range: str = ""
    source: str = ""
    classify: bool = True

    def to_structured(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "family": self.family,
            "gap_id": list(self.gap_id) if self.gap_id else None,
            "base_group": self.base_group,
            "generators": [literal_matrix(g) for g in self.generators],
            "expected_entangling": self.expected_entangling,
            "expected_phase_range": self.expected_phase_range,
            "source": self.source,
        }


class BaseGroupDescription(BaseModel):
    order: int
    family: str
    label: str
    element_orders: Dict[int, int] = Field(default_factory=dict)

    def to_structured(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "family": self.family,
            "label": self.label,
            "element_orders": {str(k): v for k, v in sorted(self.element_orders.items())},
        }


class ClassificationRow(ExactModel):
    name: str
    order: Optional[int] = None
    base_group: str = ""
    expected_entangling: bool
    entangling: Optional[bool] = None
    status: Literal["pass", "fail", "quarantined", "error"] = "pass"
    normaliser_count: int = 0
    entangling_gates: List[CMatrix] = Field(default_factory=list)
    note: str = ""

    def to_structured(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "order": self.order,
            "base_group": self.base_group,
            "expected_entangling": self.expected_entangling,
            "entangling": self.entangling,
            "status": self.status,
            "normaliser_count": self.normaliser_count,
            "entangling_gates": [literal_matrix(g) for g in self.entangling_gates],
            "note": self.note,
        }


class ClassificationTable(ExactModel):
    rows: List[ClassificationRow] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.status == "pass" for row in self.rows)

    def to_structured(self) -> Dict[str, Any]:
        return {"passed": self.passed, "rows": [row.to_structured() for row in self.rows]}


class GroupSummary(ExactModel):
    name: str
    dim: int
    order: int
    irreducible: bool
    centre_order: int
    centre_generator: Optional[Cyclo] = None
    scalar_centre: bool = True
    generators: List[CMatrix] = Field(default_factory=list)
    element_orders: Dict[int, int] = Field(default_factory=dict)

    def to_structured(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dim": self.dim,
            "order": self.order,
            "irreducible": self.irreducible,
            "centre_order": self.centre_order,
            "centre_generator": format_cyclo(self.centre_generator) if self.centre_generator is not None else None,
            "scalar_centre": self.scalar_centre,
            "generators": [literal_matrix(g) for g in self.generators],
            "element_orders": {str(k): v for k, v in sorted(self.element_orders.items())},
        }


# ----------------------------------------------------------------------
# circuits
# ----------------------------------------------------------------------
class Gate(ExactModel):
    name: str
    matrix: CMatrix
    wires: List[int]
    mode: Literal["linear", "projective"] = "projective"


class MeasurementMarker(BaseModel):
    wire: int = Field(ge=0)
    after: int = Field(ge=0, description="number of gates applied before the measurement")


class Circuit(ExactModel):
    """Gates act left to right; `group` is the single-qudit group every gate normalises."""

    dim: int
    n_wires: int = Field(ge=1)
    group: Any
    gates: List[Gate] = Field(default_factory=list)
    input: List[List[Cyclo]]
    measurements: List[MeasurementMarker] = Field(default_factory=list)


class Observable(ExactModel):
    """phase * (x)_w group.elements[factors[w]], optionally wrapped as O + O^dagger."""

    phase: Cyclo
    factors: List[int]
    hermitian_wrapper: bool = False

    def to_structured(self, group) -> Dict[str, Any]:
        return {
            "phase": format_cyclo(self.phase),
            "factors": [literal_matrix(group.elements[i]) for i in self.factors],
            "hermitian_wrapper": self.hermitian_wrapper,
        }


class ExpectationResult(ExactModel):
    value: Cyclo
    hermitian: bool
    p0: Optional[Cyclo] = None
    p1: Optional[Cyclo] = None
    gates: int = 0
    lookups: int = 0
    propagated: Optional[Observable] = None

    def to_structured(self, group=None) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "value": format_cyclo(self.value),
            "hermitian": self.hermitian,
            "p0": format_cyclo(self.p0) if self.p0 is not None else None,
            "p1": format_cyclo(self.p1) if self.p1 is not None else None,
            "gates": self.gates,
            "lookups": self.lookups,
        }
        if group is not None and self.propagated is not None:
            out["propagated"] = self.propagated.to_structured(group)
        return out


class TeleportationPOVM(ExactModel):
    """A_i = weight * |b_i><b_i| with unnormalised |b_i> = (U_i^dagger (x) I) sum_j |jj>."""

    elements: List[CMatrix]
    vectors: List[List[Cyclo]]
    corrections: List[CMatrix]
    weight: Fraction
    complete: bool


class TeleportationOutcome(ExactModel):
    index: int
    correction: CMatrix
    probability: Fraction
    matches: bool

    def to_structured(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "correction": literal_matrix(self.correction),
            "probability": literal_fraction(self.probability),
            "matches": self.matches,
        }


class TeleportationReport(ExactModel):
    group_name: str
    order: int
    complete: bool
    state: List[Cyclo]
    outcomes: List[TeleportationOutcome] = Field(default_factory=list)

    @property
    def all_match(self) -> bool:
        return self.complete and all(o.matches and o.probability == Fraction(1, self.order) for o in self.outcomes)

    def to_structured(self) -> Dict[str, Any]:
        return {
            "group": self.group_name,
            "order": self.order,
            "complete": self.complete,
            "state": [format_cyclo(a) for a in self.state],
            "all_match": self.all_match,
            "outcomes": [o.to_structured() for o in self.outcomes],
        }


# ----------------------------------------------------------------------
# input files
# ----------------------------------------------------------------------
class MatrixLiteral(BaseModel):
    entries: List[List[str]]
    scale: Optional[str] = None


MatrixSpec = Union[MatrixLiteral, List[List[str]]]


class GroupFile(BaseModel):
    dim: int = Field(ge=1, le=4)
    name: str = ""
    generators: List[MatrixSpec] = Field(min_length=1)


class MatrixFile(BaseModel):
    name: str = ""
    entries: List[List[str]]
    scale: Optional[str] = None


class GateSpec(BaseModel):
    name: Optional[str] = None
    matrix: Optional[MatrixSpec] = None
    wires: List[int] = Field(min_length=1, max_length=2)
    mode: Literal["linear", "projective"] = "projective"
    condition: Optional[Dict[str, Any]] = None


class MeasureSpec(BaseModel):
    wire: int = Field(ge=0)
    after: Optional[int] = None


class ObservableSpec(BaseModel):
    name: str = "Z"
    matrix: Optional[MatrixSpec] = None
    wires: List[int] = Field(default_factory=lambda: [0])
    hermitian_wrapper: bool = False


class CircuitFile(BaseModel):
    group: str
    wires: int = Field(ge=1)
    input: List[List[str]]
    gates: List[GateSpec] = Field(default_factory=list)
    measure: List[MeasureSpec] = Field(default_factory=list)
    observable: ObservableSpec = Field(default_factory=ObservableSpec)


class RunConfig(BaseModel):
    subcommand: Literal[
        "closure", "normaliser", "projective", "entangling-test", "classify-u2", "simulate", "teleport-check"
    ]
    input_path: Optional[str] = None
    target: Literal["G", "GxG"] = "G"
    state: Optional[List[str]] = None
    settings: Settings = Field(default_factory=Settings)
