"""
Entangling classification of finite subgroups of U(2).

Every catalogue entry is closed, its central quotient identified, and the
projective normalisers of G (x) G searched modulo G (x) G. A row passes
when the verdict agrees with the recorded expectation.
"""

from __future__ import annotations

import math
import multiprocessing as mp
from collections import Counter
from typing import List, Optional, Sequence, Tuple

from ..catalog import catalog_entries, entry_group
from ..errors import ClassificationMismatch, NormaliserToolkitError, UnrecognizedBaseGroup
from ..memory import RunMemory, ensure_memory
from ..models import BaseGroupDescription, CatalogEntry, ClassificationRow, ClassificationTable
from ..settings import Settings
from ..utils.groups import MatrixGroup
from .normaliser_search import classify_entangling


def schur_multiplier_dihedral(n: int) -> int:
    """Order of the Schur multiplier of the dihedral group of order 2n."""
    if n < 1:
        raise ValueError(f"dihedral groups need n >= 1, got {n}")
    return math.gcd(2, n)


def projective_orders(group: MatrixGroup) -> List[int]:
    """Order of each class of G / (scalars in G), one per coset representative."""
    identity_rep, _ = group.coset_decomposition(group.identity_index)
    orders = []
    for x in group.coset_representatives():
        power, k = x, 1
        while group.coset_decomposition(power)[0] != identity_rep:
            power = group.product_index(power, x)
            k += 1
        orders.append(k)
    return orders


def base_group_of(group: MatrixGroup) -> BaseGroupDescription:
    """Identify G / Z(G) among the finite subgroups of PU(2)."""
    if group.dim != 2:
        raise UnrecognizedBaseGroup(f"base groups are only recognised in dimension 2, not {group.dim}")
    orders = projective_orders(group)
    n = len(orders)
    histogram = dict(sorted(Counter(orders).items()))
    top = max(orders)
    involutions = histogram.get(2, 0)

    if n == 1:
        family, label = "trivial", "trivial (order 1)"
    elif top == n:
        family, label = "cyclic", f"cyclic C{n} (order {n})"
    elif n == 4 and involutions == 3:
        family, label = "dihedral", "Klein four (order 4)"
    elif n % 2 == 0 and top == n // 2 and involutions >= n // 2:
        family, label = "dihedral", f"dihedral D{n} (order {n})"
    elif n == 12 and top == 3:
        family, label = "tetrahedral", "tetrahedral A4 (order 12)"
    elif n == 24 and top == 4:
        family, label = "octahedral", "octahedral S4 (order 24)"
    elif n == 60 and top == 5:
        family, label = "icosahedral", "icosahedral A5 (order 60)"
    else:
        raise UnrecognizedBaseGroup(
            f"central quotient of {group.name or 'group'} (order {n}, element orders {histogram}) "
            "is not a finite subgroup of PU(2)"
        )
    return BaseGroupDescription(order=n, family=family, label=label, element_orders=histogram)


def classify_entry(entry: CatalogEntry, memory: RunMemory) -> ClassificationRow:
    settings = memory.settings
    row = ClassificationRow(name=entry.name, base_group=entry.base_group, expected_entangling=entry.expected_entangling)
    try:
        group, quarantined = entry_group(entry, settings.max_order)
        row.order = group.order
        if quarantined:
            row.status = "quarantined"
            row.note = f"closure has order {group.order}, catalogue records {entry.gap_id[0]}"
            memory.warn(f"{entry.name} quarantined: {row.note}")
            return row
        base = base_group_of(group)
        row.base_group = base.label
        report = classify_entangling(group, memory)
    except NormaliserToolkitError as exc:
        row.status = "error"
        row.note = str(exc)
        memory.warn(f"{entry.name}: {exc}")
        return row

    row.entangling = report.entangling
    row.normaliser_count = len(report.found)
    row.entangling_gates = [record.matrix for record in report.found if record.entangling]
    row.status = "pass" if row.entangling == entry.expected_entangling else "fail"
    if row.status == "fail":
        row.note = f"expected {'entangling' if entry.expected_entangling else 'not entangling'}"
    return row


def _classify_worker(job: Tuple[CatalogEntry, Settings]) -> Tuple[ClassificationRow, List[str]]:
    entry, settings = job
    memory = RunMemory(settings=settings.apply())
    row = classify_entry(entry, memory)
    return row, memory.history


def run_u2_classification(
    memory: Optional[RunMemory] = None, entries: Optional[Sequence[CatalogEntry]] = None
) -> ClassificationTable:
    """
    Classify every entry (the default catalogue run when entries is None).

    Raises ClassificationMismatch carrying the full table when any row fails,
    errors or is quarantined: a quarantined entry was never classified.
    """
    memory = ensure_memory(memory)
    settings = memory.settings
    if entries is None:
        entries = catalog_entries(settings.odd_dihedral, settings.gm_values)
    entries = [e for e in entries if e.classify]

    if settings.workers > 1 and len(entries) > 1:
        pool = mp.Pool(min(settings.workers, len(entries)))
        try:
            results = pool.map(_classify_worker, [(entry, settings) for entry in entries])
        finally:
            pool.close()
        rows = []
        for row, history in results:
            memory.history.extend(history)
            rows.append(row)
    else:
        rows = [classify_entry(entry, memory) for entry in entries]

    table = ClassificationTable(rows=rows)
    counts = Counter(row.status for row in rows)
    memory.log(
        f"Classified {len(rows)} groups: "
        + ", ".join(f"{counts.get(status, 0)} {status}" for status in ("pass", "fail", "quarantined", "error"))
    )
    if not table.passed:
        failing = [f"{row.name} ({row.status})" for row in rows if row.status != "pass"]
        raise ClassificationMismatch(f"classification disagrees for {', '.join(failing)}", table=table)
    return table
