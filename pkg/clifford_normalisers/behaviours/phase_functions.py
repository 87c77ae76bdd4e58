"""
Phase functions of a finite group G with scalar centre <w_s I>.

A projective normaliser N satisfies N U_t N^-1 = f(U_t) V_t with V_t in G.
Each canonical f(U_t) is w_{n_t s}^j with n_t = order(U_t) and 0 <= j < n_t.
A tuple of such phases is admissible when <w_s I, f(U_t) U_t> has order |G|,
i.e. when every word in the generators that evaluates to a scalar picks up a
phase inside mu_s. Those words are spanned (as exponent-sum vectors) by the
Schreier relators of G/Z, so admissibility is a congruence per relator.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ..memory import RunMemory, ensure_memory
from ..models import PhaseFunction
from ..utils.cyclotomic import Cyclo, root_of_unity
from ..utils.groups import MatrixGroup


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def root_order(value: Cyclo) -> int:
    found = value.root_of_unity_exponent()
    if found is None:
        raise ValueError(f"{value} is not a root of unity")
    m, k = found
    return m // math.gcd(m, k)


def canonical_phase(value: Cyclo, s: int) -> Tuple[Cyclo, int]:
    """(c, q) with value == c * w_s**q and 0 <= arg(c) < 2 pi / s."""
    found = value.root_of_unity_exponent()
    if found is None:
        raise ValueError(f"{value} is not a root of unity")
    m, k = found
    big = _lcm(m, s)
    exponent = (k * (big // m)) % big
    window = big // s
    return root_of_unity(big, exponent % window), exponent // window


def relator_vectors(group: MatrixGroup) -> np.ndarray:
    """Exponent-sum vectors of the Schreier relators of G/Z for the group's generators."""
    gens = group.generator_indices
    start, _ = group.coset_decomposition(group.identity_index)
    paths = {start: np.zeros(len(gens), dtype=np.int64)}
    queue = deque([start])
    rows = []
    while queue:
        x = queue.popleft()
        for t, g in enumerate(gens):
            y, _ = group.coset_decomposition(group.product_index(x, g))
            step = paths[x].copy()
            step[t] += 1
            if y not in paths:
                paths[y] = step
                queue.append(y)
            else:
                rows.append(step - paths[y])
    if not rows:
        return np.zeros((0, len(gens)), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def compute_phase_functions(group: MatrixGroup, memory: Optional[RunMemory] = None) -> List[PhaseFunction]:
    """All admissible canonical phase functions, trivial first, then lexicographic in the exponents."""
    memory = ensure_memory(memory)
    s, _ = group.centre_min_phase
    orders = [group.element_orders[g] for g in group.generator_indices]
    periods = [n * s for n in orders]
    big = 1
    for p in periods:
        big = _lcm(big, p)
    modulus = big // s
    steps = np.array([big // p for p in periods], dtype=np.int64)

    relators = np.unique(np.mod(relator_vectors(group), modulus), axis=0)
    tuples = np.array(list(itertools.product(*[range(n) for n in orders])), dtype=np.int64)
    if relators.size:
        residues = np.mod((tuples * steps) @ relators.T, modulus)
        admissible = tuples[np.all(residues == 0, axis=1)]
    else:
        admissible = tuples

    functions = [
        PhaseFunction(phases=[root_of_unity(p, int(j)) for p, j in zip(periods, row)]) for row in admissible
    ]
    memory.log(
        f"Phase functions of {group.name or 'group'}: {len(functions)} admissible of {len(tuples)} candidates"
    )
    return functions


def phase_extension_order(functions: List[PhaseFunction], s: int) -> int:
    """M with <phi I : phi in Phi(G)> (with w_s) equal to mu_M."""
    m = s
    for f in functions:
        for phase in f.phases:
            m = _lcm(m, root_order(phase))
    return m


def phase_values(functions: List[PhaseFunction]) -> List[Cyclo]:
    """Distinct phase values taken by any function, in first-seen order."""
    seen = []
    for f in functions:
        for phase in f.phases:
            if phase not in seen:
                seen.append(phase)
    return seen


def _range_key(value: Cyclo) -> Tuple[int, Fraction]:
    m, k = value.root_of_unity_exponent()
    return m // math.gcd(m, k), Fraction(k, m)


def phase_range(functions: List[PhaseFunction], s: int) -> List[Cyclo]:
    """
    Phase values modulo the centre <w_s>, each given by its lowest-order
    representative (smallest argument on ties), sorted by (order, argument).
    With s = 2 a value w_6 is reported as w_3^2.
    """
    reps: List[Cyclo] = []
    for value in phase_values(functions):
        best = min((value * root_of_unity(s, q) for q in range(s)), key=_range_key)
        if best not in reps:
            reps.append(best)
    return sorted(reps, key=_range_key)
