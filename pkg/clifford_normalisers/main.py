from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from .behaviours.classification import base_group_of, run_u2_classification
from .behaviours.group_loading import load_circuit_file, resolve_group, resolve_matrix, summarise_group
from .behaviours.normaliser_search import classify_entangling, find_normalisers, find_projective_normalisers
from .behaviours.simulation import build_circuit, expectation_of, observable_from_spec
from .behaviours.teleportation import verify_teleportation
from .errors import ClassificationMismatch, InputError, NormaliserToolkitError, UnrecognizedBaseGroup
from .memory import RunMemory
from .models import ClassificationTable, NormaliserReport, RunConfig
from .settings import Settings
from .utils.cyclotomic import Cyclo, format_cyclo, format_root, parse_cyclo
from .utils.entangling import is_entangling, is_product, is_swap_product
from .utils.groups import tensor_square

Section = Tuple[str, List[str]]
Outcome = Tuple[Dict[str, Any], List[Section]]


def phase_label(value: Optional[Cyclo]) -> str:
    if value is None:
        return "-"
    found = value.root_of_unity_exponent()
    if found == (4, 1):
        return "i"
    if found == (4, 3):
        return "-i"
    return format_root(value)


def matrix_lines(literals: List[List[str]], indent: str = "    ") -> List[str]:
    return [indent + "[" + ", ".join(row) + "]" for row in literals]


def _require_input(config: RunConfig) -> str:
    if not config.input_path:
        raise InputError(f"{config.subcommand} needs an input (catalogue name or file)")
    return config.input_path


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------
def run_closure(config: RunConfig, memory: RunMemory) -> Outcome:
    group = resolve_group(_require_input(config), memory)
    summary = summarise_group(group, memory)
    structured = summary.to_structured()
    lines = [
        f"order {summary.order}, {'irreducible' if summary.irreducible else 'reducible'}, "
        f"centre <{phase_label(summary.centre_generator)}I>"
        if summary.scalar_centre
        else f"order {summary.order}, {'irreducible' if summary.irreducible else 'reducible'}, non-scalar centre"
    ]
    lines.append("element orders: " + ", ".join(f"{k}: {v}" for k, v in sorted(summary.element_orders.items())))
    if group.dim == 2 and summary.scalar_centre:
        try:
            base = base_group_of(group)
        except UnrecognizedBaseGroup as exc:
            memory.warn(str(exc))
        else:
            structured["base_group"] = base.to_structured()
            lines.append(f"central quotient: {base.label}")
    return structured, [("Group", lines)]


def _normaliser_sections(report: NormaliserReport) -> List[Section]:
    header = [
        f"group {report.group_name or '-'} (order {report.group_order}), target {report.target}, mode {report.mode}",
        f"{len(report.found)} normaliser(s)" + (" modulo the group" if report.modulo_inner else ""),
    ]
    if report.degenerate:
        header.append("degenerate: the group consists of scalars")
    if report.phase_functions:
        header.append(f"{len(report.phase_functions)} admissible phase function(s)")
    if report.phase_range:
        header.append("phase range modulo the centre: " + ", ".join(phase_label(p) for p in report.phase_range))
    found: List[str] = []
    for index, record in enumerate(report.found, 1):
        flags = []
        if record.entangling is not None:
            flags.append("entangling" if record.entangling else "local")
        if record.generalised_permutation:
            flags.append("generalised permutation")
        if record.phase_function is not None:
            flags.append("phases " + ", ".join(phase_label(p) for p in record.phase_function.phases))
        found.append(f"{index}. " + "; ".join(flags) if flags else f"{index}.")
        found.extend(matrix_lines(record.matrix.to_literals()))
    stats = report.search_stats
    stats_lines = [
        f"candidates per generator: {stats.candidates_per_generator}",
        f"assignments enumerated: {stats.assignments_enumerated}",
        f"pruned numerically: {stats.pruned_numeric}, exact solves: {stats.exact_solves}, "
        f"singular: {stats.singular_discarded}, duplicate cosets: {stats.duplicate_cosets}",
    ]
    return [("Normalisers", header), ("Found", found or ["(none)"]), ("Search", stats_lines + report.notes)]


def run_normaliser(config: RunConfig, memory: RunMemory, projective: bool = False) -> Outcome:
    group = resolve_group(_require_input(config), memory)
    if config.target == "GxG":
        if projective:
            report = classify_entangling(group, memory)
        else:
            square = tensor_square(group, memory.settings.max_order)
            report = find_normalisers(square, memory, modulo_inner=True, target="G_tensor_G", name=square.name)
            for record in report.found:
                record.entangling = is_entangling(record.matrix)
    elif projective:
        report = find_projective_normalisers(group, memory)
    else:
        report = find_normalisers(group, memory)
    return report.to_structured(), _normaliser_sections(report)


def run_projective(config: RunConfig, memory: RunMemory) -> Outcome:
    return run_normaliser(config, memory, projective=True)


def run_entangling_test(config: RunConfig, memory: RunMemory) -> Outcome:
    matrix = resolve_matrix(_require_input(config))
    entangling = is_entangling(matrix)
    structured = {
        "matrix": matrix.to_literals(),
        "entangling": entangling,
        "product": is_product(matrix),
        "swap_product": is_swap_product(matrix),
    }
    memory.log(f"Entangling test of {config.input_path}: {entangling}")
    lines = [f"entangling: {'true' if entangling else 'false'}"]
    lines.append(f"product: {'true' if structured['product'] else 'false'}")
    lines.append(f"swap times product: {'true' if structured['swap_product'] else 'false'}")
    return structured, [("Entangling Test", lines)]


def _classification_sections(table: ClassificationTable) -> List[Section]:
    lines = []
    for row in table.rows:
        verdict = "-" if row.entangling is None else ("entangling" if row.entangling else "not entangling")
        expected = "entangling" if row.expected_entangling else "not entangling"
        order = "-" if row.order is None else str(row.order)
        line = f"{row.name:<26} order {order:>5}  {verdict:<15} expected {expected:<15} [{row.status}]"
        if row.note:
            line += f"  {row.note}"
        lines.append(line)
    lines.append(f"overall: {'pass' if table.passed else 'FAIL'}")
    return [("U(2) Classification", lines)]


def run_classify_u2(config: RunConfig, memory: RunMemory) -> Outcome:
    table = run_u2_classification(memory)
    return table.to_structured(), _classification_sections(table)


def run_simulate(config: RunConfig, memory: RunMemory) -> Outcome:
    path = Path(_require_input(config))
    spec = load_circuit_file(path)
    circuit = build_circuit(spec, memory, base_dir=path.parent)
    observable = observable_from_spec(spec.observable, circuit)
    result = expectation_of(circuit, observable, memory)
    lines = [f"expectation: {format_cyclo(result.value)}", f"hermitian: {'true' if result.hermitian else 'false'}"]
    if result.p0 is not None:
        lines.append(f"p0 = {format_cyclo(result.p0)}, p1 = {format_cyclo(result.p1)}")
    stats = [f"gates: {result.gates}", f"table lookups: {result.lookups}", f"wires: {circuit.n_wires}"]
    return result.to_structured(circuit.group), [("Expectation", lines), ("Propagation", stats)]


def run_teleport_check(config: RunConfig, memory: RunMemory) -> Outcome:
    group = resolve_group(_require_input(config), memory)
    if config.state:
        state = [parse_cyclo(a) for a in config.state]
    else:
        state = [parse_cyclo("1")] + [parse_cyclo("0")] * (group.dim - 1)
    report = verify_teleportation(group, state, memory)
    lines = [
        f"group {report.group_name or '-'} (order {report.order})",
        f"POVM complete: {'true' if report.complete else 'false'}",
        f"state: ({', '.join(format_cyclo(a) for a in report.state)})",
        f"outcomes reproducing U_i|alpha>: {sum(o.matches for o in report.outcomes)}/{len(report.outcomes)}",
        f"all outcomes with probability 1/{report.order}: "
        f"{'true' if all(o.probability * report.order == 1 for o in report.outcomes) else 'false'}",
        f"teleportation verified: {'true' if report.all_match else 'false'}",
    ]
    return report.to_structured(), [("Teleportation", lines)]


HANDLERS: Dict[str, Callable[[RunConfig, RunMemory], Outcome]] = {
    "closure": run_closure,
    "normaliser": run_normaliser,
    "projective": run_projective,
    "entangling-test": run_entangling_test,
    "classify-u2": run_classify_u2,
    "simulate": run_simulate,
    "teleport-check": run_teleport_check,
}


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------
def print_sections(sections: Sequence[Section], out: TextIO) -> None:
    for title, lines in sections:
        print(f"\n=== {title} ===", file=out)
        if not lines:
            print("(none)", file=out)
        for line in lines:
            print(line, file=out)


def print_logs(memory: RunMemory, out: TextIO) -> None:
    print("\n=== Run Log ===", file=out)
    for line in memory.history:
        print(f"- {line}", file=out)


def emit(
    config: RunConfig, structured: Dict[str, Any], sections: Sequence[Section], memory: RunMemory, out: TextIO
) -> None:
    if config.settings.output_format == "structured":
        payload = {"subcommand": config.subcommand, "result": structured}
        print(json.dumps(payload, indent=2), file=out)
        return
    print_sections(sections, out)
    print_logs(memory, out)


def run(config: RunConfig, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Dispatch one subcommand; 0 ok, 1 classification mismatch, 2 input error, 3 budget exceeded."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    settings = config.settings.apply()
    memory = RunMemory(settings=settings)
    try:
        structured, sections = HANDLERS[config.subcommand](config, memory)
    except ClassificationMismatch as exc:
        if exc.table is not None:
            emit(config, exc.table.to_structured(), _classification_sections(exc.table), memory, out)
        print(f"error: {exc}", file=err)
        return exc.exit_code
    except NormaliserToolkitError as exc:
        print(f"error: {exc}", file=err)
        return exc.exit_code
    emit(config, structured, sections, memory, out)
    return 0


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------
def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clifford_normalisers",
        description="Normalisers of finite unitary groups, entangling classification and circuit simulation",
    )
    parser.add_argument("subcommand", choices=list(HANDLERS), help="Operation to run")
    parser.add_argument("input", nargs="?", default=None, help="Catalogue name, group / matrix / circuit file")
    parser.add_argument("--budget-order", type=int, default=None, help="Largest group closure allowed")
    parser.add_argument("--budget-assignments", type=int, default=None, help="Largest image-assignment count allowed")
    parser.add_argument("--format", choices=["human", "structured"], default=None, help="Output format")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomised sampling")
    parser.add_argument("--target", choices=["G", "GxG"], default="G", help="Normalise G or its tensor square")
    parser.add_argument("--odd", type=_int_list, default=None, help="Odd dihedral n values for classify-u2")
    parser.add_argument("--m", type=_int_list, default=None, help="G_m values of m for classify-u2")
    parser.add_argument("--state", type=str, default=None, help="Comma-separated amplitudes for teleport-check")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes for classify-u2")
    parser.add_argument("--verbose", action="store_true", help="Log every step to stderr")
    return parser


def config_from_args(args: argparse.Namespace, environ: Optional[Dict[str, str]] = None) -> RunConfig:
    settings = Settings.from_env(
        environ=environ,
        max_order=args.budget_order,
        max_assignments=args.budget_assignments,
        output_format=args.format,
        seed=args.seed,
        odd_dihedral=args.odd,
        gm_values=args.m,
        workers=args.workers,
    )
    state = [part.strip() for part in args.state.split(",")] if args.state else None
    return RunConfig(
        subcommand=args.subcommand, input_path=args.input, target=args.target, state=state, settings=settings
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
    except NormaliserToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
