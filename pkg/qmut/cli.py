"""

Command-line interface.

Exit status: 0 success or finite class, 1 failed check, 2 unreadable input,
3 invalid vertex, 4 infinite class, 5 budget exhausted.

"""
import argparse
from dataclasses import replace
import json
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional, Sequence

from .config import SCHEMA_VERSION, Settings
from .cyclo import to_label
from .documents import (
    document_to_dict,
    dump_document,
    gram_to_dict,
    load_quiver,
    quiver_to_document,
)
from .dot import export_dot
from .errors import ConditionError, DocumentError, RealizationError, VertexIndexError
from .explorer import (
    ClassReport,
    ExploreBudget,
    Verdict,
    Witness,
    classify_rank3,
    explore,
    find_mutation_path,
)
from .quiver import Quiver, mutate_sequence
from .realization import acute_sign_flip, initial_realization, verify_class_realization
from .series import (
    Family,
    StandardForm,
    param_mutation,
    vanishing_arrow_catalogue,
    vanishing_pattern,
    verify_closure,
)
from .tables import TABLES, render_json, render_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_INVALID_VERTEX = 3
EXIT_INFINITE = 4
EXIT_BUDGET_EXHAUSTED = 5

_VERDICT_STATUS = {
    Verdict.FINITE: EXIT_OK,
    Verdict.INFINITE: EXIT_INFINITE,
    Verdict.BUDGET_EXHAUSTED: EXIT_BUDGET_EXHAUSTED,
}


def _emit(text: str, out: Optional[str] = None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_sequence(text: str) -> List[int]:
    """Parses "1,2,1" into 0-based vertices."""
    try:
        return [int(part) - 1 for part in text.split(",") if part.strip()]
    except ValueError:
        raise DocumentError(f"mutation sequence {text!r} is not a comma-separated list") from None


def _label_table(quiver: Quiver) -> str:
    lines = []
    for source, target, w in sorted(quiver.arrows(), key=lambda arrow: arrow[:2]):
        label = to_label(w)
        shown = str(label) if label is not None else f"{float(w):.6f}"
        lines.append(f"{source + 1} -> {target + 1}  {shown}")
    return "\n".join(lines) + "\n" if lines else "(no arrows)\n"


def _quiver_dict(quiver: Quiver) -> Dict[str, Any]:
    return document_to_dict(quiver_to_document(quiver))


def class_report_to_dict(report: ClassReport) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "verdict": report.verdict.value,
        "size": report.size,
        "mod_opposite": report.mod_opposite,
        "highest_denominator": report.highest_denominator,
        "acyclic_orbits": [len(orbit) for orbit in report.acyclic_orbits],
        "representatives": [_quiver_dict(q) for q in report.representatives],
    }
    if report.components:
        data["components"] = [component.size for component in report.components]
    witness = report.infiniteness_witness
    if witness is not None:
        data["witness"] = _witness_to_dict(witness)
    return data


def _witness_to_dict(witness: Witness) -> Dict[str, Any]:
    return {
        "sequence": [k + 1 for k in witness.sequence],
        "rule": witness.rule.value,
        "vertices": [v + 1 for v in witness.vertices],
        "quiver": _quiver_dict(witness.quiver),
    }


def _witness_text(witness: Witness) -> str:
    sequence = ",".join(str(k + 1) for k in witness.sequence) or "(seed)"
    vertices = ",".join(str(v + 1) for v in witness.vertices)
    return f"witness: {witness.rule.value} at {vertices} after {sequence}\n"


def _class_report_text(report: ClassReport) -> str:
    lines = [f"verdict: {report.verdict.value}"]
    if report.verdict is Verdict.FINITE:
        lines.append(f"size: {report.size}")
        if report.highest_denominator is None:
            lines.append("highest denominator: none (some weight is not a label)")
        else:
            lines.append(f"highest denominator: {report.highest_denominator}")
        lines.append(f"acyclic orbits: {len(report.acyclic_orbits)}")
    witness = report.infiniteness_witness
    text = "\n".join(lines) + "\n"
    if witness is not None:
        text += _witness_text(witness)
    return text


def _budget(args: argparse.Namespace, settings: Settings) -> ExploreBudget:
    return ExploreBudget(max_nodes=args.budget or settings.max_nodes)


def cmd_mutate(args: argparse.Namespace, settings: Settings) -> int:
    quiver = load_quiver(args.input)
    result = mutate_sequence(quiver, _parse_sequence(args.seq))
    sys.stdout.write(_label_table(result))
    if args.output is not None:
        _emit(dump_document(quiver_to_document(result)), args.output)
    return EXIT_OK


def cmd_explore(args: argparse.Namespace, settings: Settings) -> int:
    quiver = load_quiver(args.input)
    report = explore(quiver, _budget(args, settings), args.mod_opposite, settings)
    if args.report == "json":
        _emit(json.dumps(class_report_to_dict(report), indent=2) + "\n")
    else:
        _emit(_class_report_text(report))
    return _VERDICT_STATUS[report.verdict]


def cmd_classify_rank3(args: argparse.Namespace, settings: Settings) -> int:
    quiver = load_quiver(args.input)
    if quiver.rank != 3:
        raise DocumentError(f"classify-rank3 needs a rank-3 quiver, not rank {quiver.rank}")
    result = classify_rank3(quiver)
    _emit(f"{result.verdict.value}: {result.certificate}\n")
    return _VERDICT_STATUS[result.verdict]


def cmd_series(args: argparse.Namespace, settings: Settings) -> int:
    family = Family(args.family)
    if args.catalogue:
        for sf in vanishing_arrow_catalogue(family, args.n):
            _emit(f"{sf}  vanishing: {vanishing_pattern(sf)}\n")
        return EXIT_OK
    if args.form is not None:
        k, q, m, s = args.form
        sf = StandardForm(family, args.n, k, q, m, s)
        vertices = [args.vertex] if args.vertex else [1, 2, 3, 4]
        for vertex in vertices:
            result = param_mutation(sf, vertex)
            mapping = " ".join(f"{old}->{new}" for old, new in enumerate(result.vertex_map, 1))
            _emit(f"mu_{vertex}: {result.form}  case {result.case}  ({mapping})\n")
        return EXIT_OK
    report = verify_closure(family, args.n, matrix_check=not args.no_matrix, explore_class=args.size)
    _emit(
        f"{family.value} n={args.n}: {report.tuple_count} tuples,"
        f" {report.checked_matrices} matrix checks, {len(report.failures)} failures\n"
    )
    if report.class_size is not None:
        _emit(f"class size {report.class_size}, realized forms {report.realized_forms}\n")
    for failure in report.failures:
        _emit(f"  {failure.form} at {failure.vertex}: {failure.reason}\n")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_realize(args: argparse.Namespace, settings: Settings) -> int:
    quiver = load_quiver(args.input)
    budget = _budget(args, settings)
    report = verify_class_realization(quiver, budget, settings, check_corank=args.check_corank)
    if report.verdict is not Verdict.FINITE:
        witness = report.infiniteness_witness
        if args.report == "json":
            data: Dict[str, Any] = {
                "schema_version": SCHEMA_VERSION,
                "verdict": report.verdict.value,
            }
            if witness is not None:
                data["witness"] = _witness_to_dict(witness)
            _emit(json.dumps(data, indent=2) + "\n")
        else:
            _emit(f"verdict: {report.verdict.value}\n")
            if witness is not None:
                _emit(_witness_text(witness))
        return _VERDICT_STATUS[report.verdict]
    orbits = explore(quiver, budget, settings=settings).acyclic_orbits
    flips = [
        acute_sign_flip(initial_realization(orbit[0], budget, settings)) is not None
        for orbit in orbits
    ]
    if args.report == "json":
        data = {
            "schema_version": SCHEMA_VERSION,
            "verdict": report.verdict.value,
            "pairs": report.pairs,
            "quivers": report.quivers,
            "corank": report.corank,
            "type": report.quiver_type.value,
            "violations": [
                {"sequence": [k + 1 for k in v.path], "reason": v.reason}
                for v in report.violations
            ],
            "acyclic_orbits": len(orbits),
            "acute_flips": flips,
            "gram": gram_to_dict(
                initial_realization(quiver, budget, settings).gram, quiver.ambient
            ),
        }
        _emit(json.dumps(data, indent=2) + "\n")
    else:
        _emit(
            f"pairs: {report.pairs}\nquivers: {report.quivers}\n"
            f"corank: {report.corank} ({report.quiver_type.value})\n"
            f"violations: {len(report.violations)}\n"
            f"acyclic orbits: {len(orbits)}, with acute sign flip: {sum(flips)}\n"
        )
        for violation in report.violations:
            sequence = ",".join(str(k + 1) for k in violation.path)
            _emit(f"  after {sequence}: {violation.reason}\n")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_tables(args: argparse.Namespace, settings: Settings) -> int:
    rows = TABLES[args.which](settings=settings)
    if args.report == "json":
        _emit(render_json(args.which, rows))
    else:
        _emit(render_text(rows))
    return EXIT_OK if all(row.ok for row in rows) else EXIT_CHECK_FAILED


def cmd_export_dot(args: argparse.Namespace, settings: Settings) -> int:
    quiver = load_quiver(args.input)
    _emit(export_dot(quiver, name=Path(args.input).stem), args.output)
    return EXIT_OK


def cmd_path(args: argparse.Namespace, settings: Settings) -> int:
    first, second = load_quiver(args.first), load_quiver(args.second)
    if first.rank != second.rank:
        raise DocumentError("the two quivers have different ranks")
    path = find_mutation_path(first, second, args.max_depth)
    if path is None:
        _emit(f"no path of length at most {args.max_depth}\n")
        return EXIT_CHECK_FAILED
    _emit(",".join(str(k + 1) for k in path) + "\n")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmut", description="Mutation classes of quivers with real weights."
    )
    parser.add_argument(
        "--threads", type=int, default=None, help="worker threads (default: QMUT_THREADS or all cores)"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("mutate", help="apply a mutation sequence")
    p.add_argument("input")
    p.add_argument("--seq", required=True, help="1-based vertices, e.g. 1,3,2")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_mutate)

    p = commands.add_parser("explore", help="explore the mutation class")
    p.add_argument("input")
    p.add_argument("--budget", type=int, default=None, help="maximum class size to explore")
    p.add_argument("--mod-opposite", action="store_true")
    p.add_argument("--report", choices=["json", "text"], default="text")
    p.set_defaults(handler=cmd_explore)

    p = commands.add_parser("classify-rank3", help="decide finiteness of a rank-3 quiver")
    p.add_argument("input")
    p.set_defaults(handler=cmd_classify_rank3)

    p = commands.add_parser("series", help="check the rank-4 series")
    p.add_argument("--family", choices=[family.value for family in Family], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--form", type=int, nargs=4, metavar=("K", "Q", "M", "S"), default=None)
    p.add_argument("--vertex", type=int, choices=[1, 2, 3, 4], default=None)
    p.add_argument("--catalogue", action="store_true", help="list tuples with vanishing arrows")
    p.add_argument("--no-matrix", action="store_true", help="skip matrix-level checks")
    p.add_argument("--size", action="store_true", help="also explore the class")
    p.set_defaults(handler=cmd_series)

    p = commands.add_parser("realize", help="realize the class by reflections")
    p.add_argument("input")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--check-corank", action="store_true")
    p.add_argument("--report", choices=["json", "text"], default="text")
    p.set_defaults(handler=cmd_realize)

    p = commands.add_parser("tables", help="recompute a reference table")
    p.add_argument("which", choices=sorted(TABLES))
    p.add_argument("--report", choices=["json", "text"], default="text")
    p.set_defaults(handler=cmd_tables)

    p = commands.add_parser("export-dot", help="write a GraphViz graph")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_export_dot)

    p = commands.add_parser("path", help="find a mutation sequence between two quivers")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--max-depth", type=int, default=12)
    p.set_defaults(handler=cmd_path)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = Settings.from_env()
        if args.threads is not None:
            settings = replace(settings, threads=args.threads)
        return args.handler(args, settings)
    except DocumentError as e:
        print(f"qmut: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except VertexIndexError as e:
        print(f"qmut: {e}", file=sys.stderr)
        return EXIT_INVALID_VERTEX
    except RealizationError as e:
        print(f"qmut: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (ConditionError, ValueError) as e:
        print(f"qmut: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR
