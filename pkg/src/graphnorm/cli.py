"""Command line interface.

Subcommands mirror the library: ``closure``, ``minimize``, ``stats`` and
``diff-minimize`` operate on local files, ``describe`` emits a
machine-readable description of the computed statistics, and ``verify``
recomputes a description's statistics from its referenced sources and
compares. Results go to stdout (or ``--output``); diagnostics go to
stderr. Identical invocations produce byte-identical output.

Exit codes:

* 0 — success
* 1 — usage error, missing file, or other failure
* 2 — parse error in an input file
* 3 — unsafe rule (head variables or blanks unbound by the body)
* 4 — verification found mismatching statistics
* 5 — unsupported feature (RIF rule sources)
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import (
    GraphNormError,
    ParseError,
    UnsafeRuleError,
    UnsupportedFeatureError,
)
from .graph import Diff, Graph, skolemize
from .engine import incremental_reduce, reduce
from .provenance import (
    DEFAULT_GN_BASE,
    FileResolver,
    NormalisationSpec,
    RuleSource,
    compare_description,
    emit_description,
    load_dlogic,
    read_description,
    recompute,
)
from .rules import EMPTY_RULESET, RuleSet, compile_schema, parse_rules
from .stats import NamespaceDecl, StatsReport, compute_stats, counted_closure, decimal_string
from .turtle import parse_turtle, serialize_turtle

_EXIT_USAGE = 1
_EXIT_PARSE = 2
_EXIT_UNSAFE = 3
_EXIT_MISMATCH = 4
_EXIT_UNSUPPORTED = 5


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this tool reserves 2 for
    parse errors in input files, so usage errors exit with 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(_EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _gn_base() -> str:
    return os.environ.get("GN_BASE", DEFAULT_GN_BASE)


def _read_file(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_graph(path: str, base: str | None) -> Graph:
    graph = parse_turtle(_read_file(path), source=path)
    if base:
        graph = skolemize(graph, base)
    return graph


def _load_rules(args: argparse.Namespace) -> tuple[RuleSet, Graph]:
    """The explicit rules joined with rules compiled from the schema files."""
    rules = EMPTY_RULESET
    for path in args.rules or []:
        rules = rules | parse_rules(_read_file(path), source=path)
    aux = load_dlogic(args.dlogic or [], FileResolver("."))
    if aux:
        rules = rules | compile_schema(aux)
    return rules, aux


def _write_output(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _namespaces(args: argparse.Namespace) -> NamespaceDecl | None:
    if args.namespace:
        return NamespaceDecl(tuple(args.namespace))
    return None


def _report_rows(report: StatsReport) -> list[tuple[str, str]]:
    rows = [
        ("publishedTriples", str(report.published_cardinality)),
        ("closureTriples", str(report.closure_cardinality)),
        ("minimalTriples", str(report.minimal_cardinality)),
        ("redundancy", decimal_string(report.redundancy)),
    ]
    if report.out_link_density_plus is not None:
        rows.append(("outLinkDensityPlus", decimal_string(report.out_link_density_plus)))
    if report.out_link_density_minus is not None:
        rows.append(("outLinkDensityMinus", decimal_string(report.out_link_density_minus)))
    return rows


def _description_spec(args: argparse.Namespace) -> NormalisationSpec:
    sources = [RuleSource("n3", path) for path in args.rules or []]
    sources.extend(RuleSource("dlogic", path) for path in args.dlogic or [])
    if sources:
        return NormalisationSpec("mini_rdf", tuple(sources))
    return NormalisationSpec("none")


def _cmd_closure(args: argparse.Namespace) -> int:
    graph = _load_graph(args.data, args.base)
    rules, aux = _load_rules(args)
    closed = counted_closure(graph, rules, aux)
    _write_output(serialize_turtle(closed), args.output)
    return 0


def _cmd_minimize(args: argparse.Namespace) -> int:
    graph = _load_graph(args.data, args.base)
    rules, aux = _load_rules(args)
    minimal = reduce(graph, rules, aux)
    _write_output(serialize_turtle(minimal), args.output)
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    graph = _load_graph(args.data, args.base)
    rules, aux = _load_rules(args)
    report = compute_stats(graph, rules, aux, _namespaces(args))
    if args.format == "turtle":
        dataset = args.dataset or args.data
        text = emit_description(dataset, report, _description_spec(args),
                                namespaces=_namespaces(args), gn_base=_gn_base())
    else:
        rows = _report_rows(report)
        if args.format == "tsv":
            text = "".join(f"{name}\t{value}\n" for name, value in rows)
        else:
            width = max(len(name) for name, _ in rows)
            text = "".join(f"{name.ljust(width)}  {value}\n" for name, value in rows)
    _write_output(text, args.output)
    return 0


def _cmd_diff_minimize(args: argparse.Namespace) -> int:
    prev_min = _load_graph(args.prev_min, args.base)
    full = _load_graph(args.full, args.base)
    insertions = _load_graph(args.insert, args.base) if args.insert else Graph()
    deletions = _load_graph(args.delete, args.base) if args.delete else Graph()
    rules, aux = _load_rules(args)
    result = incremental_reduce(
        prev_min, Diff(insertions, deletions), rules, aux, full=full
    )
    print(f"fallback: {'true' if result.used_fallback else 'false'}", file=sys.stderr)
    _write_output(serialize_turtle(result.graph), args.output)
    return 0


def _cmd_describe(args: argparse.Namespace) -> int:
    graph = _load_graph(args.data, args.base)
    rules, aux = _load_rules(args)
    report = compute_stats(graph, rules, aux, _namespaces(args))
    dataset = args.dataset or args.data
    text = emit_description(dataset, report, _description_spec(args),
                            namespaces=_namespaces(args), gn_base=_gn_base())
    _write_output(text, args.output)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    text = _read_file(args.description)
    base_dir = os.path.dirname(os.path.abspath(args.description))
    description = read_description(text, source=args.description, gn_base=_gn_base())
    report = recompute(text, FileResolver(base_dir), gn_base=_gn_base())
    mismatches = compare_description(description, report, gn_base=_gn_base())
    if mismatches:
        _write_output("".join(f"mismatch: {m}\n" for m in mismatches), args.output)
        return _EXIT_MISMATCH
    _write_output(f"ok: {len(description.items)} statistics verified\n", args.output)
    return 0


def _add_rule_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rules", action="append", metavar="FILE",
                        help="rule file ({ body } => { head } .); may repeat")
    parser.add_argument("--dlogic", action="append", metavar="FILE",
                        help="schema graph in Turtle, compiled to rules; "
                             "owl:imports are followed relative to the "
                             "working directory; may repeat")


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, metavar="FILE",
                        help="data graph in Turtle")
    _add_rule_flags(parser)
    parser.add_argument("--base", metavar="IRI",
                        help="skolemize blank nodes under this IRI scope")
    parser.add_argument("--output", metavar="FILE",
                        help="write the result here instead of stdout")


def _add_stat_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--namespace", action="append", metavar="IRI",
                        help="dataset namespace prefix for out-link "
                             "densities; may repeat")
    parser.add_argument("--dataset", metavar="LOCATOR",
                        help="dataset locator to record in descriptions "
                             "(defaults to the --data path)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphnorm",
                     description="Provenance-qualified statistics over RDF graphs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("closure", help="materialize the closure of a graph under rules")
    _add_data_flags(p)
    p.set_defaults(func=_cmd_closure)

    p = sub.add_parser("minimize", help="remove triples the rules re-derive")
    _add_data_flags(p)
    p.set_defaults(func=_cmd_minimize)

    p = sub.add_parser("stats", help="compute cardinalities, redundancy and densities")
    _add_data_flags(p)
    _add_stat_flags(p)
    p.add_argument("--format", choices=("table", "tsv", "turtle"), default="table",
                   help="output format (default: table)")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("diff-minimize",
                       help="update a minimal graph after insertions and deletions")
    p.add_argument("--prev-min", required=True, metavar="FILE",
                   help="previous minimal graph in Turtle")
    p.add_argument("--full", required=True, metavar="FILE",
                   help="the updated full graph in Turtle")
    p.add_argument("--insert", metavar="FILE", help="graph of inserted triples")
    p.add_argument("--delete", metavar="FILE", help="graph of deleted triples")
    _add_rule_flags(p)
    p.add_argument("--base", metavar="IRI",
                   help="skolemize blank nodes under this IRI scope")
    p.add_argument("--output", metavar="FILE",
                   help="write the result here instead of stdout")
    p.set_defaults(func=_cmd_diff_minimize)

    p = sub.add_parser("describe",
                       help="emit a machine-readable description of the statistics")
    _add_data_flags(p)
    _add_stat_flags(p)
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser("verify",
                       help="recompute a description's statistics and compare")
    p.add_argument("description", metavar="FILE", help="description to verify")
    p.add_argument("--output", metavar="FILE",
                   help="write the report here instead of stdout")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"graphnorm: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except UnsafeRuleError as exc:
        print(f"graphnorm: {exc}", file=sys.stderr)
        return _EXIT_UNSAFE
    except UnsupportedFeatureError as exc:
        print(f"graphnorm: {exc}", file=sys.stderr)
        return _EXIT_UNSUPPORTED
    except (GraphNormError, OSError, ValueError) as exc:
        print(f"graphnorm: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
