"""Machine-readable descriptions of how each statistic was computed.

A description is Turtle built from the void/scovo vocabularies plus a
small statistics vocabulary (default base ``http://purl.org/gn#``): the
dataset is a ``void:Dataset`` whose ``void:statItem`` nodes each carry a
``scovo:dimension``, an ``rdf:value``, and, when the statistic depends on
rules, a ``gn:normalisation`` node pointing at the rule sources::

    <data.ttl> a void:Dataset ;
        void:statItem [
            scovo:dimension gn:redundancy ;
            rdf:value 0.5 ;
            gn:normalisation [
                a gn:MiniRDF ;
                gn:rules [ a gn:RuleSet ; gn:n3 <rules.n3> ; gn:dlogic <vocab.ttl> ]
            ]
        ] .

The writer emits bracketed anonymous nodes and relative locator
references; the reader here accepts them for this shape only (data graphs
go through the strict parser). recompute() re-runs the whole pipeline
from the referenced sources: fetch the dataset, fetch the n3 rules, fetch
the dlogic graphs following owl:imports to a fixpoint, compile the dlogic
to rules, reduce with the dlogic as auxiliary support, and recount.
Locators resolve through an injected resolver; only local files are
supported, and RIF rule sources are rejected as unsupported.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable
from urllib.parse import urlsplit
from urllib.request import url2pathname

from .errors import GraphNormError, ResolverError, UnsupportedFeatureError
from .graph import EMPTY_GRAPH, Graph
from .lex import (
    AT,
    BLANK,
    COMMA,
    DECIMAL,
    DOT,
    DTMARK,
    EOF,
    INTEGER,
    IRIREF,
    KW_A,
    LBRACKET,
    PNAME,
    RBRACKET,
    SEMI,
    STRING,
    tokenize,
)
from .rules import EMPTY_RULESET, OWL_IMPORTS, RuleSet, compile_schema, parse_rules
from .stats import NamespaceDecl, StatsReport, canonical_ratio, decimal_string, compute_stats
from .terms import IRI, RDF_NS, XSD_DECIMAL, XSD_INTEGER
from .turtle import _TokenCursor, parse_turtle

DEFAULT_GN_BASE = "http://purl.org/gn#"
VOID_NS = "http://rdfs.org/ns/void#"
SCOVO_NS = "http://purl.org/NET/scovo#"

_RDF_TYPE = RDF_NS + "type"
_RDF_VALUE = RDF_NS + "value"
_VOID_DATASET = VOID_NS + "Dataset"
_VOID_STAT_ITEM = VOID_NS + "statItem"
_SCOVO_DIMENSION = SCOVO_NS + "dimension"

_SOURCE_FORMATS = ("n3", "dlogic", "rif")
_KINDS = ("none", "closure", "mini_rdf")


class _Gn:
    """The statistics vocabulary under a configurable base IRI."""

    def __init__(self, base: str):
        self.base = base
        self.mini_rdf = base + "MiniRDF"
        self.closure = base + "Closure"
        self.rule_set = base + "RuleSet"
        self.constraint_set = base + "ConstraintSet"
        self.normalisation = base + "normalisation"
        self.rules = base + "rules"
        self.constraints = base + "constraints"
        self.namespace = base + "namespace"
        self.n3 = base + "n3"
        self.dlogic = base + "dlogic"
        self.rif = base + "rif"
        self.dim_published = base + "publishedTriples"
        self.dim_closure = base + "closureTriples"
        self.dim_minimal = base + "minimalTriples"
        self.dim_redundancy = base + "redundancy"
        self.dim_density_plus = base + "outLinkDensityPlus"
        self.dim_density_minus = base + "outLinkDensityMinus"


@dataclass(frozen=True)
class RuleSource:
    format: str
    locator: str

    def __post_init__(self) -> None:
        if self.format not in _SOURCE_FORMATS:
            raise ValueError(f"unknown rule source format: {self.format!r}")


@dataclass(frozen=True)
class NormalisationSpec:
    kind: str
    rule_sources: tuple[RuleSource, ...] = ()
    constraints: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown normalisation kind: {self.kind!r}")
        if self.kind == "none" and self.rule_sources:
            raise ValueError("a 'none' normalisation cannot carry rule sources")
        if self.constraints:
            raise ValueError("constraints are always empty in this version")


@dataclass(frozen=True)
class StatDescription:
    dataset: str
    dimension: str
    value: int | Fraction
    normalisation: NormalisationSpec


@dataclass(frozen=True)
class Description:
    dataset: str
    items: tuple[StatDescription, ...]
    namespaces: tuple[str, ...] = ()

    @property
    def normalisation(self) -> NormalisationSpec:
        specs = {item.normalisation for item in self.items}
        if len(specs) > 1:
            raise GraphNormError("description carries inconsistent normalisation specs")
        return specs.pop() if specs else NormalisationSpec("none")


Resolver = Callable[[str], str]


@dataclass(frozen=True)
class FileResolver:
    """Resolves plain paths and file: IRIs against a base directory."""

    base_dir: str = "."

    def resolve_path(self, locator: str) -> str:
        split = urlsplit(locator)
        if split.scheme == "file":
            return url2pathname(split.path)
        if split.scheme and len(split.scheme) > 1:
            raise ResolverError(f"only local file locators are supported: {locator!r}")
        if os.path.isabs(locator):
            return locator
        return os.path.join(self.base_dir, locator)

    def __call__(self, locator: str) -> str:
        path = self.resolve_path(locator)
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return handle.read()
        except OSError as exc:
            raise ResolverError(f"cannot resolve {locator!r}: {exc}") from None


def _ratio_text(value: Fraction) -> str:
    return decimal_string(canonical_ratio(value))


def _report_values(report: StatsReport, gn: _Gn) -> list[tuple[str, str]]:
    pairs = [
        (gn.dim_published, str(report.published_cardinality)),
        (gn.dim_closure, str(report.closure_cardinality)),
        (gn.dim_minimal, str(report.minimal_cardinality)),
        (gn.dim_redundancy, _ratio_text(report.redundancy)),
    ]
    if report.out_link_density_plus is not None:
        pairs.append((gn.dim_density_plus, _ratio_text(report.out_link_density_plus)))
    if report.out_link_density_minus is not None:
        pairs.append((gn.dim_density_minus, _ratio_text(report.out_link_density_minus)))
    return sorted(pairs)


def emit_description(dataset: str, report: StatsReport, spec: NormalisationSpec,
                     *, namespaces: NamespaceDecl | None = None,
                     gn_base: str = DEFAULT_GN_BASE) -> str:
    """Render a deterministic description of the report.

    Stat items are sorted by dimension IRI; equal inputs produce
    byte-identical output. Datasets with out-link densities must supply
    the namespace declaration, otherwise the densities could never be
    recomputed from the description alone.
    """
    gn = _Gn(gn_base)
    has_density = (report.out_link_density_plus is not None
                   or report.out_link_density_minus is not None)
    if has_density and namespaces is None:
        raise ValueError("reports with out-link densities need the namespace declaration")

    def pname(iri: str) -> str:
        return "gn:" + iri[len(gn.base):]

    norm_lines: list[str] = []
    if spec.kind != "none":
        kind_class = pname(gn.mini_rdf) if spec.kind == "mini_rdf" else pname(gn.closure)
        norm_lines.append("        gn:normalisation [")
        norm_lines.append(f"            a {kind_class} ;")
        norm_lines.append("            gn:rules [")
        norm_lines.append("                a gn:RuleSet" + (" ;" if spec.rule_sources else ""))
        by_format: dict[str, list[str]] = {}
        for src in spec.rule_sources:
            by_format.setdefault(src.format, []).append(src.locator)
        fmt_rows = []
        for fmt in _SOURCE_FORMATS:
            if fmt in by_format:
                refs = ", ".join(f"<{loc}>" for loc in by_format[fmt])
                fmt_rows.append(f"                gn:{fmt} {refs}")
        norm_lines.extend(row + (" ;" if i < len(fmt_rows) - 1 else "")
                          for i, row in enumerate(fmt_rows))
        if spec.kind == "mini_rdf":
            norm_lines.append("            ] ;")
            norm_lines.append("            gn:constraints [ a gn:ConstraintSet ]")
        else:
            norm_lines.append("            ]")
        norm_lines.append("        ]")

    items: list[str] = []
    for dim, value in _report_values(report, gn):
        lines = [
            "    void:statItem [",
            f"        scovo:dimension {pname(dim)} ;",
            f"        rdf:value {value}" + (" ;" if norm_lines else ""),
        ]
        lines.extend(norm_lines)
        lines.append("    ]")
        items.append("\n".join(lines))

    header = [
        f"@prefix gn: <{gn.base}> .",
        f"@prefix rdf: <{RDF_NS}> .",
        f"@prefix scovo: <{SCOVO_NS}> .",
        f"@prefix void: <{VOID_NS}> .",
        "",
    ]
    subject_lines = [f"<{dataset}> a void:Dataset ;"]
    if namespaces is not None:
        refs = ", ".join(f"<{p}>" for p in namespaces.prefixes)
        subject_lines.append(f"    gn:namespace {refs} ;")
    body = " ;\n".join(items)
    return "\n".join(header + subject_lines) + "\n" + body + " .\n"


class _Ref(str):
    """An IRI reference as written, possibly relative."""


class _DescriptionReader:
    def __init__(self, text: str, source: str | None):
        self.cur = _TokenCursor(tokenize(text, source), source)
        self.prefixes: dict[str, str] = {}

    def read(self) -> dict[_Ref, dict[str, list]]:
        subjects: dict[_Ref, dict[str, list]] = {}
        while True:
            tok = self.cur.peek()
            if tok.kind == EOF:
                break
            if tok.kind == AT:
                self._directive()
                continue
            subject = self._subject()
            props = subjects.setdefault(subject, {})
            self._predicate_object_list(props, closing=DOT)
        return subjects

    def _directive(self) -> None:
        tok = self.cur.next()
        if tok.value != "prefix":
            raise self.cur.error(f"unsupported directive '@{tok.value}'", tok)
        name = self.cur.expect(PNAME, "a prefix name ending in ':'")
        prefix, _, local = name.value.partition(":")
        if local:
            raise self.cur.error("prefix declarations take a bare 'name:' form", name)
        iri = self.cur.expect(IRIREF, "an IRI")
        self.cur.expect(DOT, "'.'")
        self.prefixes[prefix] = iri.value

    def _subject(self) -> _Ref:
        tok = self.cur.next()
        if tok.kind == IRIREF:
            return _Ref(tok.value)
        if tok.kind == PNAME:
            return _Ref(self._expand(tok))
        raise self.cur.error(f"expected a subject IRI, got {tok.value!r}", tok)

    def _expand(self, tok) -> str:
        prefix, _, local = tok.value.partition(":")
        if prefix not in self.prefixes:
            raise self.cur.error(f"undeclared prefix '{prefix}:'", tok)
        return self.prefixes[prefix] + local

    def _predicate_object_list(self, props: dict[str, list], closing: str) -> None:
        while True:
            tok = self.cur.next()
            if tok.kind == KW_A:
                predicate = _RDF_TYPE
            elif tok.kind == IRIREF:
                predicate = tok.value
            elif tok.kind == PNAME:
                predicate = self._expand(tok)
            else:
                raise self.cur.error(f"expected a predicate, got {tok.value!r}", tok)
            values = props.setdefault(predicate, [])
            while True:
                values.append(self._object())
                if self.cur.peek().kind == COMMA:
                    self.cur.next()
                    continue
                break
            tok = self.cur.next()
            if tok.kind == SEMI:
                if self.cur.peek().kind == closing:
                    self.cur.next()
                    return
                continue
            if tok.kind == closing:
                return
            raise self.cur.error(f"expected ';' or end of node, got {tok.value!r}", tok)

    def _object(self):
        tok = self.cur.next()
        if tok.kind == IRIREF:
            return _Ref(tok.value)
        if tok.kind == PNAME:
            return _Ref(self._expand(tok))
        if tok.kind == INTEGER:
            return int(tok.value)
        if tok.kind == DECIMAL:
            return Fraction(tok.value)
        if tok.kind == STRING:
            value = tok.value
            nxt = self.cur.peek()
            if nxt.kind == AT:
                self.cur.next()
                return value
            if nxt.kind == DTMARK:
                self.cur.next()
                dt = self.cur.next()
                if dt.kind == IRIREF:
                    datatype = dt.value
                elif dt.kind == PNAME:
                    datatype = self._expand(dt)
                else:
                    raise self.cur.error("expected a datatype IRI after '^^'", dt)
                if datatype == XSD_INTEGER:
                    return int(value)
                if datatype == XSD_DECIMAL:
                    return Fraction(value)
            return value
        if tok.kind == LBRACKET:
            props: dict[str, list] = {}
            if self.cur.peek().kind == RBRACKET:
                self.cur.next()
                return props
            self._predicate_object_list(props, closing=RBRACKET)
            return props
        if tok.kind == BLANK:
            raise self.cur.error("labeled blank nodes are not supported in descriptions", tok)
        raise self.cur.error(f"expected an object, got {tok.value!r}", tok)


def _one(props: dict, predicate: str, what: str):
    values = props.get(predicate, [])
    if len(values) != 1:
        raise GraphNormError(f"description item needs exactly one {what}")
    return values[0]


def _read_spec(props: dict, gn: _Gn) -> NormalisationSpec:
    nodes = props.get(gn.normalisation, [])
    if not nodes:
        return NormalisationSpec("none")
    node = nodes[0]
    if not isinstance(node, dict):
        raise GraphNormError("gn:normalisation must be an anonymous node")
    types = node.get(_RDF_TYPE, [])
    if _Ref(gn.mini_rdf) in types:
        kind = "mini_rdf"
    elif _Ref(gn.closure) in types:
        kind = "closure"
    else:
        raise GraphNormError("gn:normalisation node carries no recognized kind")
    sources: list[RuleSource] = []
    for rules_node in node.get(gn.rules, []):
        if not isinstance(rules_node, dict):
            raise GraphNormError("gn:rules must be an anonymous node")
        for fmt, pred in (("n3", gn.n3), ("dlogic", gn.dlogic), ("rif", gn.rif)):
            for ref in rules_node.get(pred, []):
                sources.append(RuleSource(fmt, str(ref)))
    return NormalisationSpec(kind, tuple(sources))


def read_description(text: str, source: str | None = None,
                     *, gn_base: str = DEFAULT_GN_BASE) -> Description:
    """Parse a description; exactly one void:Dataset is expected."""
    gn = _Gn(gn_base)
    subjects = _DescriptionReader(text, source).read()
    datasets = [
        (subject, props)
        for subject, props in subjects.items()
        if _Ref(_VOID_DATASET) in props.get(_RDF_TYPE, [])
    ]
    if len(datasets) != 1:
        raise GraphNormError(f"description must contain exactly one void:Dataset, found {len(datasets)}")
    dataset, props = datasets[0]
    items: list[StatDescription] = []
    for item_node in props.get(_VOID_STAT_ITEM, []):
        if not isinstance(item_node, dict):
            raise GraphNormError("void:statItem must be an anonymous node")
        dimension = _one(item_node, _SCOVO_DIMENSION, "scovo:dimension")
        value = _one(item_node, _RDF_VALUE, "rdf:value")
        if not isinstance(value, (int, Fraction)):
            raise GraphNormError(f"rdf:value must be numeric, got {value!r}")
        spec = _read_spec(item_node, gn)
        items.append(StatDescription(str(dataset), str(dimension), value, spec))
    namespaces = tuple(str(ref) for ref in props.get(gn.namespace, []))
    description = Description(str(dataset), tuple(items), namespaces)
    description.normalisation  # reject inconsistent specs early
    return description


def load_dlogic(sources: Iterable[str], resolver: Resolver) -> Graph:
    """Fetch and merge schema graphs, following owl:imports to a fixpoint.

    Each locator is fetched at most once, so import cycles terminate.
    """
    queue = list(sources)
    visited: set[str] = set()
    merged = EMPTY_GRAPH
    while queue:
        locator = queue.pop(0)
        if locator in visited:
            continue
        visited.add(locator)
        graph = parse_turtle(resolver(locator), source=locator)
        merged = merged | graph
        for t in graph.triples:
            if t.predicate == OWL_IMPORTS and isinstance(t.object, IRI):
                queue.append(t.object.value)
    return merged


def recompute(text: str, resolver: Resolver, *, gn_base: str = DEFAULT_GN_BASE) -> StatsReport:
    """Re-run the statistics pipeline a description points at.

    Fetches the dataset and every rule source through the resolver,
    compiles dlogic schemas (following owl:imports once each, cycles
    included) into rules, joins them with the parsed n3 rules, and
    recomputes the full report with the dlogic graphs as auxiliary
    support. RIF sources are unsupported.
    """
    description = read_description(text, gn_base=gn_base)
    spec = description.normalisation
    if any(src.format == "rif" for src in spec.rule_sources):
        raise UnsupportedFeatureError("unsupported: RIF")
    rules = EMPTY_RULESET
    aux = EMPTY_GRAPH
    if spec.kind != "none":
        for src in spec.rule_sources:
            if src.format == "n3":
                rules = rules | parse_rules(resolver(src.locator), source=src.locator)
        aux = load_dlogic(
            (s.locator for s in spec.rule_sources if s.format == "dlogic"), resolver
        )
        rules = rules | compile_schema(aux)
    dataset_graph = parse_turtle(resolver(description.dataset), source=description.dataset)
    namespaces = NamespaceDecl(description.namespaces) if description.namespaces else None
    return compute_stats(dataset_graph, rules, aux, namespaces)


def compare_description(description: Description, report: StatsReport,
                        *, gn_base: str = DEFAULT_GN_BASE) -> list[str]:
    """Describe every stated value that the recomputed report contradicts."""
    gn = _Gn(gn_base)
    integer_dims = {
        gn.dim_published: report.published_cardinality,
        gn.dim_closure: report.closure_cardinality,
        gn.dim_minimal: report.minimal_cardinality,
    }
    ratio_dims = {
        gn.dim_redundancy: report.redundancy,
        gn.dim_density_plus: report.out_link_density_plus,
        gn.dim_density_minus: report.out_link_density_minus,
    }
    mismatches: list[str] = []
    for item in description.items:
        if item.dimension in integer_dims:
            expected = integer_dims[item.dimension]
            if Fraction(item.value) != Fraction(expected):
                mismatches.append(
                    f"{item.dimension}: stated {item.value}, recomputed {expected}"
                )
        elif item.dimension in ratio_dims:
            recomputed = ratio_dims[item.dimension]
            if recomputed is None:
                mismatches.append(f"{item.dimension}: stated {item.value}, not recomputable")
            elif Fraction(item.value) != canonical_ratio(recomputed):
                mismatches.append(
                    f"{item.dimension}: stated {decimal_string(Fraction(item.value))}, "
                    f"recomputed {_ratio_text(recomputed)}"
                )
        else:
            mismatches.append(f"unknown dimension {item.dimension}")
    return mismatches
