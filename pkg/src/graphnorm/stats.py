"""Graph statistics: cardinalities, redundancy, and out-link densities.

All ratios are exact rationals (fractions.Fraction). For reports they are
rendered as decimals with at most six fractional digits, rounded half to
even; decimal_string and canonical_ratio implement that one rule so that
emission and verification agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .engine import closure, reduce
from .errors import EmptyGraphError
from .graph import EMPTY_GRAPH, Graph
from .rules import RuleSet
from .terms import IRI, Triple, is_absolute_iri


@dataclass(frozen=True)
class NamespaceDecl:
    """The IRI prefixes a dataset considers its own."""

    prefixes: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.prefixes:
            raise ValueError("a namespace declaration needs at least one prefix")
        for p in self.prefixes:
            if not is_absolute_iri(p):
                raise ValueError(f"namespace prefix is not an absolute IRI: {p!r}")
        for a in self.prefixes:
            for b in self.prefixes:
                if a != b and b.startswith(a):
                    raise ValueError(f"nested namespace prefixes: {a!r} contains {b!r}")

    def owns(self, iri: str) -> bool:
        return any(iri.startswith(p) for p in self.prefixes)


@dataclass(frozen=True)
class StatsReport:
    published_cardinality: int
    closure_cardinality: int
    minimal_cardinality: int
    redundancy: Fraction
    out_link_density_plus: Fraction | None = None
    out_link_density_minus: Fraction | None = None
    fallback_used: bool = False


def counted_closure(graph: Graph, rules: RuleSet, aux: Graph = EMPTY_GRAPH) -> Graph:
    """The closure as counted by the statistics.

    Auxiliary triples support inference but belong to the count only where
    they overlap the published graph, keeping published <= closure.
    """
    return closure(graph | aux, rules).graph - (aux - graph)


def redundancy(graph: Graph, rules: RuleSet, aux: Graph = EMPTY_GRAPH) -> Fraction:
    """1 - |minimized| / |graph|, exact."""
    if not graph:
        raise EmptyGraphError("redundancy is undefined for an empty graph")
    minimal = reduce(graph, rules, aux)
    return Fraction(1) - Fraction(len(minimal), len(graph))


def out_links(graph: Graph, namespaces: NamespaceDecl) -> Graph:
    """Triples pointing from a dataset subject to any external IRI.

    Literal and blank objects are never out-links, nor are blank subjects.
    """
    selected: list[Triple] = []
    for t in graph.triples:
        if not isinstance(t.subject, IRI) or not namespaces.owns(t.subject.value):
            continue
        if isinstance(t.object, IRI) and not namespaces.owns(t.object.value):
            selected.append(t)
    return Graph(selected)


def out_link_density(graph: Graph, rules: RuleSet, aux: Graph,
                     namespaces: NamespaceDecl, mode: str) -> Fraction:
    """Share of out-links in the closure ('plus') or minimization ('minus')."""
    if mode not in ("plus", "minus"):
        raise ValueError(f"mode must be 'plus' or 'minus', got {mode!r}")
    if mode == "plus":
        normalized = counted_closure(graph, rules, aux)
    else:
        normalized = reduce(graph, rules, aux)
    if not normalized:
        raise EmptyGraphError(f"out-link density ({mode}) is undefined: normalized graph is empty")
    return Fraction(len(out_links(normalized, namespaces)), len(normalized))


def compute_stats(graph: Graph, rules: RuleSet, aux: Graph = EMPTY_GRAPH,
                  namespaces: NamespaceDecl | None = None) -> StatsReport:
    """All statistics in one pass over one closure and one minimization."""
    if not graph:
        raise EmptyGraphError("statistics are undefined for an empty graph")
    closed = counted_closure(graph, rules, aux)
    minimal = reduce(graph, rules, aux)
    plus = minus = None
    if namespaces is not None:
        if not minimal:
            raise EmptyGraphError("out-link density (minus) is undefined: minimized graph is empty")
        plus = Fraction(len(out_links(closed, namespaces)), len(closed))
        minus = Fraction(len(out_links(minimal, namespaces)), len(minimal))
    return StatsReport(
        published_cardinality=len(graph),
        closure_cardinality=len(closed),
        minimal_cardinality=len(minimal),
        redundancy=Fraction(1) - Fraction(len(minimal), len(graph)),
        out_link_density_plus=plus,
        out_link_density_minus=minus,
    )


_RATIO_PLACES = 6
_RATIO_SCALE = 10 ** _RATIO_PLACES


def canonical_ratio(value: Fraction) -> Fraction:
    """Round to six decimal places, half to even."""
    return Fraction(round(value * _RATIO_SCALE), _RATIO_SCALE)


def decimal_string(value: Fraction) -> str:
    """Canonical decimal text for a ratio; always keeps one fractional digit."""
    scaled = round(value * _RATIO_SCALE)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, _RATIO_SCALE)
    digits = f"{frac:0{_RATIO_PLACES}d}".rstrip("0") or "0"
    return f"{sign}{whole}.{digits}"
