"""Immutable graphs, diffs between graph versions, and skolemization.

A Graph is a duplicate-free set of ground triples with value semantics:
two graphs are equal when they hold the same triples, regardless of how
they were built. Iteration always follows the canonical order so that
serialization and minimization are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .terms import IRI, BlankNode, Triple, is_absolute_iri


class Graph:
    """An immutable set of ground triples iterated in canonical order."""

    __slots__ = ("_triples", "_sorted", "__weakref__")

    def __init__(self, triples: Iterable[Triple] = ()):
        frozen = frozenset(triples)
        for t in frozen:
            if not isinstance(t, Triple):
                raise TypeError(f"graphs hold Triple values, got {t!r}")
        self._triples: frozenset[Triple] = frozen
        self._sorted: tuple[Triple, ...] | None = None

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __bool__(self) -> bool:
        return bool(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._triples, key=Triple.sort_key))
        return iter(self._sorted)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __or__(self, other: "Graph") -> "Graph":
        return Graph(self._triples | other._triples)

    def __sub__(self, other: "Graph") -> "Graph":
        return Graph(self._triples - other._triples)

    def __and__(self, other: "Graph") -> "Graph":
        return Graph(self._triples & other._triples)

    def add(self, triple: Triple) -> "Graph":
        return Graph(self._triples | {triple})

    def discard(self, triple: Triple) -> "Graph":
        return Graph(self._triples - {triple})

    def __repr__(self) -> str:
        return f"Graph({len(self._triples)} triples)"


EMPTY_GRAPH = Graph()


def _empty_graph() -> Graph:
    return EMPTY_GRAPH


@dataclass(frozen=True)
class Diff:
    """Insertions and deletions between two graph versions.

    A triple listed on both sides is a no-op and is dropped from both, so
    the two sides are always disjoint.
    """

    insertions: Graph = field(default_factory=_empty_graph)
    deletions: Graph = field(default_factory=_empty_graph)

    def __post_init__(self) -> None:
        common = self.insertions & self.deletions
        if common:
            object.__setattr__(self, "insertions", self.insertions - common)
            object.__setattr__(self, "deletions", self.deletions - common)


def apply_diff(graph: Graph, diff: Diff) -> Graph:
    """Delete first, then insert; inserting a present triple is a no-op."""
    return (graph - diff.deletions) | diff.insertions


def skolemize(graph: Graph, scope: str | IRI) -> Graph:
    """Replace every blank node with a scope-qualified genid IRI.

    The same label always maps to the same IRI, so the result is
    deterministic and graphs already free of blanks pass through unchanged.
    """
    scope_value = scope.value if isinstance(scope, IRI) else scope
    if not is_absolute_iri(scope_value):
        raise ValueError(f"skolemization scope must be an absolute IRI: {scope_value!r}")
    prefix = scope_value.rstrip("/") + "/.well-known/genid/"

    def convert(term):
        if isinstance(term, BlankNode):
            return IRI(prefix + term.label)
        return term

    return Graph(
        Triple(convert(t.subject), t.predicate, convert(t.object)) for t in graph.triples
    )
