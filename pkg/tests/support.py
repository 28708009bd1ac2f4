"""Shared test helpers: an independent closure oracle and random instances.

The oracle is a deliberately naive fixpoint: every rule is matched against
every combination of facts on every pass, with no indexes, no deltas and
no goal direction, so it shares no code path with the engine under test.
"""

from __future__ import annotations

import random
from pathlib import Path

from graphnorm import Graph, IRI, Literal, Triple, Variable, compile_schema
from graphnorm.rules import (
    OWL_INVERSEOF,
    OWL_SYMMETRIC,
    OWL_TRANSITIVE,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
)
from graphnorm.terms import RDF_TYPE

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def _match_pattern(pattern, triple, binding):
    extended = dict(binding)
    pairs = (
        (pattern.subject, triple.subject),
        (pattern.predicate, triple.predicate),
        (pattern.object, triple.object),
    )
    for want, got in pairs:
        if isinstance(want, Variable):
            if want.name in extended:
                if extended[want.name] != got:
                    return None
            else:
                extended[want.name] = got
        elif want != got:
            return None
    return extended


def _all_bindings(atoms, facts, binding):
    if not atoms:
        yield binding
        return
    for fact in facts:
        extended = _match_pattern(atoms[0], fact, binding)
        if extended is not None:
            yield from _all_bindings(atoms[1:], facts, extended)


def _ground(term, binding):
    if isinstance(term, Variable):
        return binding[term.name]
    return term


def naive_closure(graph: Graph, rules) -> frozenset[Triple]:
    """Brute-force closure by repeated full passes until nothing new appears."""
    facts = set(graph.triples)
    while True:
        snapshot = frozenset(facts)
        fresh = set()
        for rule in rules:
            for binding in _all_bindings(tuple(rule.body), snapshot, {}):
                for atom in rule.head:
                    s = _ground(atom.subject, binding)
                    p = _ground(atom.predicate, binding)
                    o = _ground(atom.object, binding)
                    try:
                        fact = Triple(s, p, o)
                    except ValueError:
                        continue
                    if fact not in facts:
                        fresh.add(fact)
        if not fresh:
            return frozenset(facts)
        facts |= fresh


DATA_NS = "http://inst.test/d/"
EXT_NS = "http://other.test/d/"
PRED_NS = "http://inst.test/p/"
CLASS_NS = "http://inst.test/c/"

_SCHEMA_KINDS = ("domain", "range", "inverse", "symmetric", "transitive", "subclass")


def random_instance(rng: random.Random, *, max_triples: int = 12, max_nodes: int = 6,
                    max_rules: int = 4, external: bool = False, literals: bool = False):
    """A random (graph, compiled ruleset) pair over a small constant universe.

    Returns (graph, rules, universe) where universe is the candidate term
    vocabulary: (subjects, predicates, objects).
    """
    nodes = [IRI(DATA_NS + f"n{i}") for i in range(rng.randint(2, max_nodes))]
    preds = [IRI(PRED_NS + f"p{i}") for i in range(rng.randint(1, 2))]
    classes = [IRI(CLASS_NS + f"C{i}") for i in range(1, 3)]
    objects: list = list(nodes)
    if external:
        objects.append(IRI(EXT_NS + "x0"))
    if literals:
        objects.append(Literal("twelve"))
        objects.append(Literal("12", datatype="http://www.w3.org/2001/XMLSchema#integer"))

    triples = set()
    for _ in range(rng.randint(1, max_triples)):
        if rng.random() < 0.3:
            triples.add(Triple(rng.choice(nodes), RDF_TYPE, rng.choice(classes)))
        else:
            triples.add(Triple(rng.choice(nodes), rng.choice(preds), rng.choice(objects)))
    graph = Graph(triples)

    schema = set()
    for _ in range(rng.randint(0, max_rules)):
        kind = rng.choice(_SCHEMA_KINDS)
        if kind == "domain":
            schema.add(Triple(rng.choice(preds), RDFS_DOMAIN, rng.choice(classes)))
        elif kind == "range":
            schema.add(Triple(rng.choice(preds), RDFS_RANGE, rng.choice(classes)))
        elif kind == "inverse":
            schema.add(Triple(rng.choice(preds), OWL_INVERSEOF, rng.choice(preds)))
        elif kind == "symmetric":
            schema.add(Triple(rng.choice(preds), RDF_TYPE, OWL_SYMMETRIC))
        elif kind == "transitive":
            schema.add(Triple(rng.choice(preds), RDF_TYPE, OWL_TRANSITIVE))
        else:
            schema.add(Triple(rng.choice(classes), RDFS_SUBCLASSOF, rng.choice(classes)))
    rules = compile_schema(Graph(schema))

    subjects = tuple(nodes)
    predicates = tuple(preds) + (RDF_TYPE,)
    all_objects = tuple(objects) + tuple(classes)
    return graph, rules, (subjects, predicates, all_objects)


def all_candidates(universe):
    subjects, predicates, objects = universe
    return [
        Triple(s, p, o)
        for s in subjects
        for p in predicates
        for o in objects
    ]


def random_diff_instance(rng: random.Random):
    """A random (base graph, rules, insertions, deletions) update scenario."""
    graph, rules, universe = random_instance(rng, max_triples=10)
    base = list(graph)
    deletions = {t for t in base if rng.random() < 0.25}
    subjects, predicates, objects = universe
    insertions = set()
    for _ in range(rng.randint(0, 4)):
        t = Triple(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
        if t not in graph.triples:
            insertions.add(t)
    return graph, rules, Graph(insertions), Graph(deletions)
