import random

from hypothesis import given, settings, strategies as st

from graphnorm import (
    Diff,
    EMPTY_GRAPH,
    Graph,
    IRI,
    Triple,
    backchain,
    closure,
    compile_schema,
    incremental_reduce,
    parse_rules,
    parse_turtle,
    reduce,
)
from graphnorm.rules import EMPTY_RULESET, OWL_SYMMETRIC, OWL_TRANSITIVE, RDFS_SUBCLASSOF
from graphnorm.terms import RDF_TYPE

from support import all_candidates, naive_closure, random_instance

EX = "http://example.org/"


def t(s: str, p: str, o: str) -> Triple:
    return Triple(IRI(EX + s), IRI(EX + p), IRI(EX + o))


def sym(p: str):
    return compile_schema(Graph([Triple(IRI(EX + p), RDF_TYPE, OWL_SYMMETRIC)]))


def trans(p: str):
    return compile_schema(Graph([Triple(IRI(EX + p), RDF_TYPE, OWL_TRANSITIVE)]))


class TestClosure:
    def test_empty_ruleset_is_identity(self):
        g = Graph([t("a", "p", "b")])
        result = closure(g, EMPTY_RULESET)
        assert result.graph == g
        assert result.derived_count == 0
        assert result.rounds == 0

    def test_transitive_chain(self):
        g = Graph([t("a", "p", "b"), t("b", "p", "c"), t("c", "p", "d")])
        result = closure(g, trans("p"))
        assert result.graph.triples == g.triples | {
            t("a", "p", "c"), t("a", "p", "d"), t("b", "p", "d"),
        }
        assert result.derived_count == 3
        assert result.rounds == 2  # a-c and b-d first, then a-d

    def test_symmetric_plus_transitive_saturates(self):
        g = Graph([t("a", "p", "b")])
        rules = sym("p") | trans("p")
        result = closure(g, rules)
        assert result.graph.triples == {
            t("a", "p", "b"), t("b", "p", "a"), t("a", "p", "a"), t("b", "p", "b"),
        }

    def test_multi_pattern_body_joins_across_rounds(self):
        rules = parse_rules(
            f"{{ ?s ?p ?o . ?p <{EX}d> ?c . }} => {{ ?s a ?c . }} .\n"
            f"{{ ?x a <{EX}C> . }} => {{ ?x <{EX}q> ?x . }} .\n"
        )
        g = Graph([t("a", "p", "b"), t("p", "d", "C"), t("q", "d", "D")])
        result = closure(g, rules)
        # a:C from the first rule; then (a q a) from the second; then a:D from
        # the first again, because q itself has a declared domain-ish triple.
        assert t("a", "q", "a") in result.graph
        assert Triple(IRI(EX + "a"), RDF_TYPE, IRI(EX + "C")) in result.graph
        assert Triple(IRI(EX + "a"), RDF_TYPE, IRI(EX + "D")) in result.graph
        assert result.rounds == 3

    def test_literal_head_instantiations_are_skipped(self):
        # Inverting a triple with a literal object would put the literal in
        # subject position; that instantiation must be dropped, not crash.
        rules = parse_rules(f"{{ ?x <{EX}p> ?y . }} => {{ ?y <{EX}p> ?x . }} .")
        g = parse_turtle(f'<{EX}a> <{EX}p> "twelve" .')
        result = closure(g, rules)
        assert result.graph == g

    def test_derived_count_excludes_existing_triples(self):
        g = Graph([t("a", "p", "b"), t("b", "p", "a")])
        result = closure(g, sym("p"))
        assert result.derived_count == 0


@settings(deadline=None, max_examples=60)
@given(st.integers(min_value=0, max_value=10_000))
def test_closure_matches_naive_oracle(seed):
    rng = random.Random(seed)
    graph, rules, _ = random_instance(rng, literals=True)
    assert closure(graph, rules).graph.triples == naive_closure(graph, rules)


class TestBackchain:
    def test_stored_triple(self):
        g = Graph([t("a", "p", "b")])
        assert backchain(g, EMPTY_RULESET, t("a", "p", "b"))

    def test_absent_triple(self):
        g = Graph([t("a", "p", "b")])
        assert not backchain(g, EMPTY_RULESET, t("b", "p", "a"))

    def test_one_step_derivation(self):
        g = Graph([t("a", "p", "b")])
        assert backchain(g, sym("p"), t("b", "p", "a"))

    def test_cycle_terminates(self):
        g = Graph([t("a", "p", "b")])
        rules = sym("p")
        assert not backchain(g, rules, t("a", "p", "c"))

    def test_needs_intermediate_goal_outside_store(self):
        # b p b holds only via the derived (not stored) b p a:
        # a p b  =sym=>  b p a, then b p a + a p b  =trans=>  b p b.
        g = Graph([t("a", "p", "b")])
        rules = sym("p") | trans("p")
        assert backchain(g, rules, t("b", "p", "b"))
        assert backchain(g, rules, t("a", "p", "a"))
        assert not backchain(g, rules, t("a", "q", "a"))

    def test_subclass_chain(self):
        schema = Graph([
            Triple(IRI(EX + "A"), RDFS_SUBCLASSOF, IRI(EX + "B")),
            Triple(IRI(EX + "B"), RDFS_SUBCLASSOF, IRI(EX + "C")),
        ])
        rules = compile_schema(schema)
        g = Graph([Triple(IRI(EX + "x"), RDF_TYPE, IRI(EX + "A"))])
        assert backchain(g, rules, Triple(IRI(EX + "x"), RDF_TYPE, IRI(EX + "C")))
        assert not backchain(g, rules, Triple(IRI(EX + "y"), RDF_TYPE, IRI(EX + "C")))

    def test_repeated_queries_are_consistent(self):
        g = Graph([t("a", "p", "b")])
        rules = sym("p")
        goal = t("b", "p", "a")
        assert all(backchain(g, rules, goal) for _ in range(5))
        missing = t("c", "p", "a")
        assert not any(backchain(g, rules, missing) for _ in range(5))


@settings(deadline=None, max_examples=40)
@given(st.integers(min_value=0, max_value=10_000))
def test_backchain_agrees_with_oracle_everywhere(seed):
    rng = random.Random(seed)
    graph, rules, universe = random_instance(rng, max_triples=8, max_nodes=4)
    closed = naive_closure(graph, rules)
    for goal in all_candidates(universe):
        assert backchain(graph, rules, goal) == (goal in closed), goal.ntriples()


class TestReduce:
    def test_empty_ruleset_is_identity(self):
        g = Graph([t("a", "p", "b"), t("c", "p", "d")])
        assert reduce(g, EMPTY_RULESET) == g

    def test_symmetric_pair_keeps_one(self):
        g = Graph([t("a", "p", "b"), t("b", "p", "a")])
        result = reduce(g, sym("p"))
        # Canonical order tests (a p b) first; it goes, the mirror stays.
        assert result == Graph([t("b", "p", "a")])

    def test_result_is_deterministic(self):
        g = Graph([t("a", "p", "b"), t("b", "p", "a")])
        rules = sym("p")
        assert len({reduce(g, rules) for _ in range(10)}) == 1

    def test_transitive_shortcut_removed(self):
        g = Graph([t("a", "p", "b"), t("b", "p", "c"), t("a", "p", "c")])
        assert reduce(g, trans("p")) == Graph([t("a", "p", "b"), t("b", "p", "c")])

    def test_closure_is_preserved(self):
        g = Graph([
            t("a", "p", "b"), t("b", "p", "c"), t("a", "p", "c"), t("c", "p", "a"),
        ])
        rules = trans("p") | sym("p")
        minimal = reduce(g, rules)
        assert minimal.triples <= g.triples
        assert closure(minimal, rules).graph == closure(g, rules).graph

    def test_aux_supports_but_never_appears(self):
        data = parse_turtle(
            f"@prefix ex: <{EX}> .\n"
            "ex:bob a ex:Person .\n"
            "ex:bob ex:knows ex:alice .\n"
        )
        aux = parse_turtle(
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            f"@prefix ex: <{EX}> .\n"
            "ex:knows rdfs:domain ex:Person .\n"
        )
        rules = parse_rules(
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            "{ ?s ?p ?o . ?p rdfs:domain ?c . } => { ?s a ?c . } .\n"
        )
        minimal = reduce(data, rules, aux)
        assert minimal == Graph([t("bob", "knows", "alice")])
        assert not (minimal.triples & aux.triples)

    def test_aux_members_inside_data_are_dropped(self):
        shared = t("p", "d", "C")
        g = Graph([t("a", "p", "b"), shared])
        aux = Graph([shared])
        assert reduce(g, EMPTY_RULESET, aux) == Graph([t("a", "p", "b")])

    def test_reduce_can_empty_a_graph_fully_covered_by_aux(self):
        shared = t("a", "p", "b")
        assert reduce(Graph([shared]), EMPTY_RULESET, Graph([shared])) == EMPTY_GRAPH


@settings(deadline=None, max_examples=40)
@given(st.integers(min_value=0, max_value=10_000))
def test_reduce_preserves_closure_and_shrinks(seed):
    rng = random.Random(seed)
    graph, rules, _ = random_instance(rng)
    minimal = reduce(graph, rules)
    assert minimal.triples <= graph.triples
    assert naive_closure(minimal, rules) == naive_closure(graph, rules)
    # No kept triple is derivable from the others: the result is irreducible.
    for triple in minimal:
        rest = minimal.discard(triple)
        assert triple not in naive_closure(rest, rules)


class TestIncrementalReduce:
    def test_pure_insertion_redundant(self):
        rules = sym("p")
        full0 = Graph([t("b", "p", "a")])
        prev = reduce(full0, rules)
        diff = Diff(insertions=Graph([t("a", "p", "b")]))
        full = Graph([t("b", "p", "a"), t("a", "p", "b")])
        result = incremental_reduce(prev, diff, rules, full=full)
        assert not result.used_fallback
        assert result.graph == Graph([t("b", "p", "a")])

    def test_surviving_insertion_triggers_retest_of_old_survivors(self):
        # One subclass rule: C1 under C2. The old minimal graph states the
        # superclass; inserting the subclass makes the old statement redundant.
        rules = compile_schema(Graph([Triple(IRI(EX + "C1"), RDFS_SUBCLASSOF, IRI(EX + "C2"))]))
        old = Triple(IRI(EX + "n"), RDF_TYPE, IRI(EX + "C2"))
        new = Triple(IRI(EX + "n"), RDF_TYPE, IRI(EX + "C1"))
        prev = Graph([old])
        diff = Diff(insertions=Graph([new]))
        full = Graph([old, new])
        result = incremental_reduce(prev, diff, rules, full=full)
        assert not result.used_fallback
        assert result.graph == Graph([new])
        assert len(result.graph) == len(reduce(full, rules))

    def test_deletion_of_support_falls_back(self):
        # The previous minimization kept only (b p a); deleting it leaves the
        # shortcut path unable to re-derive (a p b), which is still in the
        # full graph, so the closure check forces a full reduce.
        rules = sym("p")
        g0 = Graph([t("a", "p", "b"), t("b", "p", "a")])
        prev = reduce(g0, rules)
        assert prev == Graph([t("b", "p", "a")])
        diff = Diff(deletions=Graph([t("b", "p", "a")]))
        full = Graph([t("a", "p", "b")])
        result = incremental_reduce(prev, diff, rules, full=full)
        assert result.used_fallback
        assert result.graph == Graph([t("a", "p", "b")])

    def test_empty_diff_keeps_previous_result(self):
        g = Graph([t("a", "p", "b"), t("b", "p", "a")])
        rules = sym("p")
        prev = reduce(g, rules)
        result = incremental_reduce(prev, Diff(), rules, full=g)
        assert not result.used_fallback
        assert result.graph == prev

    def test_aux_threads_through(self):
        data = parse_turtle(
            f"@prefix ex: <{EX}> .\n"
            "ex:bob ex:knows ex:alice .\n"
        )
        aux = parse_turtle(
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
            f"@prefix ex: <{EX}> .\n"
            "ex:knows rdfs:domain ex:Person .\n"
        )
        rules = compile_schema(aux)
        prev = reduce(data, rules, aux)
        inserted = Triple(IRI(EX + "bob"), RDF_TYPE, IRI(EX + "Person"))
        diff = Diff(insertions=Graph([inserted]))
        full = data.add(inserted)
        result = incremental_reduce(prev, diff, rules, aux, full=full)
        assert not result.used_fallback
        assert result.graph == data  # the type statement is derivable again
