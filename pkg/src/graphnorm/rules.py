"""Horn rules over triple patterns.

Rules are written in an N3-style syntax::

    @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
    { ?s ?p ?o . ?p rdfs:domain ?c } => { ?s a ?c } .
    { ?x :links_to ?y } <=> { ?y :linked_from ?x } .

``=>`` yields one rule; ``<=>`` yields the forward and the reversed rule.
Only safe rules are accepted: every head variable must occur in the body,
and heads are blank-free, so forward application of a rule to ground facts
always produces ground triples.

compile_schema turns a recognized RDFS/OWL fragment (domain, range,
subClassOf, subPropertyOf, inverseOf, symmetric and transitive property
declarations) into the equivalent rules. Anything else in the schema
namespaces is skipped with a warning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import ParseError, UnsafeRuleError
from .graph import Graph
from .lex import (
    AT,
    BLANK,
    DECIMAL,
    DOT,
    EOF,
    IFF,
    IMPLIES,
    INTEGER,
    IRIREF,
    KW_A,
    LBRACE,
    PNAME,
    RBRACE,
    STRING,
    VAR,
    tokenize,
)
from .terms import (
    IRI,
    OWL_NS,
    RDF_NS,
    RDF_TYPE,
    RDFS_NS,
    BlankNode,
    Literal,
    Term,
    Variable,
)
from .turtle import _TokenCursor, _TurtleParser

logger = logging.getLogger(__name__)

RDFS_DOMAIN = IRI(RDFS_NS + "domain")
RDFS_RANGE = IRI(RDFS_NS + "range")
RDFS_SUBCLASSOF = IRI(RDFS_NS + "subClassOf")
RDFS_SUBPROPERTYOF = IRI(RDFS_NS + "subPropertyOf")
OWL_INVERSEOF = IRI(OWL_NS + "inverseOf")
OWL_SYMMETRIC = IRI(OWL_NS + "SymmetricProperty")
OWL_TRANSITIVE = IRI(OWL_NS + "TransitiveProperty")
OWL_IMPORTS = IRI(OWL_NS + "imports")

# Declarations and annotations that carry no rule content; skipping them
# silently keeps the warning channel for genuinely unhandled constructs.
_SILENT_PREDICATES = {
    IRI(RDFS_NS + "label"),
    IRI(RDFS_NS + "comment"),
    IRI(RDFS_NS + "seeAlso"),
    IRI(RDFS_NS + "isDefinedBy"),
    OWL_IMPORTS,
}
_SILENT_TYPES = {
    IRI(RDFS_NS + "Class"),
    IRI(RDF_NS + "Property"),
    IRI(OWL_NS + "Class"),
    IRI(OWL_NS + "Ontology"),
    IRI(OWL_NS + "ObjectProperty"),
    IRI(OWL_NS + "DatatypeProperty"),
    IRI(OWL_NS + "AnnotationProperty"),
}


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("a literal cannot be a pattern subject")
        if not isinstance(self.predicate, (IRI, Variable)):
            raise ValueError("a pattern predicate must be an IRI or a variable")

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)

    def variables(self) -> set[str]:
        return {t.name for t in self.terms() if isinstance(t, Variable)}

    def text(self) -> str:
        return " ".join(
            t.text() if isinstance(t, Variable) else t.ntriples() for t in self.terms()
        )


@dataclass(frozen=True)
class Rule:
    body: tuple[TriplePattern, ...]
    head: tuple[TriplePattern, ...]
    label: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.body or not self.head:
            raise ValueError("rules need a non-empty body and head")

    def body_variables(self) -> set[str]:
        return set().union(*(p.variables() for p in self.body))

    def head_variables(self) -> set[str]:
        return set().union(*(p.variables() for p in self.head))

    def text(self) -> str:
        body = " . ".join(p.text() for p in self.body)
        head = " . ".join(p.text() for p in self.head)
        return f"{{ {body} }} => {{ {head} }} ."


@dataclass(frozen=True)
class SafetyReport:
    unbound_head_variables: tuple[str, ...]
    blank_head_labels: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.unbound_head_variables and not self.blank_head_labels


def check_safe(rule: Rule) -> SafetyReport:
    """Report head variables the body never binds, and blanks in the head."""
    unbound = sorted(rule.head_variables() - rule.body_variables())
    blanks = sorted(
        {
            t.label
            for p in rule.head
            for t in p.terms()
            if isinstance(t, BlankNode)
        }
    )
    return SafetyReport(tuple(unbound), tuple(blanks))


class RuleSet:
    """An ordered, duplicate-free collection of rules."""

    __slots__ = ("_rules", "__weakref__")

    def __init__(self, rules: Iterable[Rule] = ()):
        self._rules: tuple[Rule, ...] = tuple(dict.fromkeys(rules))

    @property
    def rules(self) -> tuple[Rule, ...]:
        return self._rules

    def __iter__(self) -> Iterator[Rule]:
        return iter(self._rules)

    def __len__(self) -> int:
        return len(self._rules)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RuleSet):
            return NotImplemented
        return frozenset(self._rules) == frozenset(other._rules)

    def __hash__(self) -> int:
        return hash(frozenset(self._rules))

    def __or__(self, other: "RuleSet") -> "RuleSet":
        return RuleSet(self._rules + other._rules)

    def __repr__(self) -> str:
        return f"RuleSet({len(self._rules)} rules)"


EMPTY_RULESET = RuleSet()


class _RuleParser(_TurtleParser):
    """Reuses the Turtle term machinery for the pattern terms."""

    def __init__(self, text: str, source: str | None):
        self.cur = _TokenCursor(tokenize(text, source), source)
        self.prefixes: dict[str, str] = {}

    def parse_rules(self) -> RuleSet:
        rules: list[Rule] = []
        while True:
            tok = self.cur.peek()
            if tok.kind == EOF:
                break
            if tok.kind == AT:
                self._directive()
                continue
            if tok.kind != LBRACE:
                raise self.cur.error(f"expected '{{' to open a rule body, got {tok.value!r}", tok)
            body = self._pattern_block("body")
            arrow = self.cur.next()
            if arrow.kind not in (IMPLIES, IFF):
                raise self.cur.error(f"expected '=>' or '<=>', got {arrow.value!r}", arrow)
            head = self._pattern_block("head")
            self.cur.expect(DOT, "'.'")
            self._emit(rules, body, head, arrow.line, arrow.col)
            if arrow.kind == IFF:
                self._emit(rules, head, body, arrow.line, arrow.col)
        return RuleSet(rules)

    def _emit(self, rules, body, head, line, col) -> None:
        rule = Rule(tuple(body), tuple(head), label=f"r{len(rules) + 1}")
        report = check_safe(rule)
        if not report.ok:
            problems = []
            if report.unbound_head_variables:
                names = ", ".join(f"?{v}" for v in report.unbound_head_variables)
                problems.append(f"head variables not bound in body: {names}")
            if report.blank_head_labels:
                names = ", ".join(f"_:{b}" for b in report.blank_head_labels)
                problems.append(f"blank nodes in head: {names}")
            raise UnsafeRuleError(f"unsafe rule {rule.label} at {line}:{col}: " + "; ".join(problems))
        rules.append(rule)

    def _pattern_block(self, side: str) -> list[TriplePattern]:
        self.cur.expect(LBRACE, "'{'")
        patterns: list[TriplePattern] = []
        while True:
            tok = self.cur.peek()
            if tok.kind == RBRACE:
                self.cur.next()
                break
            patterns.append(self._pattern(side))
            tok = self.cur.peek()
            if tok.kind == DOT:
                self.cur.next()
        if not patterns:
            tok = self.cur.peek()
            raise self.cur.error(f"a rule {side} needs at least one pattern", tok)
        return patterns

    def _pattern(self, side: str) -> TriplePattern:
        s = self._pattern_term("subject", side)
        p = self._pattern_term("predicate", side)
        o = self._pattern_term("object", side)
        return TriplePattern(s, p, o)

    def _pattern_term(self, position: str, side: str) -> Term:
        tok = self.cur.next()
        if tok.kind == VAR:
            return Variable(tok.value)
        if tok.kind in (IRIREF, PNAME):
            return self._iri_token(tok)
        if tok.kind == KW_A:
            if position != "predicate":
                raise self.cur.error("'a' is only valid in predicate position", tok)
            return RDF_TYPE
        if tok.kind == BLANK:
            if side == "head":
                raise UnsafeRuleError(
                    f"blank node _:{tok.value} in rule head at {tok.line}:{tok.col}"
                )
            raise self.cur.error("blank nodes are not allowed in rule patterns", tok)
        if tok.kind in (STRING, INTEGER, DECIMAL):
            if position != "object":
                raise self.cur.error(f"a literal cannot be a pattern {position}", tok)
            return self._literal(tok)
        raise self.cur.error(f"expected a pattern {position}, got {tok.value!r}", tok)


def parse_rules(text: str, source: str | None = None) -> RuleSet:
    """Parse rule text; raises ParseError or UnsafeRuleError."""
    return _RuleParser(text, source).parse_rules()


def format_rules(ruleset: RuleSet) -> str:
    """Render rules one per line; parse_rules reads the output back."""
    return "".join(rule.text() + "\n" for rule in ruleset)


def _local(iri: IRI) -> str:
    value = iri.value
    for sep in ("#", "/"):
        if sep in value:
            value = value.rsplit(sep, 1)[1] or value
    return value or iri.value


_S, _O, _X, _Y, _Z = (Variable(n) for n in "soxyz")


def compile_schema(schema: Graph) -> RuleSet:
    """Compile recognized RDFS/OWL schema triples into rules.

    Unrecognized constructs in the rdf/rdfs/owl namespaces are skipped with
    a warning; triples outside those namespaces are ignored silently.
    """
    rules: list[Rule] = []
    for t in schema:
        p, o = t.predicate, t.object
        recognized = False
        if isinstance(t.subject, IRI):
            s = t.subject
            if p == RDFS_DOMAIN and isinstance(o, IRI):
                rules.append(Rule(
                    (TriplePattern(_S, s, _O),),
                    (TriplePattern(_S, RDF_TYPE, o),),
                    label=f"domain({_local(s)})",
                ))
                recognized = True
            elif p == RDFS_RANGE and isinstance(o, IRI):
                rules.append(Rule(
                    (TriplePattern(_S, s, _O),),
                    (TriplePattern(_O, RDF_TYPE, o),),
                    label=f"range({_local(s)})",
                ))
                recognized = True
            elif p == RDFS_SUBCLASSOF and isinstance(o, IRI):
                rules.append(Rule(
                    (TriplePattern(_X, RDF_TYPE, s),),
                    (TriplePattern(_X, RDF_TYPE, o),),
                    label=f"subClassOf({_local(s)})",
                ))
                recognized = True
            elif p == RDFS_SUBPROPERTYOF and isinstance(o, IRI):
                rules.append(Rule(
                    (TriplePattern(_S, s, _O),),
                    (TriplePattern(_S, o, _O),),
                    label=f"subPropertyOf({_local(s)})",
                ))
                recognized = True
            elif p == OWL_INVERSEOF and isinstance(o, IRI):
                rules.append(Rule(
                    (TriplePattern(_S, s, _O),),
                    (TriplePattern(_O, o, _S),),
                    label=f"inverseOf({_local(s)})",
                ))
                rules.append(Rule(
                    (TriplePattern(_S, o, _O),),
                    (TriplePattern(_O, s, _S),),
                    label=f"inverseOf({_local(o)})",
                ))
                recognized = True
            elif p == RDF_TYPE and o == OWL_SYMMETRIC:
                rules.append(Rule(
                    (TriplePattern(_S, s, _O),),
                    (TriplePattern(_O, s, _S),),
                    label=f"symmetric({_local(s)})",
                ))
                recognized = True
            elif p == RDF_TYPE and o == OWL_TRANSITIVE:
                rules.append(Rule(
                    (TriplePattern(_X, s, _Y), TriplePattern(_Y, s, _Z)),
                    (TriplePattern(_X, s, _Z),),
                    label=f"transitive({_local(s)})",
                ))
                recognized = True
        if recognized:
            continue
        if p in _SILENT_PREDICATES:
            continue
        if p == RDF_TYPE and o in _SILENT_TYPES:
            continue
        schema_ns = (RDFS_NS, OWL_NS)
        if p.value.startswith(schema_ns) or (
            p == RDF_TYPE and isinstance(o, IRI) and o.value.startswith(schema_ns)
        ):
            logger.warning("ignoring unrecognized schema triple: %s", t.ntriples())
    return RuleSet(rules)
