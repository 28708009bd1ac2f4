"""Provenance-qualified statistics over RDF graphs.

The package computes cardinality, closure cardinality, minimal-graph
cardinality, redundancy, and out-link densities for RDF graphs under
forward-chaining rules, and reads/writes machine-readable descriptions
that let anyone recompute and verify the published numbers.
"""

from .errors import (
    EmptyGraphError,
    GraphNormError,
    ParseError,
    ResolverError,
    UnsafeRuleError,
    UnsupportedFeatureError,
)
from .terms import IRI, BlankNode, Literal, Triple, Variable
from .graph import EMPTY_GRAPH, Diff, Graph, apply_diff, skolemize
from .turtle import parse_turtle, serialize_turtle
from .rules import (
    EMPTY_RULESET,
    Rule,
    RuleSet,
    SafetyReport,
    TriplePattern,
    check_safe,
    compile_schema,
    format_rules,
    parse_rules,
)
from .engine import (
    ClosureResult,
    IncrementalResult,
    backchain,
    closure,
    incremental_reduce,
    reduce,
)
from .stats import (
    NamespaceDecl,
    StatsReport,
    canonical_ratio,
    compute_stats,
    counted_closure,
    decimal_string,
    out_link_density,
    out_links,
    redundancy,
)
from .provenance import (
    DEFAULT_GN_BASE,
    Description,
    FileResolver,
    NormalisationSpec,
    RuleSource,
    StatDescription,
    compare_description,
    emit_description,
    load_dlogic,
    read_description,
    recompute,
)

__version__ = "0.1.0"

__all__ = [
    "BlankNode",
    "ClosureResult",
    "DEFAULT_GN_BASE",
    "Description",
    "Diff",
    "EMPTY_GRAPH",
    "EMPTY_RULESET",
    "EmptyGraphError",
    "FileResolver",
    "Graph",
    "GraphNormError",
    "IRI",
    "IncrementalResult",
    "Literal",
    "NamespaceDecl",
    "NormalisationSpec",
    "ParseError",
    "ResolverError",
    "Rule",
    "RuleSet",
    "RuleSource",
    "SafetyReport",
    "StatDescription",
    "StatsReport",
    "Triple",
    "TriplePattern",
    "UnsafeRuleError",
    "UnsupportedFeatureError",
    "Variable",
    "apply_diff",
    "backchain",
    "canonical_ratio",
    "check_safe",
    "closure",
    "compare_description",
    "compile_schema",
    "compute_stats",
    "counted_closure",
    "decimal_string",
    "emit_description",
    "format_rules",
    "incremental_reduce",
    "load_dlogic",
    "out_link_density",
    "out_links",
    "parse_rules",
    "parse_turtle",
    "read_description",
    "recompute",
    "reduce",
    "redundancy",
    "serialize_turtle",
    "skolemize",
    "__version__",
]
