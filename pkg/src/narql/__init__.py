"""narql: context-aware graph-pattern queries over provenance-tagged statements."""

__version__ = "0.1.0"

from .aggregation import AggregatedResult, aggregate, format_entry
from .context import ContextKeyset, compatible, keyword_jaccard
from .engine import (
    QueryHasVariables,
    QueryPlan,
    ResultLimitExceeded,
    ask,
    edge_bindings,
    execute,
    plan,
)
from .ingestion import (
    DuplicateDocumentId,
    IndexFormatError,
    IngestResult,
    MalformedRecord,
    StatementStore,
    Vocabulary,
    export_lines,
    ingest,
    load_index,
    load_vocabulary,
    resolve_surface,
    save_index,
)
from .model import (
    DOCUMENT,
    GLOBAL,
    GROUP,
    Binding,
    Clause,
    ConflictingVariableType,
    ContextPolicy,
    DisconnectedQuery,
    DocumentGraph,
    EmptyQuery,
    EntityTerm,
    Literal,
    LiteralTerm,
    NarrativeQuery,
    ResultRow,
    Statement,
    VariableTerm,
    policy_from_name,
    similarity,
    validate_query,
)
from .parser import (
    AmbiguousEntity,
    QueryParseError,
    QuerySyntaxError,
    UnknownEntity,
    UnknownPredicate,
    parse,
    render,
)
from .provenance import Explanation, StaleRow, explain

__all__ = [
    "AggregatedResult",
    "AmbiguousEntity",
    "Binding",
    "Clause",
    "ConflictingVariableType",
    "ContextKeyset",
    "ContextPolicy",
    "DisconnectedQuery",
    "DocumentGraph",
    "DuplicateDocumentId",
    "DOCUMENT",
    "EmptyQuery",
    "EntityTerm",
    "Explanation",
    "GLOBAL",
    "GROUP",
    "IndexFormatError",
    "IngestResult",
    "Literal",
    "LiteralTerm",
    "MalformedRecord",
    "NarrativeQuery",
    "QueryHasVariables",
    "QueryParseError",
    "QueryPlan",
    "QuerySyntaxError",
    "ResultLimitExceeded",
    "ResultRow",
    "StaleRow",
    "Statement",
    "StatementStore",
    "UnknownEntity",
    "UnknownPredicate",
    "VariableTerm",
    "Vocabulary",
    "aggregate",
    "ask",
    "compatible",
    "edge_bindings",
    "execute",
    "explain",
    "export_lines",
    "format_entry",
    "ingest",
    "keyword_jaccard",
    "load_index",
    "load_vocabulary",
    "parse",
    "plan",
    "policy_from_name",
    "render",
    "resolve_surface",
    "save_index",
    "similarity",
    "validate_query",
]
