"""Domain types shared by every other module.

Statements, document graphs, queries, bindings, result rows, and context
policies live here. No I/O and no matching logic; everything is immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

# Raw group id assigned to statements whose source record carries no explicit
# statement group. One per document, so GROUP degrades to DOCUMENT there.
DEFAULT_GROUP = "__doc__"

# Reserved variable type: matches literal objects instead of typed entities.
LITERAL_TYPE = "Literal"


def group_id(doc: str, raw: str | None) -> str:
    """Namespace a raw group id by its document; groups never span documents."""
    return f"{doc}::{raw if raw is not None else DEFAULT_GROUP}"


@dataclass(frozen=True)
class Literal:
    """A literal object value; compares by exact string after trimming."""

    value: str


@dataclass(frozen=True)
class EntityTerm:
    ref: str


@dataclass(frozen=True)
class LiteralTerm:
    value: str


@dataclass(frozen=True)
class VariableTerm:
    name: str
    type: str


Term = EntityTerm | LiteralTerm | VariableTerm

# Values a variable can be bound to.
Value = str | Literal


def term_key(term: Term) -> tuple[str, str]:
    """Node identity of a term in the query graph (variables key by name)."""
    if isinstance(term, VariableTerm):
        return ("var", term.name)
    if isinstance(term, EntityTerm):
        return ("ent", term.ref)
    return ("lit", term.value)


def value_key(value: Value) -> tuple[str, str]:
    if isinstance(value, Literal):
        return ("lit", value.value)
    return ("ent", value)


def value_str(value: Value) -> str:
    return value.value if isinstance(value, Literal) else value


@dataclass(frozen=True)
class Statement:
    """One provenance-tagged (subject, predicate, object) edge.

    ``group`` is always the namespaced form produced by :func:`group_id`;
    ``sentence`` is None for statements ingested without a sentence id.
    """

    subject: str
    predicate: str
    object: str | Literal
    doc: str
    sentence: str | None
    group: str

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "_key",
            (
                self.doc,
                self.subject,
                self.predicate,
                value_key(self.object),
                self.sentence or "",
                self.group,
            ),
        )

    def key(self) -> tuple:
        """Canonical identity; also the sort key for canonical ordering."""
        return self._key  # type: ignore[attr-defined]

    def raw_group(self) -> str:
        return self.group[len(self.doc) + 2 :]


@dataclass(frozen=True)
class DocumentGraph:
    id: str
    title: str
    source: str
    authors: tuple[str, ...]
    date: str
    keywords: tuple[str, ...]
    sentences: dict[str, str]
    statements: tuple[Statement, ...]


@dataclass(frozen=True)
class Clause:
    subject: Term
    predicate: str
    object: Term

    def terms(self) -> tuple[Term, Term]:
        return (self.subject, self.object)


@dataclass(frozen=True)
class NarrativeQuery:
    clauses: tuple[Clause, ...]

    def variables(self) -> dict[str, str]:
        """Variable name -> type, in first-occurrence order."""
        out: dict[str, str] = {}
        for clause in self.clauses:
            for term in clause.terms():
                if isinstance(term, VariableTerm) and term.name not in out:
                    out[term.name] = term.type
        return out


def clause_instance(clause: Clause, substitution: dict[str, Value]) -> tuple:
    """Apply a substitution to a clause, yielding a concrete (s, p, o) triple.

    Raises KeyError if a variable in the clause is unbound.
    """

    def resolve(term: Term) -> tuple[str, str]:
        if isinstance(term, VariableTerm):
            return value_key(substitution[term.name])
        if isinstance(term, EntityTerm):
            return ("ent", term.ref)
        return ("lit", term.value)

    return (resolve(clause.subject), clause.predicate, resolve(clause.object))


@dataclass(frozen=True, eq=True)
class Binding:
    """A match of one query clause against one stored statement."""

    clause_index: int
    statement: Statement
    substitution: dict[str, Value]

    @classmethod
    def create(
        cls,
        clause_index: int,
        clause: Clause,
        statement: Statement,
        substitution: dict[str, Value],
    ) -> "Binding":
        """Construct a binding, asserting the substitution reproduces the edge."""
        got = clause_instance(clause, substitution)
        want = (
            ("ent", statement.subject),
            statement.predicate,
            value_key(statement.object),
        )
        if got != want:
            raise ValueError(
                f"substitution does not reproduce statement: {got!r} != {want!r}"
            )
        return cls(clause_index, statement, dict(substitution))


@dataclass(frozen=True, eq=True)
class ResultRow:
    """A full per-query substitution plus one supporting binding per clause."""

    substitution: dict[str, Value]
    support: tuple[Binding, ...]

    def docs(self) -> frozenset[str]:
        return frozenset(b.statement.doc for b in self.support)


VALID_POLICIES = ("GLOBAL", "DOCUMENT", "GROUP", "SIMILARITY")


@dataclass(frozen=True)
class ContextPolicy:
    """Which bindings may be fused into one result row.

    GLOBAL fuses anything; DOCUMENT requires one shared document; GROUP one
    shared statement group; SIMILARITY admits cross-document fusion when every
    document pair has keyword Jaccard >= threshold or shares an author.
    """

    kind: str
    similarity_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in VALID_POLICIES:
            raise ValueError(f"unknown policy {self.kind!r}")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError("similarity threshold must lie in [0, 1]")


GLOBAL = ContextPolicy("GLOBAL")
DOCUMENT = ContextPolicy("DOCUMENT")
GROUP = ContextPolicy("GROUP")


def similarity(threshold: float = 0.5) -> ContextPolicy:
    return ContextPolicy("SIMILARITY", threshold)


def policy_from_name(name: str, threshold: float = 0.5) -> ContextPolicy:
    if name == "SIMILARITY":
        return similarity(threshold)
    return ContextPolicy(name)


class QueryValidationError(ValueError):
    code = "QueryValidationError"


class EmptyQuery(QueryValidationError):
    code = "EmptyQuery"

    def __init__(self) -> None:
        super().__init__("query has no clauses")


class DisconnectedQuery(QueryValidationError):
    code = "DisconnectedQuery"

    def __init__(self) -> None:
        super().__init__("query clauses do not form a connected graph")


class ConflictingVariableType(QueryValidationError):
    code = "ConflictingVariableType"

    def __init__(self, name: str, types: tuple[str, str]) -> None:
        self.name = name
        self.types = types
        super().__init__(
            f"variable {name!r} used with conflicting types {types[0]!r} and {types[1]!r}"
        )


def validate_query(query: NarrativeQuery) -> None:
    """Check the query invariants: non-empty, type-consistent, connected."""
    if not query.clauses:
        raise EmptyQuery()

    seen: dict[str, str] = {}
    for clause in query.clauses:
        for term in clause.terms():
            if isinstance(term, VariableTerm):
                prior = seen.setdefault(term.name, term.type)
                if prior != term.type:
                    raise ConflictingVariableType(term.name, (prior, term.type))

    # Connectivity over clause indices: two clauses are adjacent when they
    # share a term node (variables keyed by name only).
    nodes: dict[tuple[str, str], list[int]] = {}
    for i, clause in enumerate(query.clauses):
        for term in clause.terms():
            nodes.setdefault(term_key(term), []).append(i)

    reachable = {0}
    frontier = [0]
    while frontier:
        current = frontier.pop()
        for term in query.clauses[current].terms():
            for j in nodes[term_key(term)]:
                if j not in reachable:
                    reachable.add(j)
                    frontier.append(j)
    if len(reachable) != len(query.clauses):
        raise DisconnectedQuery()
