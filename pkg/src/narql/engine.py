"""Edge binding, join planning, and context-checked query execution.

The join is left-deep backtracking over a selectivity-ordered clause
permutation, probing the store's (subject, predicate) / (predicate, object) /
predicate indexes with already-bound variables and pruning partial rows whose
contexts are already incompatible. Output is deduplicated by (substitution,
set of supporting statements) and canonically ordered, so results are
identical for every valid clause order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .context import ContextTracker
from .ingestion import StatementStore
from .model import (
    LITERAL_TYPE,
    Binding,
    Clause,
    ContextPolicy,
    EntityTerm,
    Literal,
    LiteralTerm,
    NarrativeQuery,
    ResultRow,
    Statement,
    Value,
    VariableTerm,
    term_key,
    validate_query,
    value_key,
    value_str,
)

DEFAULT_ROW_LIMIT = 100_000


class ResultLimitExceeded(Exception):
    code = "ResultLimitExceeded"

    def __init__(self, limit: int) -> None:
        self.limit = limit
        super().__init__(f"result set exceeds the configured cap of {limit} rows")


class QueryHasVariables(Exception):
    code = "QueryHasVariables"

    def __init__(self) -> None:
        super().__init__("ask() requires a variable-free query")


@dataclass(frozen=True)
class QueryPlan:
    clause_order: tuple[int, ...]
    per_clause_estimate: tuple[int, ...]


_MISSING = object()


def _clause_substitution(
    clause: Clause,
    statement: Statement,
    store: StatementStore,
    bound: dict[str, Value],
) -> dict[str, Value] | None:
    """Per-clause substitution if the statement matches, else None.

    ``bound`` carries variable values fixed by earlier clauses; matches must
    agree with them. Typed variables match only vocabulary-linked entities of
    exactly that type; the reserved type matches literal objects.
    """
    sub: dict[str, Value] = {}

    def bind(name: str, value: Value) -> bool:
        prior = bound.get(name, sub.get(name, _MISSING))
        if prior is not _MISSING and prior != value:
            return False
        sub[name] = value
        return True

    subject = clause.subject
    if isinstance(subject, EntityTerm):
        if statement.subject != subject.ref:
            return None
    elif isinstance(subject, LiteralTerm):
        return None  # subjects are never literals
    else:
        if subject.type == LITERAL_TYPE:
            return None
        if store.entity_type(statement.subject) != subject.type:
            return None
        if not bind(subject.name, statement.subject):
            return None

    if statement.predicate != clause.predicate:
        return None

    obj = clause.object
    if isinstance(obj, EntityTerm):
        if not isinstance(statement.object, str) or statement.object != obj.ref:
            return None
    elif isinstance(obj, LiteralTerm):
        if not isinstance(statement.object, Literal) or statement.object.value != obj.value:
            return None
    else:
        if obj.type == LITERAL_TYPE:
            if not isinstance(statement.object, Literal):
                return None
        else:
            if not isinstance(statement.object, str):
                return None
            if store.entity_type(statement.object) != obj.type:
                return None
        if not bind(obj.name, statement.object):
            return None

    return sub


def _candidates(
    clause: Clause, store: StatementStore, bound: dict[str, Value]
) -> Sequence[Statement]:
    """Probe the narrowest applicable index for the clause's current shape."""
    subject_id: str | None = None
    if isinstance(clause.subject, EntityTerm):
        subject_id = clause.subject.ref
    elif isinstance(clause.subject, VariableTerm):
        value = bound.get(clause.subject.name)
        if isinstance(value, Literal):
            return ()
        subject_id = value

    object_k = None
    if isinstance(clause.object, EntityTerm):
        object_k = ("ent", clause.object.ref)
    elif isinstance(clause.object, LiteralTerm):
        object_k = ("lit", clause.object.value)
    elif isinstance(clause.object, VariableTerm):
        value = bound.get(clause.object.name)
        if value is not None:
            object_k = value_key(value)

    if subject_id is not None:
        return store.by_subject_predicate.get((subject_id, clause.predicate), ())
    if object_k is not None:
        return store.by_predicate_object.get((clause.predicate, object_k), ())
    return store.by_predicate.get(clause.predicate, ())


def edge_bindings(clause: Clause, store: StatementStore, clause_index: int = 0) -> list[Binding]:
    """Every statement matching one clause in isolation."""
    out = []
    for statement in _candidates(clause, store, {}):
        sub = _clause_substitution(clause, statement, store, {})
        if sub is not None:
            out.append(Binding.create(clause_index, clause, statement, sub))
    return out


def candidate_estimate(clause: Clause, store: StatementStore) -> int:
    """Index-size upper bound on a clause's edge-binding count."""
    sizes = []
    if isinstance(clause.subject, EntityTerm):
        sizes.append(len(store.by_subject_predicate.get((clause.subject.ref, clause.predicate), ())))
    if isinstance(clause.object, EntityTerm):
        sizes.append(len(store.by_predicate_object.get((clause.predicate, ("ent", clause.object.ref)), ())))
    elif isinstance(clause.object, LiteralTerm):
        sizes.append(len(store.by_predicate_object.get((clause.predicate, ("lit", clause.object.value)), ())))
    if sizes:
        return min(sizes)
    return len(store.by_predicate.get(clause.predicate, ()))


def plan(query: NarrativeQuery, store: StatementStore) -> QueryPlan:
    """Connected left-deep clause order, most selective first.

    Greedy by candidate estimate: after the first clause, only clauses
    sharing a term with the already-ordered ones are eligible (a connected
    order always exists because the query graph is connected).
    """
    validate_query(query)
    estimates = tuple(candidate_estimate(c, store) for c in query.clauses)
    remaining = set(range(len(query.clauses)))
    first = min(remaining, key=lambda i: (estimates[i], i))
    order = [first]
    remaining.remove(first)
    covered = {term_key(t) for t in query.clauses[first].terms()}
    while remaining:
        eligible = [
            i
            for i in remaining
            if any(term_key(t) in covered for t in query.clauses[i].terms())
        ]
        chosen = min(eligible, key=lambda i: (estimates[i], i))
        order.append(chosen)
        remaining.remove(chosen)
        covered.update(term_key(t) for t in query.clauses[chosen].terms())
    return QueryPlan(tuple(order), estimates)


def _check_order(query: NarrativeQuery, order: Sequence[int]) -> None:
    if sorted(order) != list(range(len(query.clauses))):
        raise ValueError("clause_order must be a permutation of the clause indices")
    covered = {term_key(t) for t in query.clauses[order[0]].terms()}
    for i in order[1:]:
        keys = {term_key(t) for t in query.clauses[i].terms()}
        if not keys & covered:
            raise ValueError("clause_order is not connected left-deep")
        covered |= keys


def _search(
    query: NarrativeQuery,
    policy: ContextPolicy,
    store: StatementStore,
    order: Sequence[int],
) -> Iterator[tuple[dict[str, Value], tuple[Binding, ...]]]:
    """Yield every (substitution, per-clause support) assignment, undeduplicated."""
    n = len(query.clauses)
    support: list[Binding | None] = [None] * n
    bound: dict[str, Value] = {}
    tracker = ContextTracker(policy, store)

    def extend(pos: int) -> Iterator[tuple[dict[str, Value], tuple[Binding, ...]]]:
        if pos == n:
            yield dict(bound), tuple(support[i] for i in range(n))  # type: ignore[misc]
            return
        clause_index = order[pos]
        clause = query.clauses[clause_index]
        for statement in _candidates(clause, store, bound):
            # Incremental context pruning: an incompatible partial row can
            # never become compatible again.
            if not tracker.admits(statement):
                continue
            sub = _clause_substitution(clause, statement, store, bound)
            if sub is None:
                continue
            # The substitution was just derived from this statement, so the
            # reproduction invariant Binding.create would assert holds.
            support[clause_index] = Binding(clause_index, statement, sub)
            tracker.push(statement)
            fresh = [name for name in sub if name not in bound]
            bound.update((name, sub[name]) for name in fresh)
            yield from extend(pos + 1)
            for name in fresh:
                del bound[name]
            tracker.pop(statement)
            support[clause_index] = None

    yield from extend(0)


def _substitution_key(substitution: dict[str, Value]) -> tuple:
    return tuple((name, value_key(substitution[name])) for name in sorted(substitution))


def _row_sort_key(row: ResultRow) -> tuple:
    values = tuple(value_str(row.substitution[name]) for name in sorted(row.substitution))
    statement_keys = tuple(sorted(b.statement.key() for b in row.support))
    return (values, statement_keys, _substitution_key(row.substitution))


def execute(
    query: NarrativeQuery,
    policy: ContextPolicy,
    store: StatementStore,
    *,
    row_limit: int = DEFAULT_ROW_LIMIT,
    clause_order: Sequence[int] | None = None,
) -> list[ResultRow]:
    """All context-compatible result rows, deduplicated and canonically ordered.

    Rows are deduplicated by (substitution, set of supporting statements);
    among duplicates the support with the smallest per-clause statement keys
    is kept, so output does not depend on the join order.
    """
    validate_query(query)
    if clause_order is None:
        order: Sequence[int] = plan(query, store).clause_order
    else:
        _check_order(query, clause_order)
        order = clause_order

    kept: dict[tuple, tuple[dict[str, Value], tuple[Binding, ...]]] = {}
    for substitution, support in _search(query, policy, store, order):
        key = (
            _substitution_key(substitution),
            frozenset(b.statement.key() for b in support),
        )
        rep = tuple(b.statement.key() for b in support)
        existing = kept.get(key)
        if existing is None:
            kept[key] = (substitution, support)
            if len(kept) > row_limit:
                raise ResultLimitExceeded(row_limit)
        elif rep < tuple(b.statement.key() for b in existing[1]):
            kept[key] = (substitution, support)

    rows = [ResultRow(substitution, support) for substitution, support in kept.values()]
    rows.sort(key=_row_sort_key)
    return rows


def ask(query: NarrativeQuery, policy: ContextPolicy, store: StatementStore) -> bool:
    """Existence check for a variable-free query, with early exit."""
    validate_query(query)
    if query.variables():
        raise QueryHasVariables()
    order = plan(query, store).clause_order
    for _ in _search(query, policy, store, order):
        return True
    return False
