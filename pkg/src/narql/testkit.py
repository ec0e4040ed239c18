"""Brute-force oracle, random corpus generator, and shipped demo corpora.

``oracle_execute`` re-derives query results by exhaustive enumeration with no
indexes, no planning, and no incremental pruning; the engine must agree with
it exactly. ``gen_random`` produces seeded stores and valid queries for the
equivalence and monotonicity suites.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from importlib import resources

from .context import compatible
from .ingestion import IngestResult, StatementStore, ingest, load_vocabulary
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
    validate_query,
    value_key,
    value_str,
)

ORACLE_GUARD = 10_000_000

FIXTURES = ("obama", "cvst", "smith", "demo_covid")


class TooLargeForOracle(Exception):
    def __init__(self, size: int) -> None:
        super().__init__(f"{size} candidate tuples exceed the oracle guard of {ORACLE_GUARD}")


def _term_matches(term, position: str, statement: Statement, store: StatementStore,
                  substitution: dict[str, Value]) -> bool:
    """Direct transcription of the matching rules; mutates ``substitution``."""
    stored: Value = statement.subject if position == "subject" else statement.object
    if isinstance(term, EntityTerm):
        return isinstance(stored, str) and stored == term.ref
    if isinstance(term, LiteralTerm):
        return isinstance(stored, Literal) and stored.value == term.value
    # Typed variable.
    if term.type == LITERAL_TYPE:
        if not isinstance(stored, Literal):
            return False
    else:
        if not isinstance(stored, str) or store.entity_type(stored) != term.type:
            return False
    if term.name in substitution:
        return substitution[term.name] == stored
    substitution[term.name] = stored
    return True


def _clause_matches(clause: Clause, statement: Statement, store: StatementStore,
                    substitution: dict[str, Value]) -> bool:
    if statement.predicate != clause.predicate:
        return False
    if not _term_matches(clause.subject, "subject", statement, store, substitution):
        return False
    return _term_matches(clause.object, "object", statement, store, substitution)


def oracle_execute(query: NarrativeQuery, policy: ContextPolicy, store: StatementStore) -> list[ResultRow]:
    """Exhaustively enumerate every per-clause statement combination.

    Keeps the combinations whose shared-variable substitutions agree and
    whose contexts are compatible; dedups by (substitution, statement set)
    keeping the smallest per-clause support, and sorts canonically.
    """
    validate_query(query)
    statements = list(store.statements())
    per_clause: list[list[Statement]] = []
    size = 1
    for clause in query.clauses:
        candidates = [s for s in statements if _clause_matches(clause, s, store, {})]
        per_clause.append(candidates)
        size *= max(len(candidates), 1)
    if size > ORACLE_GUARD:
        raise TooLargeForOracle(size)

    kept: dict[tuple, ResultRow] = {}
    for combo in itertools.product(*per_clause):
        substitution: dict[str, Value] = {}
        if not all(
            _clause_matches(clause, statement, store, substitution)
            for clause, statement in zip(query.clauses, combo)
        ):
            continue
        support = tuple(
            Binding.create(
                i,
                query.clauses[i],
                combo[i],
                {
                    name: value
                    for name, value in substitution.items()
                    if any(
                        isinstance(t, VariableTerm) and t.name == name
                        for t in query.clauses[i].terms()
                    )
                },
            )
            for i in range(len(combo))
        )
        if not compatible(list(support), policy, store):
            continue
        row = ResultRow(substitution, support)
        key = (
            tuple((n, value_key(substitution[n])) for n in sorted(substitution)),
            frozenset(s.key() for s in combo),
        )
        existing = kept.get(key)
        if existing is None or tuple(s.key() for s in combo) < tuple(
            b.statement.key() for b in existing.support
        ):
            kept[key] = row

    def sort_key(row: ResultRow) -> tuple:
        return (
            tuple(value_str(row.substitution[n]) for n in sorted(row.substitution)),
            tuple(sorted(b.statement.key() for b in row.support)),
            tuple((n, value_key(row.substitution[n])) for n in sorted(row.substitution)),
        )

    return sorted(kept.values(), key=sort_key)


@dataclass(frozen=True)
class GenParams:
    docs: int = 8
    statements: int = 60
    types: int = 4
    entities: int = 18
    predicates: int = 5
    queries: int = 6


def gen_random(seed: int, params: GenParams | None = None) -> tuple[StatementStore, list[NarrativeQuery]]:
    """Deterministic random corpus plus valid queries guaranteed to hit it."""
    params = params or GenParams()
    rng = random.Random(seed)

    types = [f"Type{i}" for i in range(max(params.types, 1))]
    entities = [
        {
            "id": f"e{i}",
            "name": f"Entity {i}",
            "type": rng.choice(types),
            "synonyms": [f"syn-{i}"] if rng.random() < 0.3 else [],
        }
        for i in range(params.entities)
    ]
    predicates = [f"p{i}" for i in range(max(params.predicates, 1))]
    vocab = load_vocabulary(json.dumps({"entities": entities, "predicates": predicates}))

    if params.docs <= 0:
        return ingest([], vocab).store, []

    author_pool = [f"author-{i}" for i in range(max(2, params.docs // 2))]
    keyword_pool = [f"kw-{i}" for i in range(6)]
    literal_pool = ["4.01", "3.58", "0.5", "low", "high"]

    docs = []
    remaining = params.statements
    for d in range(params.docs):
        quota = max(1, remaining // (params.docs - d)) if remaining > 0 else 1
        remaining -= quota
        sentence_ids = [f"s{j}" for j in range(rng.randint(1, 3))]
        groups = [None] if rng.random() < 0.5 else ["g1", "g2"]
        statements = []
        for _ in range(quota):
            roll = rng.random()
            if roll < 0.75:
                obj: object = rng.choice(entities)["id"]
            elif roll < 0.9:
                obj = {"literal": rng.choice(literal_pool)}
            else:
                obj = f"unlinked-{rng.randint(0, 3)}"
            st = {
                "subject": rng.choice(entities)["id"],
                "predicate": rng.choice(predicates),
                "object": obj,
            }
            if rng.random() < 0.9:
                st["sentence"] = rng.choice(sentence_ids)
            group = rng.choice(groups)
            if group is not None:
                st["group"] = group
            statements.append(st)
        docs.append(
            {
                "id": f"d{d}",
                "title": f"Document {d}",
                "source": "generated",
                "authors": rng.sample(author_pool, rng.randint(1, 2)),
                "date": f"2021-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}",
                "keywords": rng.sample(keyword_pool, rng.randint(0, 4)),
                "sentences": {sid: f"sentence {sid} of d{d}" for sid in sentence_ids},
                "statements": statements,
            }
        )

    lines = [json.dumps(doc, ensure_ascii=False) for doc in docs]
    result = ingest(lines, vocab)
    assert not result.malformed
    store = result.store

    queries = [_gen_query(rng, store) for _ in range(params.queries)]
    return store, [q for q in queries if q is not None]


def _gen_query(rng: random.Random, store: StatementStore) -> NarrativeQuery | None:
    statements = list(store.statements())
    if not statements:
        return None

    terms: dict[tuple[str, str], object] = {}  # value key -> Term chosen for it
    var_count = 0

    def term_for(value: Value) -> object:
        nonlocal var_count
        key = value_key(value)
        if key in terms:
            return terms[key]
        make_var = var_count < 3 and rng.random() < 0.45
        if make_var and isinstance(value, Literal):
            var_count += 1
            term = VariableTerm(f"V{var_count}", LITERAL_TYPE)
        elif make_var and store.entity_type(value) is not None:
            var_count += 1
            term = VariableTerm(f"V{var_count}", store.entity_type(value))
        elif isinstance(value, Literal):
            term = LiteralTerm(value.value)
        else:
            term = EntityTerm(value)
        terms[key] = term
        return term

    anchor = rng.choice(statements)
    clauses = [Clause(term_for(anchor.subject), anchor.predicate, term_for(anchor.object))]

    target = rng.randint(1, 4)
    attempts = 0
    while len(clauses) < target and attempts < 30:
        attempts += 1
        candidate = rng.choice(statements)
        keys = {value_key(candidate.subject), value_key(candidate.object)}
        if not keys & set(terms):
            continue
        clause = Clause(
            term_for(candidate.subject), candidate.predicate, term_for(candidate.object)
        )
        if clause not in clauses:
            clauses.append(clause)

    query = NarrativeQuery(tuple(clauses))
    validate_query(query)
    return query


def fixture_text(name: str) -> tuple[str, str]:
    base = resources.files("narql") / "fixtures"
    docs = (base / f"{name}.jsonl").read_text(encoding="utf-8")
    vocab = (base / f"{name}.vocab.json").read_text(encoding="utf-8")
    return docs, vocab


def load_fixture(name: str) -> StatementStore:
    """Load one of the shipped corpora by name (see ``FIXTURES``)."""
    docs, vocab_text = fixture_text(name)
    result: IngestResult = ingest(docs, load_vocabulary(vocab_text))
    if result.malformed:
        raise ValueError(f"fixture {name} has malformed records: {result.malformed[0]}")
    return result.store
