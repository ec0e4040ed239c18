"""Result explanation: the matched sentences and documents behind a row."""

from __future__ import annotations

from dataclasses import dataclass

from .aggregation import display_value
from .ingestion import StatementStore
from .model import (
    Clause,
    EntityTerm,
    LiteralTerm,
    NarrativeQuery,
    ResultRow,
    Statement,
    Value,
)


class StaleRow(Exception):
    """The row references a statement the store no longer contains."""

    def __init__(self, statement: Statement) -> None:
        self.statement = statement
        super().__init__(f"statement {statement.key()!r} is not in the store")


@dataclass(frozen=True)
class ClauseEvidence:
    clause_text: str
    statement: Statement
    sentence_text: str | None
    doc: str
    doc_title: str


@dataclass(frozen=True)
class Explanation:
    per_clause: tuple[ClauseEvidence, ...]


def _substituted_clause_text(clause: Clause, substitution: dict[str, Value], store: StatementStore) -> str:
    vocab = store.vocabulary

    def part(term) -> str:
        if isinstance(term, EntityTerm):
            return vocab.display_name(term.ref)
        if isinstance(term, LiteralTerm):
            return term.value
        return display_value(substitution[term.name], vocab)

    return f"({part(clause.subject)}, {clause.predicate}, {part(clause.object)})"


def explain(row: ResultRow, store: StatementStore, query: NarrativeQuery) -> Explanation:
    """Per-clause sentence text and document metadata for one result row.

    Sentence text is returned exactly as ingested; statements without a
    sentence id yield ``sentence_text=None``.
    """
    entries = []
    for binding in sorted(row.support, key=lambda b: b.clause_index):
        statement = binding.statement
        if not store.contains(statement):
            raise StaleRow(statement)
        doc = store.documents[statement.doc]
        sentence_text = doc.sentences.get(statement.sentence) if statement.sentence else None
        entries.append(
            ClauseEvidence(
                clause_text=_substituted_clause_text(
                    query.clauses[binding.clause_index], row.substitution, store
                ),
                statement=statement,
                sentence_text=sentence_text,
                doc=statement.doc,
                doc_title=doc.title,
            )
        )
    return Explanation(tuple(entries))
