"""Grouping result rows by substitution and ranking by supporting documents.

Reproduces the "Name (count)" presentation: one entry per distinct
substitution, counted in distinct documents, ranked count-descending.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .ingestion import Vocabulary
from .model import Literal, ResultRow, Value, value_key, value_str

SAMPLE_PROVENANCE_LIMIT = 5


@dataclass(frozen=True)
class AggregatedResult:
    substitution: dict[str, Value]
    doc_count: int
    docs: frozenset[str]
    row_count: int
    sample_provenance: tuple[tuple[str, str | None], ...]


def aggregate(rows: Sequence[ResultRow], *, rank_by_rows: bool = False) -> list[AggregatedResult]:
    """One entry per distinct substitution, sorted by count then value strings.

    The ranking count is the distinct-document count; ``rank_by_rows``
    switches it to the raw row count (never the default).
    """
    grouped: dict[tuple, dict] = {}
    for row in rows:
        key = tuple((name, value_key(row.substitution[name])) for name in sorted(row.substitution))
        entry = grouped.setdefault(
            key, {"substitution": row.substitution, "docs": set(), "rows": 0, "prov": set()}
        )
        entry["rows"] += 1
        for binding in row.support:
            entry["docs"].add(binding.statement.doc)
            entry["prov"].add((binding.statement.doc, binding.statement.sentence))

    results = [
        AggregatedResult(
            substitution=entry["substitution"],
            doc_count=len(entry["docs"]),
            docs=frozenset(entry["docs"]),
            row_count=entry["rows"],
            sample_provenance=tuple(
                sorted(entry["prov"], key=lambda p: (p[0], p[1] or ""))[:SAMPLE_PROVENANCE_LIMIT]
            ),
        )
        for entry in grouped.values()
    ]

    def sort_key(entry: AggregatedResult) -> tuple:
        count = entry.row_count if rank_by_rows else entry.doc_count
        values = tuple(value_str(entry.substitution[n]) for n in sorted(entry.substitution))
        return (-count, values)

    results.sort(key=sort_key)
    return results


def display_value(value: Value, vocab: Vocabulary) -> str:
    if isinstance(value, Literal):
        return value.value
    return vocab.display_name(value)


def format_entry(entry: AggregatedResult, vocab: Vocabulary, *, rank_by_rows: bool = False) -> str:
    """Render one entry as "Name (count)"; unlinkable values fall back to ids."""
    names = ", ".join(
        display_value(entry.substitution[n], vocab) for n in sorted(entry.substitution)
    )
    count = entry.row_count if rank_by_rows else entry.doc_count
    return f"{names} ({count})"
