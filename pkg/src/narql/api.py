"""Request handling shared by the HTTP service and the CLI.

Both front ends call :func:`run_query_request` and serialize with
:func:`canonical_json`, so ``narql query --json`` output is byte-identical to
the ``POST /query`` response body for the same logical request.
"""

from __future__ import annotations

import json
import time

from . import aggregation as agg
from . import engine, parser
from .ingestion import StatementStore, Vocabulary, document_payload
from .model import (
    Literal,
    QueryValidationError,
    ResultRow,
    Value,
    policy_from_name,
)

MAX_PAGE_LIMIT = 1000
DEFAULT_PAGE_LIMIT = 100

_REQUEST_KEYS = {"query", "policy", "similarity_threshold", "limit", "offset", "aggregate"}


class RequestError(Exception):
    def __init__(self, code: str, message: str) -> None:
        self.code = code
        super().__init__(message)


def canonical_json(payload: object) -> str:
    """Deterministic serialization: sorted keys, compact, trailing newline."""
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"


def error_body(code: str, message: str, **extra: object) -> dict:
    err: dict = {"code": code, "message": message}
    err.update(extra)
    return {"error": err}


def _value_payload(value: Value, vocab: Vocabulary) -> dict:
    if isinstance(value, Literal):
        return {"literal": value.value}
    return {"entity": value, "name": vocab.display_name(value)}


def _entry_payload(entry: agg.AggregatedResult, vocab: Vocabulary, rank_by_rows: bool) -> dict:
    return {
        "substitution": {
            name: _value_payload(value, vocab) for name, value in entry.substitution.items()
        },
        "doc_count": entry.doc_count,
        "display": agg.format_entry(entry, vocab, rank_by_rows=rank_by_rows),
        "provenance_sample": [
            {"doc": doc, "sentence": sentence} for doc, sentence in entry.sample_provenance
        ],
    }


def _row_payload(row: ResultRow, vocab: Vocabulary) -> dict:
    return {
        "substitution": {
            name: _value_payload(value, vocab) for name, value in row.substitution.items()
        },
        "docs": sorted(row.docs()),
        "support": [
            {
                "clause": binding.clause_index,
                "subject": binding.statement.subject,
                "predicate": binding.statement.predicate,
                "object": _value_payload(binding.statement.object, vocab),
                "doc": binding.statement.doc,
                "sentence": binding.statement.sentence,
                "group": binding.statement.raw_group(),
            }
            for binding in row.support
        ],
    }


def _parse_request(payload: object, default_similarity_threshold: float) -> dict:
    if not isinstance(payload, dict):
        raise RequestError("InvalidRequest", "request body must be a JSON object")
    unknown = set(payload) - _REQUEST_KEYS
    if unknown:
        raise RequestError("InvalidRequest", f"unknown request fields {sorted(unknown)}")

    query = payload.get("query")
    if not isinstance(query, str) or not query.strip():
        raise RequestError("InvalidRequest", "'query' must be a non-empty string")
    policy_name = payload.get("policy")
    if policy_name not in ("GLOBAL", "DOCUMENT", "GROUP", "SIMILARITY"):
        raise RequestError(
            "InvalidPolicy", "'policy' must be one of GLOBAL, DOCUMENT, GROUP, SIMILARITY"
        )

    threshold = payload.get("similarity_threshold", default_similarity_threshold)
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) or not 0 <= threshold <= 1:
        raise RequestError("InvalidRequest", "'similarity_threshold' must lie in [0, 1]")

    limit = payload.get("limit", DEFAULT_PAGE_LIMIT)
    if not isinstance(limit, int) or isinstance(limit, bool) or not 1 <= limit <= MAX_PAGE_LIMIT:
        raise RequestError("InvalidLimit", f"'limit' must be an integer in [1, {MAX_PAGE_LIMIT}]")
    offset = payload.get("offset", 0)
    if not isinstance(offset, int) or isinstance(offset, bool) or offset < 0:
        raise RequestError("InvalidRequest", "'offset' must be a non-negative integer")

    do_aggregate = payload.get("aggregate", True)
    if not isinstance(do_aggregate, bool):
        raise RequestError("InvalidRequest", "'aggregate' must be a boolean")

    return {
        "query": query,
        "policy": policy_from_name(policy_name, float(threshold)),
        "limit": limit,
        "offset": offset,
        "aggregate": do_aggregate,
    }


# Reported timings are floored to this step. Responses must be byte-stable
# across repeated identical requests (and across the CLI/service pair), so
# sub-step work always reports 0 rather than flickering with clock noise.
STATS_QUANTUM_MS = 100


def _elapsed_ms(since: float) -> int:
    ms = int((time.thread_time() - since) * 1000)
    return ms - ms % STATS_QUANTUM_MS


def run_query_request(
    store: StatementStore,
    payload: object,
    *,
    default_similarity_threshold: float = 0.5,
) -> tuple[int, dict]:
    """Execute one query request; returns (http_status, response_body)."""
    try:
        request = _parse_request(payload, default_similarity_threshold)
    except RequestError as exc:
        return 400, error_body(exc.code, str(exc))

    started = time.thread_time()
    try:
        query = parser.parse(request["query"], store.vocabulary, known_ids=store.entity_ids)
    except parser.AmbiguousEntity as exc:
        return 400, error_body(exc.code, str(exc), position=exc.position, candidates=exc.candidates)
    except parser.QueryParseError as exc:
        return 400, error_body(exc.code, str(exc), position=exc.position)
    except QueryValidationError as exc:
        return 400, error_body(exc.code, str(exc))
    parse_ms = _elapsed_ms(started)

    vocab = store.vocabulary
    rendered = parser.render(query, vocab)
    variables = sorted(query.variables())

    started = time.thread_time()
    if not variables:
        answer = engine.ask(query, request["policy"], store)
        return 200, {
            "query": rendered,
            "variables": [],
            "ask": answer,
            "stats": {"parse_ms": parse_ms, "exec_ms": _elapsed_ms(started), "rows": 0},
        }

    try:
        rows = engine.execute(query, request["policy"], store)
    except engine.ResultLimitExceeded as exc:
        return 422, error_body(exc.code, str(exc), limit=exc.limit)
    exec_ms = _elapsed_ms(started)

    window = slice(request["offset"], request["offset"] + request["limit"])
    if request["aggregate"]:
        entries = agg.aggregate(rows)
        results = [_entry_payload(e, vocab, rank_by_rows=False) for e in entries[window]]
        total = len(entries)
    else:
        results = [_row_payload(r, vocab) for r in rows[window]]
        total = len(rows)

    return 200, {
        "query": rendered,
        "variables": variables,
        "results": results,
        "total": total,
        "stats": {"parse_ms": parse_ms, "exec_ms": exec_ms, "rows": len(rows)},
    }


def vocabulary_search(vocab: Vocabulary, q: str, type_filter: str | None = None) -> list[dict]:
    """Case-insensitive prefix matches on names and synonyms, name-ascending, <= 50."""
    needle = q.strip().casefold()
    matches = []
    for entity in vocab.entities.values():
        if type_filter is not None and entity.type != type_filter:
            continue
        forms = (entity.name, *entity.synonyms)
        if any(form.casefold().startswith(needle) for form in forms if form):
            matches.append(entity)
    matches.sort(key=lambda e: (e.name, e.id))
    return [
        {"id": e.id, "name": e.name, "type": e.type, "synonyms": list(e.synonyms)}
        for e in matches[:50]
    ]


def document_body(store: StatementStore, doc_id: str) -> dict | None:
    doc = store.documents.get(doc_id)
    if doc is None:
        return None
    return document_payload(doc)
