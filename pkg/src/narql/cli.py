"""Command-line front door: ingest corpora, run queries, explain, serve.

Exit codes: 0 success, 2 usage error, 3 data error, 4 query error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import engine, parser
from .aggregation import display_value
from .api import canonical_json, run_query_request
from .ingestion import (
    DuplicateDocumentId,
    IndexFormatError,
    MalformedRecord,
    StatementStore,
    ingest,
    load_index,
    load_vocabulary,
    save_index,
)
from .model import Literal, Value, policy_from_name
from .provenance import explain

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_QUERY = 4


class NoSuchSubstitution(Exception):
    def __init__(self, pick: str) -> None:
        super().__init__(f"no result row matches {pick!r}")


def _build_argparser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="narql", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="build an index directory from a corpus")
    p_ingest.add_argument("--docs", required=True, help="JSON-lines document file")
    p_ingest.add_argument("--vocab", required=True, help="vocabulary JSON file")
    p_ingest.add_argument("--out", required=True, help="index directory to write")

    def add_query_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--index", default=os.environ.get("NARQL_INDEX"), help="index directory")
        p.add_argument(
            "--policy",
            default="DOCUMENT",
            choices=["GLOBAL", "DOCUMENT", "GROUP", "SIMILARITY"],
        )
        p.add_argument("--similarity-threshold", type=float, default=0.5)

    p_query = sub.add_parser("query", help="run a query against an index")
    add_query_args(p_query)
    p_query.add_argument("--raw-rows", action="store_true", help="print rows instead of aggregates")
    p_query.add_argument("--json", action="store_true", help="print the service response body")
    p_query.add_argument("--limit", type=int, default=None)
    p_query.add_argument("--offset", type=int, default=None)
    p_query.add_argument("query")

    p_explain = sub.add_parser("explain", help="show sentence provenance for a substitution")
    add_query_args(p_explain)
    p_explain.add_argument("--pick", required=True, help='substitution, e.g. "X=Fatigue,Y=4.01"')
    p_explain.add_argument("query")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--index", default=os.environ.get("NARQL_INDEX"))
    p_serve.add_argument("--port", type=int, default=int(os.environ.get("NARQL_PORT", "8000")))
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--similarity-threshold", type=float, default=0.5)

    return top


def _load_store(index_dir: str | None) -> StatementStore:
    if not index_dir:
        raise IndexFormatError("an index directory is required (--index or NARQL_INDEX)")
    return load_index(index_dir)


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        doc_text = Path(args.docs).read_text(encoding="utf-8")
        vocab_text = Path(args.vocab).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        vocab = load_vocabulary(vocab_text)
        result = ingest(doc_text, vocab)
    except (MalformedRecord, DuplicateDocumentId) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    store = result.store
    if not store.documents:
        print("error: no documents", file=sys.stderr)
        return EXIT_DATA
    save_index(store, args.out)
    print(
        f"ingested {len(store.documents)} documents, "
        f"{store.statement_count()} statements, {len(result.malformed)} malformed"
    )
    for record in result.malformed:
        print(f"  line {record.line}: {record.reason}")
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    try:
        store = _load_store(args.index)
    except IndexFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    payload: dict = {
        "query": args.query,
        "policy": args.policy,
        "similarity_threshold": args.similarity_threshold,
        "aggregate": not args.raw_rows,
    }
    if args.limit is not None:
        payload["limit"] = args.limit
    if args.offset is not None:
        payload["offset"] = args.offset

    status, body = run_query_request(store, payload)
    if args.json:
        sys.stdout.write(canonical_json(body))
        return EXIT_OK if status == 200 else EXIT_QUERY
    if status != 200:
        err = body["error"]
        position = f" (position {err['position']})" if "position" in err else ""
        print(f"error [{err['code']}]: {err['message']}{position}", file=sys.stderr)
        return EXIT_QUERY
    if "ask" in body:
        print("true" if body["ask"] else "false")
        return EXIT_OK
    for entry in body["results"]:
        if args.raw_rows:
            values = ", ".join(
                f"{name}={_value_text(value)}" for name, value in sorted(entry["substitution"].items())
            )
            print(f"{values}  [docs: {', '.join(entry['docs'])}]")
        else:
            print(entry["display"])
    return EXIT_OK


def _value_text(value: dict) -> str:
    return value["name"] if "entity" in value else value["literal"]


def _parse_pick(pick: str) -> dict[str, str]:
    # "X=Name,Y=4.01"; a comma not followed by "name=" belongs to the value.
    assignments: list[list[str]] = []
    for piece in pick.split(","):
        if "=" in piece:
            name, value = piece.split("=", 1)
            assignments.append([name.strip(), value])
        elif assignments:
            assignments[-1][1] += "," + piece
        else:
            raise NoSuchSubstitution(pick)
    return {name: value.strip() for name, value in assignments}


def _pick_matches(value: Value, wanted: str, store: StatementStore) -> bool:
    if isinstance(value, Literal):
        return value.value == wanted
    if value == wanted:
        return True
    if store.vocabulary.display_name(value).casefold() == wanted.casefold():
        return True
    return value in store.vocabulary.resolve_surface(wanted)


def cmd_explain(args: argparse.Namespace) -> int:
    try:
        store = _load_store(args.index)
    except IndexFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    policy = policy_from_name(args.policy, args.similarity_threshold)
    try:
        query = parser.parse(args.query, store.vocabulary, known_ids=store.entity_ids)
        rows = engine.execute(query, policy, store)
        picked = _parse_pick(args.pick)
        matching = [
            row
            for row in rows
            if all(
                name in row.substitution and _pick_matches(row.substitution[name], wanted, store)
                for name, wanted in picked.items()
            )
        ]
        if not matching:
            raise NoSuchSubstitution(args.pick)
    except (parser.QueryParseError, engine.ResultLimitExceeded, ValueError, NoSuchSubstitution) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUERY

    vocab = store.vocabulary
    for row in matching:
        values = ", ".join(
            f"{name}={display_value(row.substitution[name], vocab)}"
            for name in sorted(row.substitution)
        )
        print(values)
        explanation = explain(row, store, query)
        for i, entry in enumerate(explanation.per_clause, start=1):
            print(f"  [{i}] {entry.clause_text}")
            print(f"      doc {entry.doc} - {entry.doc_title}")
            sentence = entry.sentence_text if entry.sentence_text is not None else "(no sentence)"
            print(f'      "{sentence}"' if entry.sentence_text is not None else f"      {sentence}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        store = _load_store(args.index)
    except IndexFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    app = create_app(store=store, similarity_threshold=args.similarity_threshold)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_argparser().parse_args(argv)
    handlers = {
        "ingest": cmd_ingest,
        "query": cmd_query,
        "explain": cmd_explain,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
