"""HTTP API over a loaded index: /query, /vocabulary/search, /documents/{id}.

A thin adapter: every response body is produced by the same functions the
CLI uses, serialized canonically. The store is loaded once at startup and
never mutated, so concurrent requests need no locking.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .api import canonical_json, document_body, error_body, run_query_request, vocabulary_search
from .ingestion import StatementStore, load_index


def _json_response(status: int, body: object) -> Response:
    return Response(
        content=canonical_json(body), status_code=status, media_type="application/json"
    )


def create_app(
    index_dir: str | None = None,
    *,
    store: StatementStore | None = None,
    cors_origins: list[str] | None = None,
    similarity_threshold: float = 0.5,
) -> FastAPI:
    if store is None:
        index_dir = index_dir or os.environ.get("NARQL_INDEX")
        if not index_dir:
            raise ValueError("an index directory is required (flag or NARQL_INDEX)")
        store = load_index(index_dir)

    app = FastAPI(title="narql", docs_url=None, redoc_url=None)
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/query")
    async def query(request: Request) -> Response:
        try:
            payload = await request.json()
        except Exception:
            return _json_response(400, error_body("InvalidRequest", "body must be valid JSON"))
        try:
            status, body = run_query_request(
                store, payload, default_similarity_threshold=similarity_threshold
            )
        except Exception as exc:  # pragma: no cover - defensive 500 path
            return _json_response(500, error_body("InternalError", str(exc)))
        return _json_response(status, body)

    @app.get("/vocabulary/search")
    async def search(q: str = "", type: str | None = None) -> Response:
        if not q.strip():
            return _json_response(400, error_body("InvalidRequest", "query parameter 'q' must be non-empty"))
        return _json_response(200, vocabulary_search(store.vocabulary, q, type))

    @app.get("/documents/{doc_id}")
    async def document(doc_id: str) -> Response:
        body = document_body(store, doc_id)
        if body is None:
            return _json_response(404, error_body("NotFound", f"no document {doc_id!r}"))
        return _json_response(200, body)

    return app
