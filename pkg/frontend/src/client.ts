/**
 * Typed client for the narql HTTP API.
 *
 * At most one query is in flight; newer submissions abort the previous one.
 * The fetch implementation is injectable for tests.
 */

import type {
  ApiError,
  DocumentBody,
  QueryRequest,
  QueryResponse,
  VocabularyEntry,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class QueryAborted extends Error {
  constructor() {
    super("query superseded by a newer submission");
  }
}

export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiError,
  ) {
    super(body.error.message);
  }
}

export class NarqlClient {
  private readonly fetchImpl: FetchLike;
  private inflight: AbortController | null = null;

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  /** POST /query, cancelling any still-running previous query. */
  async postQuery(request: QueryRequest): Promise<QueryResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/query`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) {
        throw new QueryAborted();
      }
      throw err;
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
    }
    const body = (await response.json()) as QueryResponse | ApiError;
    if (!response.ok) {
      throw new ApiFailure(response.status, body as ApiError);
    }
    return body as QueryResponse;
  }

  async searchVocabulary(q: string, type?: string): Promise<VocabularyEntry[]> {
    const params = new URLSearchParams({ q });
    if (type) {
      params.set("type", type);
    }
    const response = await this.fetchImpl(`${this.baseUrl}/vocabulary/search?${params}`);
    if (!response.ok) {
      throw new ApiFailure(response.status, (await response.json()) as ApiError);
    }
    return (await response.json()) as VocabularyEntry[];
  }

  async getDocument(id: string): Promise<DocumentBody> {
    const response = await this.fetchImpl(`${this.baseUrl}/documents/${encodeURIComponent(id)}`);
    if (!response.ok) {
      throw new ApiFailure(response.status, (await response.json()) as ApiError);
    }
    return (await response.json()) as DocumentBody;
  }
}
