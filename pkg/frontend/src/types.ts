/** Wire types for the narql HTTP API. */

export type Policy = "GLOBAL" | "DOCUMENT" | "GROUP" | "SIMILARITY";

export interface EntityValue {
  entity: string;
  name: string;
}

export interface LiteralValue {
  literal: string;
}

export type SubstitutionValue = EntityValue | LiteralValue;

export function isLiteralValue(value: SubstitutionValue): value is LiteralValue {
  return "literal" in value;
}

export interface ProvenanceRef {
  doc: string;
  sentence: string | null;
}

export interface AggregatedEntry {
  substitution: Record<string, SubstitutionValue>;
  doc_count: number;
  display: string;
  provenance_sample: ProvenanceRef[];
}

export interface QueryStats {
  parse_ms: number;
  exec_ms: number;
  rows: number;
}

export interface QueryResponse {
  query: string;
  variables: string[];
  ask?: boolean;
  results?: AggregatedEntry[];
  total?: number;
  stats: QueryStats;
}

export interface ApiError {
  error: {
    code: string;
    message: string;
    position?: number;
    candidates?: string[];
  };
}

export interface QueryRequest {
  query: string;
  policy: Policy;
  similarity_threshold?: number;
  limit?: number;
  offset?: number;
  aggregate?: boolean;
}

export interface VocabularyEntry {
  id: string;
  name: string;
  type: string;
  synonyms: string[];
}

export interface DocumentStatement {
  subject: string;
  predicate: string;
  object: string | { literal: string };
  sentence?: string;
  group?: string;
}

export interface DocumentBody {
  id: string;
  title: string;
  source: string;
  authors: string[];
  date: string;
  keywords: string[];
  sentences: Record<string, string>;
  statements: DocumentStatement[];
}
