/**
 * Clause drafts and their serialization to the server's query grammar.
 *
 * A draft is the builder's editable form of one clause: each term slot is a
 * resolved entity (from autocomplete), a typed-variable chip, or a literal.
 * Serialization is canonical, so a round trip through the server's parser
 * echoes the same text back.
 */

export type TermDraft =
  | { kind: "entity"; id: string; name: string }
  | { kind: "variable"; name: string; type: string }
  | { kind: "literal"; value: string };

export interface ClauseDraft {
  subject: TermDraft | null;
  predicate: string | null;
  object: TermDraft | null;
}

export interface DraftError {
  clause: number;
  code: "Incomplete" | "LiteralSubject" | "ConflictingVariableType" | "DisconnectedQuery";
  message: string;
}

const UNSAFE_BARE = /[,()"?]/;

function quote(text: string): string {
  return '"' + text.replace(/\\/g, "\\\\").replace(/"/g, '\\"') + '"';
}

export function serializeTerm(term: TermDraft): string {
  switch (term.kind) {
    case "variable":
      return `?${term.name}(${term.type})`;
    case "literal":
      return quote(term.value);
    case "entity": {
      const surface = term.name.trim() ? term.name : term.id;
      return UNSAFE_BARE.test(surface) || surface !== surface.trim() ? quote(surface) : surface;
    }
  }
}

export function serializeClause(clause: ClauseDraft): string {
  if (!clause.subject || !clause.predicate || !clause.object) {
    throw new Error("clause draft is incomplete");
  }
  return `(${serializeTerm(clause.subject)}, ${clause.predicate}, ${serializeTerm(clause.object)})`;
}

export function serializeQuery(clauses: ClauseDraft[]): string {
  return clauses.map(serializeClause).join(" AND ");
}

/** Node identity of a term in the clause graph; variables key by name. */
function termKey(term: TermDraft): string {
  switch (term.kind) {
    case "variable":
      return `var:${term.name}`;
    case "entity":
      return `ent:${term.id}`;
    case "literal":
      return `lit:${term.value}`;
  }
}

/**
 * Client-side pre-validation. Only the cheap checks the server also runs:
 * completeness, variable-type consistency, and connectivity. The server
 * stays authoritative for everything else (resolution, predicates).
 */
export function validateDrafts(clauses: ClauseDraft[]): DraftError[] {
  const errors: DraftError[] = [];
  clauses.forEach((clause, i) => {
    if (!clause.subject || !clause.predicate?.trim() || !clause.object) {
      errors.push({ clause: i, code: "Incomplete", message: "fill in all three slots" });
    } else if (clause.subject.kind === "literal") {
      errors.push({ clause: i, code: "LiteralSubject", message: "a literal cannot be the subject" });
    }
  });
  if (errors.length > 0) {
    return errors;
  }

  const variableTypes = new Map<string, string>();
  clauses.forEach((clause, i) => {
    for (const term of [clause.subject!, clause.object!]) {
      if (term.kind !== "variable") continue;
      const known = variableTypes.get(term.name);
      if (known === undefined) {
        variableTypes.set(term.name, term.type);
      } else if (known !== term.type) {
        errors.push({
          clause: i,
          code: "ConflictingVariableType",
          message: `variable ${term.name} is used as both ${known} and ${term.type}`,
        });
      }
    }
  });
  if (errors.length > 0) {
    return errors;
  }

  // Connectivity over clauses via shared term nodes.
  if (clauses.length > 1) {
    const adjacency = new Map<string, number[]>();
    clauses.forEach((clause, i) => {
      for (const term of [clause.subject!, clause.object!]) {
        const key = termKey(term);
        const bucket = adjacency.get(key) ?? [];
        bucket.push(i);
        adjacency.set(key, bucket);
      }
    });
    const reached = new Set<number>([0]);
    const frontier = [0];
    while (frontier.length > 0) {
      const current = frontier.pop()!;
      const clause = clauses[current]!;
      for (const term of [clause.subject!, clause.object!]) {
        for (const next of adjacency.get(termKey(term)) ?? []) {
          if (!reached.has(next)) {
            reached.add(next);
            frontier.push(next);
          }
        }
      }
    }
    clauses.forEach((_, i) => {
      if (!reached.has(i)) {
        errors.push({
          clause: i,
          code: "DisconnectedQuery",
          message: "this clause shares no entity, variable, or literal with the rest",
        });
      }
    });
  }
  return errors;
}

/** Variables of the draft in first-occurrence order. */
export function draftVariables(clauses: ClauseDraft[]): Map<string, string> {
  const out = new Map<string, string>();
  for (const clause of clauses) {
    for (const term of [clause.subject, clause.object]) {
      if (term?.kind === "variable" && !out.has(term.name)) {
        out.set(term.name, term.type);
      }
    }
  }
  return out;
}
