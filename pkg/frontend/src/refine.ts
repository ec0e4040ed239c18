/**
 * Result-driven query refinement: clicking a substitution in the results
 * table turns the variable chip into that fixed entity, leaving the user in
 * edit mode for the next iteration.
 */

import type { ClauseDraft, TermDraft } from "./grammar.js";
import type { SubstitutionValue } from "./types.js";
import { isLiteralValue } from "./types.js";

export type RefineOutcome =
  | { kind: "replaced"; clauses: ClauseDraft[] }
  | { kind: "copy-only"; text: string };

/**
 * Replace every chip of the clicked variable with the clicked value.
 *
 * Literal-valued substitutions cannot become typed entities, so they only
 * offer their text for copying.
 */
export function refineFromResult(
  clauses: ClauseDraft[],
  variable: string,
  value: SubstitutionValue,
): RefineOutcome {
  if (isLiteralValue(value)) {
    return { kind: "copy-only", text: value.literal };
  }
  const replacement: TermDraft = { kind: "entity", id: value.entity, name: value.name };
  const swap = (term: TermDraft | null): TermDraft | null =>
    term?.kind === "variable" && term.name === variable ? { ...replacement } : term;
  return {
    kind: "replaced",
    clauses: clauses.map((clause) => ({
      subject: swap(clause.subject),
      predicate: clause.predicate,
      object: swap(clause.object),
    })),
  };
}

/** Append an empty clause template seeded with a fixed entity as subject. */
export function appendClauseWith(clauses: ClauseDraft[], entity: TermDraft): ClauseDraft[] {
  return [...clauses, { subject: entity, predicate: null, object: null }];
}
