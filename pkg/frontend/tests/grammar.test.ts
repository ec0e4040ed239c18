import { describe, expect, it } from "vitest";

import {
  type ClauseDraft,
  type TermDraft,
  draftVariables,
  serializeQuery,
  serializeTerm,
  validateDrafts,
} from "../src/grammar.js";
import recorded from "./fixtures/recorded.json" with { type: "json" };

const entity = (id: string, name: string): TermDraft => ({ kind: "entity", id, name });
const variable = (name: string, type: string): TermDraft => ({ kind: "variable", name, type });
const literal = (value: string): TermDraft => ({ kind: "literal", value });

const clause = (subject: TermDraft, predicate: string, object: TermDraft): ClauseDraft => ({
  subject,
  predicate,
  object,
});

describe("serialization", () => {
  it("renders each term kind", () => {
    expect(serializeTerm(entity("dz:covid19", "Covid 19"))).toBe("Covid 19");
    expect(serializeTerm(variable("X", "Vaccine"))).toBe("?X(Vaccine)");
    expect(serializeTerm(literal("4.01"))).toBe('"4.01"');
  });

  it("quotes entity names the bare grammar would mis-tokenize", () => {
    expect(serializeTerm(entity("e1", "Smith, J."))).toBe('"Smith, J."');
    expect(serializeTerm(entity("e1", "what?"))).toBe('"what?"');
    expect(serializeTerm(entity("e1", 'said "hi"'))).toBe('"said \\"hi\\""');
  });

  it("falls back to the id when the display name is empty", () => {
    expect(serializeTerm(entity("dz:x", ""))).toBe("dz:x");
  });

  it("joins clauses with AND", () => {
    const drafts = [
      clause(entity("dz:long_covid", "post-acute COVID-19 syndrome"), "associated", entity("sp:humans", "Humans")),
      clause(entity("sp:humans", "Humans"), "associated", variable("X", "Disease")),
    ];
    expect(serializeQuery(drafts)).toBe(
      "(post-acute COVID-19 syndrome, associated, Humans) AND (Humans, associated, ?X(Disease))",
    );
  });
});

describe("client-side validation", () => {
  it("flags incomplete clauses", () => {
    const errors = validateDrafts([{ subject: entity("a", "A"), predicate: null, object: null }]);
    expect(errors.map((e) => e.code)).toEqual(["Incomplete"]);
  });

  it("rejects literal subjects", () => {
    const errors = validateDrafts([clause(literal("4.01"), "p", entity("a", "A"))]);
    expect(errors.map((e) => e.code)).toEqual(["LiteralSubject"]);
  });

  it("flags conflicting variable types before connectivity", () => {
    const errors = validateDrafts([
      clause(entity("a", "A"), "p", variable("X", "Disease")),
      clause(variable("X", "Drug"), "q", entity("b", "B")),
    ]);
    expect(errors.map((e) => e.code)).toEqual(["ConflictingVariableType"]);
  });

  it("flags disconnected clauses inline before any request", () => {
    const errors = validateDrafts([
      clause(entity("a", "A"), "p", variable("X", "T")),
      clause(entity("b", "B"), "q", variable("Y", "U")),
    ]);
    expect(errors.map((e) => e.code)).toEqual(["DisconnectedQuery"]);
    expect(errors[0]!.clause).toBe(1);
  });

  it("accepts clauses connected through a shared literal", () => {
    const errors = validateDrafts([
      clause(entity("a", "A"), "p", literal("4.01")),
      clause(entity("b", "B"), "q", literal("4.01")),
    ]);
    expect(errors).toEqual([]);
  });

  it("collects variables in first-occurrence order", () => {
    const drafts = [
      clause(variable("Y", "U"), "p", variable("X", "T")),
      clause(variable("X", "T"), "q", entity("a", "A")),
    ];
    expect([...draftVariables(drafts).entries()]).toEqual([
      ["Y", "U"],
      ["X", "T"],
    ]);
  });
});

describe("recorded policy toggle deltas", () => {
  it("switching the CVST drafts from GLOBAL to GROUP shrinks the table 4 to 2", () => {
    const byPolicy = new Map(
      recorded.drafts
        .filter((d) => (d.request.query as string).includes("risk after vaccination, ?Y(Literal)"))
        .map((d) => [d.policy, d.response] as const),
    );
    expect(byPolicy.get("GLOBAL")?.total).toBe(4);
    expect(byPolicy.get("GROUP")?.total).toBe(2);
    const groupDisplays = byPolicy.get("GROUP")?.results?.map((r) => r.display) ?? [];
    expect(groupDisplays).toContain("ChAdOx1 nCov-19, 4.01 (1)");
    expect(groupDisplays).toContain("BNT162, 3.58 (1)");
  });

  it("policy strictness is visible in the recorded vaccine counts", () => {
    const totals = new Map(
      recorded.drafts
        .filter((d) => d.request.query === "(Covid 19, associated, ?X(Vaccine))")
        .map((d) => [d.policy, d.response.total as number] as const),
    );
    expect(totals.get("GROUP")!).toBeLessThanOrEqual(totals.get("DOCUMENT")!);
    expect(totals.get("DOCUMENT")!).toBeLessThanOrEqual(totals.get("GLOBAL")!);
  });
});

describe("recorded grammar round trips", () => {
  it("covers twenty draft states", () => {
    expect(recorded.drafts).toHaveLength(20);
  });

  it.each(recorded.drafts.map((draft, i) => [i, draft] as const))(
    "draft %i serializes to a string the server accepts and echoes back",
    (_i, draft) => {
      const clauses = draft.clauses as ClauseDraft[];
      expect(validateDrafts(clauses)).toEqual([]);
      const serialized = serializeQuery(clauses);
      // the recorded request was accepted by the real server (200)
      expect(serialized).toBe(draft.request.query);
      // and the server's canonical echo has identical clause structure
      expect(draft.response.query).toBe(serialized);
      const echoedClauses = (draft.response.query as string).split(" AND ");
      expect(echoedClauses).toHaveLength(clauses.length);
      // variables survive the round trip exactly
      expect(draft.response.variables).toEqual([...draftVariables(clauses).keys()].sort());
    },
  );
});
