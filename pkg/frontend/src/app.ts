/**
 * DOM wiring for the query builder: clause rows with autocomplete, a policy
 * switcher, the ranked results table, and the provenance drawer. All result
 * numbers come from service responses; nothing is computed client-side.
 */

import { NarqlClient, ApiFailure, QueryAborted } from "./client.js";
import {
  type ClauseDraft,
  type TermDraft,
  draftVariables,
  serializeQuery,
  validateDrafts,
} from "./grammar.js";
import { refineFromResult } from "./refine.js";
import type { AggregatedEntry, Policy, QueryResponse } from "./types.js";

// Same-origin by default; "?api=http://host:port" points elsewhere.
const apiBase =
  typeof location !== "undefined"
    ? new URLSearchParams(location.search).get("api") ?? ""
    : "";
const client = new NarqlClient(apiBase);

let clauses: ClauseDraft[] = [{ subject: null, predicate: null, object: null }];
let lastResponse: QueryResponse | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function termLabel(term: TermDraft | null): string {
  if (!term) return "";
  if (term.kind === "variable") return `?${term.name}(${term.type})`;
  if (term.kind === "literal") return `"${term.value}"`;
  return term.name || term.id;
}

function termEditor(
  clauseIndex: number,
  slot: "subject" | "object",
  term: TermDraft | null,
): HTMLElement {
  const wrap = el("div", { class: "term" });
  const input = el("input", {
    type: "text",
    placeholder: slot,
    value: termLabel(term),
    autocomplete: "off",
  });
  const dropdown = el("div", { class: "dropdown", hidden: "" });

  const commit = (next: TermDraft | null) => {
    const clause = clauses[clauseIndex];
    if (clause) {
      clause[slot] = next;
    }
    render();
  };

  input.addEventListener("input", async () => {
    const text = input.value.trim();
    const variableMatch = /^\?([A-Za-z_][A-Za-z0-9_]*)\(([A-Za-z_][A-Za-z0-9_]*)\)$/.exec(text);
    if (variableMatch) {
      const clause = clauses[clauseIndex];
      if (clause) clause[slot] = { kind: "variable", name: variableMatch[1]!, type: variableMatch[2]! };
      dropdown.hidden = true;
      return;
    }
    if (slot === "object" && text.startsWith('"') && text.endsWith('"') && text.length >= 2) {
      const clause = clauses[clauseIndex];
      if (clause) clause[slot] = { kind: "literal", value: text.slice(1, -1) };
      dropdown.hidden = true;
      return;
    }
    if (!text) {
      const clause = clauses[clauseIndex];
      if (clause) clause[slot] = null;
      dropdown.hidden = true;
      return;
    }
    try {
      const entries = await client.searchVocabulary(text);
      dropdown.replaceChildren(
        ...entries.slice(0, 8).map((entry) =>
          el(
            "div",
            { class: "option" },
            `${entry.name} — ${entry.type}`,
          ),
        ),
      );
      entries.slice(0, 8).forEach((entry, i) => {
        dropdown.children[i]?.addEventListener("mousedown", () =>
          commit({ kind: "entity", id: entry.id, name: entry.name }),
        );
      });
      dropdown.hidden = entries.length === 0;
    } catch {
      dropdown.hidden = true;
    }
  });
  input.addEventListener("blur", () => setTimeout(() => (dropdown.hidden = true), 150));

  wrap.append(input, dropdown);
  return wrap;
}

function clauseRow(clause: ClauseDraft, index: number): HTMLElement {
  const predicate = el("input", {
    type: "text",
    placeholder: "predicate",
    value: clause.predicate ?? "",
  });
  predicate.addEventListener("change", () => {
    const target = clauses[index];
    if (target) target.predicate = predicate.value.trim() || null;
  });
  const remove = el("button", { type: "button" }, "×");
  remove.addEventListener("click", () => {
    clauses.splice(index, 1);
    if (clauses.length === 0) {
      clauses.push({ subject: null, predicate: null, object: null });
    }
    render();
  });
  return el(
    "div",
    { class: "clause" },
    termEditor(index, "subject", clause.subject),
    predicate,
    termEditor(index, "object", clause.object),
    remove,
  );
}

function renderErrors(messages: string[]): void {
  byId("errors").replaceChildren(...messages.map((m) => el("div", { class: "error" }, m)));
}

async function openProvenance(entry: AggregatedEntry): Promise<void> {
  const drawer = byId("drawer");
  drawer.replaceChildren(el("h3", {}, `Provenance for ${entry.display}`));
  const byDoc = new Map<string, (string | null)[]>();
  for (const ref of entry.provenance_sample) {
    const bucket = byDoc.get(ref.doc) ?? [];
    bucket.push(ref.sentence);
    byDoc.set(ref.doc, bucket);
  }
  for (const [docId, sentences] of byDoc) {
    try {
      const doc = await client.getDocument(docId);
      const list = el("ul", {});
      for (const sid of sentences) {
        const text = sid === null ? "(no sentence)" : doc.sentences[sid] ?? "(no sentence)";
        list.append(el("li", {}, text));
      }
      drawer.append(
        el("h4", {}, el("a", { href: `/documents/${encodeURIComponent(docId)}` }, doc.title)),
        list,
      );
    } catch {
      drawer.append(el("p", { class: "error" }, `document ${docId} is no longer available; reload`));
    }
  }
  drawer.hidden = false;
}

function resultRow(entry: AggregatedEntry): HTMLElement {
  const row = el("tr", {});
  const label = el("td", {}, entry.display);
  const actions = el("td", {});
  for (const [variable, value] of Object.entries(entry.substitution)) {
    if ("literal" in value) {
      const copy = el("button", { type: "button", title: "copy value" }, `copy ${value.literal}`);
      copy.addEventListener("click", () => void navigator.clipboard?.writeText(value.literal));
      actions.append(copy);
    } else {
      const refine = el("button", { type: "button" }, `set ${variable} = ${value.name}`);
      refine.addEventListener("click", () => {
        const outcome = refineFromResult(clauses, variable, value);
        if (outcome.kind === "replaced") {
          clauses = outcome.clauses;
          render();
        }
      });
      actions.append(refine);
    }
  }
  const drawerButton = el("button", { type: "button" }, "sentences");
  drawerButton.addEventListener("click", () => void openProvenance(entry));
  actions.append(drawerButton);
  row.append(label, actions);
  return row;
}

function renderResults(response: QueryResponse): void {
  lastResponse = response;
  const table = byId("results");
  byId("stats").textContent =
    response.ask !== undefined
      ? `answer: ${response.ask}`
      : `${response.total} substitutions, ${response.stats.rows} rows`;
  if (response.ask !== undefined || !response.results) {
    table.replaceChildren();
    return;
  }
  table.replaceChildren(...response.results.map(resultRow));
}

async function run(): Promise<void> {
  const errors = validateDrafts(clauses);
  if (errors.length > 0) {
    renderErrors(errors.map((e) => `clause ${e.clause + 1}: ${e.code} — ${e.message}`));
    return;
  }
  renderErrors([]);
  const policy = (byId("policy") as HTMLSelectElement).value as Policy;
  const threshold = parseFloat((byId("threshold") as HTMLInputElement).value || "0.5");
  try {
    const response = await client.postQuery({
      query: serializeQuery(clauses),
      policy,
      ...(policy === "SIMILARITY" ? { similarity_threshold: threshold } : {}),
    });
    renderResults(response);
  } catch (err) {
    if (err instanceof QueryAborted) {
      return;
    }
    if (err instanceof ApiFailure) {
      const detail = err.body.error;
      const where = detail.position !== undefined ? ` at ${detail.position}` : "";
      const candidates = detail.candidates ? ` (candidates: ${detail.candidates.join(", ")})` : "";
      renderErrors([`${detail.code}${where}: ${detail.message}${candidates}`]);
      return;
    }
    renderErrors([String(err)]);
  }
}

function render(): void {
  const builder = byId("builder");
  builder.replaceChildren(...clauses.map((clause, i) => clauseRow(clause, i)));
  const variables = [...draftVariables(clauses).keys()];
  byId("variables").textContent = variables.length
    ? `variables: ${variables.join(", ")}`
    : "no variables (existence check)";
}

export function start(): void {
  byId("add-clause").addEventListener("click", () => {
    clauses.push({ subject: null, predicate: null, object: null });
    render();
  });
  byId("run").addEventListener("click", () => void run());
  byId("policy").addEventListener("change", () => {
    (byId("threshold") as HTMLInputElement).hidden =
      (byId("policy") as HTMLSelectElement).value !== "SIMILARITY";
    // Policy toggles re-query in place so the result deltas are visible.
    if (lastResponse) void run();
  });
  render();
}

if (typeof document !== "undefined" && document.getElementById("builder")) {
  start();
}
