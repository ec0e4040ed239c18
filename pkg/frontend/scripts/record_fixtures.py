#!/usr/bin/env python3
"""Record draft states and live service responses for the frontend tests.

Runs the real HTTP app over the demo corpus via the in-process test client
and writes frontend/tests/fixtures/recorded.json. Re-run after changing the
demo corpus, the grammar, or the response schema:

    python frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from narql.service import create_app
from narql.testkit import load_fixture

UNSAFE_BARE = re.compile(r'[,()"?]')


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_term(term: dict) -> str:
    # Mirrors frontend/src/grammar.ts serializeTerm.
    kind = term["kind"]
    if kind == "variable":
        return f"?{term['name']}({term['type']})"
    if kind == "literal":
        return quote(term["value"])
    surface = term["name"] if term["name"].strip() else term["id"]
    if UNSAFE_BARE.search(surface) or surface != surface.strip():
        return quote(surface)
    return surface


def serialize_query(clauses: list[dict]) -> str:
    return " AND ".join(
        f"({serialize_term(c['subject'])}, {c['predicate']}, {serialize_term(c['object'])})"
        for c in clauses
    )


def entity(eid: str, name: str) -> dict:
    return {"kind": "entity", "id": eid, "name": name}


def variable(name: str, vtype: str) -> dict:
    return {"kind": "variable", "name": name, "type": vtype}


def literal(value: str) -> dict:
    return {"kind": "literal", "value": value}


def clause(subject: dict, predicate: str, obj: dict) -> dict:
    return {"subject": subject, "predicate": predicate, "object": obj}


COVID = entity("dz:covid19", "Covid 19")
LONG_COVID = entity("dz:long_covid", "post-acute COVID-19 syndrome")
HUMANS = entity("sp:humans", "Humans")
CVST = entity("dz:cvst", "CVST")
CHADOX = entity("vx:chadox1", "ChAdOx1 nCov-19")
MRNA = entity("vx:mrna1273", "mRNA-1273")
REMDESIVIR = entity("dr:remdesivir", "Remdesivir")
DEXAMETHASONE = entity("dr:dexamethasone", "Dexamethasone")
HCQ = entity("dr:hydroxychloroquine", "Hydroxychloroquine")
FATIGUE = entity("dz:fatigue", "Fatigue")

DRAFTS: list[dict] = [
    {"clauses": [clause(COVID, "associated", variable("X", "Vaccine"))], "policy": "DOCUMENT"},
    {"clauses": [clause(COVID, "associated", variable("X", "Vaccine"))], "policy": "GLOBAL"},
    {"clauses": [clause(COVID, "associated", variable("X", "Vaccine"))], "policy": "GROUP"},
    {
        "clauses": [clause(COVID, "associated", variable("X", "Vaccine"))],
        "policy": "SIMILARITY",
        "similarity_threshold": 0.4,
    },
    {"clauses": [clause(LONG_COVID, "associated", variable("X", "Disease"))], "policy": "DOCUMENT"},
    {
        "clauses": [
            clause(LONG_COVID, "associated", HUMANS),
            clause(HUMANS, "associated", variable("X", "Disease")),
        ],
        "policy": "DOCUMENT",
    },
    {"clauses": [clause(variable("D", "Drug"), "treats", COVID)], "policy": "DOCUMENT"},
    {"clauses": [clause(HUMANS, "associated", variable("X", "Disease"))], "policy": "DOCUMENT"},
    {"clauses": [clause(CHADOX, "observed condition", variable("X", "Disease"))], "policy": "DOCUMENT"},
    {
        "clauses": [
            clause(variable("X", "Vaccine"), "observed condition", CVST),
            clause(CVST, "risk after vaccination", variable("Y", "Literal")),
        ],
        "policy": "GLOBAL",
    },
    {
        "clauses": [
            clause(variable("X", "Vaccine"), "observed condition", CVST),
            clause(CVST, "risk after vaccination", variable("Y", "Literal")),
        ],
        "policy": "GROUP",
    },
    {"clauses": [clause(CVST, "risk after vaccination", literal("4.01"))], "policy": "GROUP"},
    {"clauses": [clause(REMDESIVIR, "treats", COVID)], "policy": "DOCUMENT"},
    {"clauses": [clause(DEXAMETHASONE, "treats", FATIGUE)], "policy": "DOCUMENT"},
    {
        "clauses": [
            clause(COVID, "associated", variable("X", "Vaccine")),
            clause(variable("X", "Vaccine"), "observed condition", variable("C", "Disease")),
        ],
        "policy": "DOCUMENT",
    },
    {
        "clauses": [
            clause(COVID, "associated", variable("X", "Vaccine")),
            clause(variable("X", "Vaccine"), "observed condition", variable("C", "Disease")),
        ],
        "policy": "SIMILARITY",
        "similarity_threshold": 1.0,
    },
    {"clauses": [clause(HUMANS, "vaccinated by", variable("X", "Vaccine"))], "policy": "DOCUMENT"},
    {"clauses": [clause(MRNA, "observed condition", variable("X", "Disease"))], "policy": "DOCUMENT"},
    {"clauses": [clause(COVID, "associated", variable("X", "Disease"))], "policy": "GLOBAL"},
    {"clauses": [clause(HCQ, "treats", variable("X", "Disease"))], "policy": "GLOBAL"},
]

REFINEMENTS: list[dict] = [
    {
        "base": {
            "clauses": [
                clause(COVID, "associated", variable("X", "Vaccine")),
                clause(variable("X", "Vaccine"), "observed condition", variable("C", "Disease")),
            ],
            "policy": "DOCUMENT",
        },
        "pick": {"variable": "X", "value": {"entity": "vx:chadox1", "name": "ChAdOx1 nCov-19"}},
    },
    {
        "base": {
            "clauses": [
                clause(variable("X", "Vaccine"), "observed condition", CVST),
                clause(CVST, "risk after vaccination", variable("Y", "Literal")),
            ],
            "policy": "GLOBAL",
        },
        "pick": {"variable": "X", "value": {"entity": "vx:bnt162", "name": "BNT162"}},
    },
    {
        "base": {
            "clauses": [
                clause(HUMANS, "associated", variable("X", "Disease")),
                clause(variable("D", "Drug"), "treats", variable("X", "Disease")),
            ],
            "policy": "GLOBAL",
        },
        "pick": {"variable": "X", "value": {"entity": "dz:covid19", "name": "Covid 19"}},
    },
    {
        "base": {
            "clauses": [
                clause(variable("X", "Vaccine"), "observed condition", CVST),
                clause(CVST, "risk after vaccination", variable("Y", "Literal")),
            ],
            "policy": "GROUP",
        },
        "pick": {"variable": "Y", "value": {"literal": "4.01"}},
    },
]


def refine_clauses(clauses: list[dict], variable_name: str, value: dict) -> list[dict]:
    replacement = entity(value["entity"], value["name"])

    def swap(term: dict) -> dict:
        if term["kind"] == "variable" and term["name"] == variable_name:
            return dict(replacement)
        return term

    return [
        {"subject": swap(c["subject"]), "predicate": c["predicate"], "object": swap(c["object"])}
        for c in clauses
    ]


def main() -> int:
    client = TestClient(create_app(store=load_fixture("demo_covid")))

    def post(draft: dict) -> dict:
        request: dict = {"query": serialize_query(draft["clauses"]), "policy": draft["policy"]}
        if "similarity_threshold" in draft:
            request["similarity_threshold"] = draft["similarity_threshold"]
        response = client.post("/query", json=request)
        assert response.status_code == 200, (request, response.text)
        return {"request": request, "response": response.json()}

    drafts = []
    for draft in DRAFTS:
        recorded = post(draft)
        drafts.append({**draft, **recorded})

    refinements = []
    for spec in REFINEMENTS:
        base_recorded = post(spec["base"])
        entry: dict = {"base": {**spec["base"], **base_recorded}, "pick": spec["pick"]}
        if "literal" in spec["pick"]["value"]:
            entry["copy_only"] = True
        else:
            refined = {
                "clauses": refine_clauses(
                    spec["base"]["clauses"], spec["pick"]["variable"], spec["pick"]["value"]
                ),
                "policy": spec["base"]["policy"],
            }
            entry["refined"] = {**refined, **post(refined)}
        refinements.append(entry)

    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "recorded.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({"drafts": drafts, "refinements": refinements}, indent=2) + "\n")
    print(f"wrote {out} ({len(drafts)} drafts, {len(refinements)} refinements)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
