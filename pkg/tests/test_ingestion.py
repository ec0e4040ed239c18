"""File-format contract, dedup, surface resolution, indexes, round trips."""

import json

import pytest

from narql.ingestion import (
    DuplicateDocumentId,
    MalformedRecord,
    export_lines,
    ingest,
    load_vocabulary,
    resolve_surface,
)
from narql.model import Literal, value_key
from narql.testkit import GenParams, gen_random

MINI_VOCAB = load_vocabulary(
    json.dumps(
        {
            "entities": [
                {"id": "e1", "name": "Alpha", "type": "T", "synonyms": ["first"]},
                {"id": "e2", "name": "Beta", "type": "T", "synonyms": []},
            ],
            "predicates": ["p"],
        }
    )
)


def doc_line(**overrides):
    doc = {
        "id": "d1",
        "title": "t",
        "source": "s",
        "authors": [],
        "date": "2021-01-01",
        "keywords": [],
        "sentences": {"s1": "text."},
        "statements": [{"subject": "e1", "predicate": "p", "object": "e2", "sentence": "s1"}],
    }
    doc.update(overrides)
    return json.dumps(doc)


class TestIngest:
    def test_identical_statement_lines_collapse(self):
        line = doc_line(
            statements=[
                {"subject": "e1", "predicate": "p", "object": "e2", "sentence": "s1"},
                {"subject": "e1", "predicate": "p", "object": "e2", "sentence": "s1"},
            ]
        )
        result = ingest([line], MINI_VOCAB)
        assert result.store.statement_count() == 1

    def test_unknown_sentence_is_malformed(self):
        line = doc_line(
            statements=[{"subject": "e1", "predicate": "p", "object": "e2", "sentence": "s9"}]
        )
        result = ingest([line], MINI_VOCAB)
        assert result.store.documents == {}
        assert len(result.malformed) == 1
        assert "s9" in result.malformed[0].reason

    def test_obama_fixture_counts(self, obama_store):
        assert obama_store.statement_count() == 4
        groups = {st.group for st in obama_store.statements()}
        assert len(groups) == 2

    def test_duplicate_document_id_is_hard_error(self):
        with pytest.raises(DuplicateDocumentId):
            ingest([doc_line(), doc_line()], MINI_VOCAB)

    def test_unknown_top_level_key_rejected(self):
        line = doc_line()
        obj = json.loads(line)
        obj["extra"] = 1
        result = ingest([json.dumps(obj)], MINI_VOCAB)
        assert result.malformed and "extra" in result.malformed[0].reason

    def test_unknown_statement_key_rejected(self):
        line = doc_line(
            statements=[{"subject": "e1", "predicate": "p", "object": "e2", "weight": 2}]
        )
        result = ingest([line], MINI_VOCAB)
        assert result.malformed

    def test_bad_date_shape_rejected(self):
        result = ingest([doc_line(date="Jan 1, 2021")], MINI_VOCAB)
        assert result.malformed

    def test_malformed_line_number_reported(self):
        lines = [doc_line(), "not json", doc_line(id="d2")]
        result = ingest(lines, MINI_VOCAB)
        assert len(result.store.documents) == 2
        assert result.malformed[0].line == 2

    def test_statement_without_sentence_allowed(self):
        line = doc_line(statements=[{"subject": "e1", "predicate": "p", "object": "e2"}])
        result = ingest([line], MINI_VOCAB)
        (st,) = list(result.store.statements())
        assert st.sentence is None

    def test_literal_object_trimmed(self):
        line = doc_line(
            statements=[{"subject": "e1", "predicate": "p", "object": {"literal": " 4.01 "}}]
        )
        (st,) = list(ingest([line], MINI_VOCAB).store.statements())
        assert st.object == Literal("4.01")

    def test_unlinkable_entities_flagged(self):
        line = doc_line(
            statements=[{"subject": "e1", "predicate": "p", "object": "ghost", "sentence": "s1"}]
        )
        store = ingest([line], MINI_VOCAB).store
        assert store.unlinkable == {"ghost"}
        assert store.statement_count() == 1

    def test_blank_lines_skipped(self):
        result = ingest([doc_line(), "", "   "], MINI_VOCAB)
        assert len(result.store.documents) == 1
        assert not result.malformed


class TestVocabulary:
    def test_resolve_by_synonym_case_insensitive(self, cvst_store):
        vocab = cvst_store.vocabulary
        assert resolve_surface("CVST", vocab) == ["dz:cvst"]
        assert resolve_surface("cerebral venous sinus thrombosis", vocab) == ["dz:cvst"]

    def test_unknown_surface_is_empty(self, cvst_store):
        assert resolve_surface("zzz-unknown", cvst_store.vocabulary) == []

    def test_shared_surface_returns_both(self):
        # Oracle: a direct scan of the declared names/synonyms.
        spec = {
            "entities": [
                {"id": "e1", "name": "Alpha", "type": "T", "synonyms": ["shared"]},
                {"id": "e2", "name": "Beta", "type": "T", "synonyms": ["Shared"]},
            ],
            "predicates": ["p"],
        }
        vocab = load_vocabulary(json.dumps(spec))
        expected = sorted(
            e["id"]
            for e in spec["entities"]
            if any(s.casefold() == "shared" for s in (e["name"], *e["synonyms"]))
        )
        assert resolve_surface("shared", vocab) == expected == ["e1", "e2"]

    def test_unknown_vocab_key_rejected(self):
        with pytest.raises(MalformedRecord):
            load_vocabulary(json.dumps({"entities": [], "predicates": [], "notes": []}))

    def test_reserved_literal_type_rejected(self):
        with pytest.raises(MalformedRecord):
            load_vocabulary(
                json.dumps(
                    {
                        "entities": [{"id": "e", "name": "E", "type": "Literal", "synonyms": []}],
                        "predicates": ["p"],
                    }
                )
            )

    def test_duplicate_entity_id_rejected(self):
        with pytest.raises(MalformedRecord):
            load_vocabulary(
                json.dumps(
                    {
                        "entities": [
                            {"id": "e", "name": "A", "type": "T", "synonyms": []},
                            {"id": "e", "name": "B", "type": "T", "synonyms": []},
                        ],
                        "predicates": ["p"],
                    }
                )
            )


class TestRoundTripAndIndexes:
    def test_fixture_round_trips(self, obama_store, cvst_store, smith_store, demo_store):
        for store in (obama_store, cvst_store, smith_store, demo_store):
            again = ingest(export_lines(store), store.vocabulary).store
            assert again == store

    def test_random_round_trips(self):
        for seed in range(10):
            store, _ = gen_random(seed, GenParams(docs=6, statements=40))
            again = ingest(export_lines(store), store.vocabulary).store
            assert again == store

    def test_same_seed_same_bytes(self):
        a, _ = gen_random(7)
        b, _ = gen_random(7)
        assert "\n".join(export_lines(a)) == "\n".join(export_lines(b))

    def test_index_completeness(self):
        # Every statement appears in each index exactly where it should,
        # and the indexes contain nothing else.
        for seed in range(6):
            store, _ = gen_random(seed, GenParams(docs=5, statements=35))
            statements = list(store.statements())
            by_pred = {}
            by_sp = {}
            by_po = {}
            for st in statements:
                by_pred.setdefault(st.predicate, []).append(st)
                by_sp.setdefault((st.subject, st.predicate), []).append(st)
                by_po.setdefault((st.predicate, value_key(st.object)), []).append(st)
            assert {k: sorted(v, key=lambda s: s.key()) for k, v in by_pred.items()} == {
                k: sorted(v, key=lambda s: s.key()) for k, v in store.by_predicate.items()
            }
            assert {k: sorted(v, key=lambda s: s.key()) for k, v in by_sp.items()} == {
                k: sorted(v, key=lambda s: s.key()) for k, v in store.by_subject_predicate.items()
            }
            assert {k: sorted(v, key=lambda s: s.key()) for k, v in by_po.items()} == {
                k: sorted(v, key=lambda s: s.key()) for k, v in store.by_predicate_object.items()
            }

    def test_entities_by_type_index(self, demo_store):
        for etype, refs in demo_store.entities_by_type.items():
            for ref in refs:
                assert demo_store.vocabulary.entity_type(ref) == etype
        listed = set().union(*demo_store.entities_by_type.values())
        linkable = {e for e in demo_store.entity_ids if e not in demo_store.unlinkable}
        assert listed == linkable
