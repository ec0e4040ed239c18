"""Context-compatibility policies, strictness chain, similarity rules."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narql.context import compatible, keyset, keyword_jaccard
from narql.engine import edge_bindings
from narql.ingestion import ingest, load_vocabulary
from narql.model import DOCUMENT, GLOBAL, GROUP, similarity
from narql.parser import parse
from narql.testkit import GenParams, gen_random


def bindings_for(store, text):
    """One edge binding per clause of a fully concrete query (first match)."""
    query = parse(text, store.vocabulary, known_ids=store.entity_ids)
    return [edge_bindings(c, store, i)[0] for i, c in enumerate(query.clauses)]


class TestPolicyExamples:
    def test_cvst_same_group_compatible(self, cvst_store):
        pair = bindings_for(
            cvst_store,
            '(ChAdOx1 nCov-19, observed condition, CVST) AND (CVST, risk after vaccination, "4.01")',
        )
        assert {b.statement.raw_group() for b in pair} == {"g1"}
        assert compatible(pair, GROUP, cvst_store)

    def test_cvst_cross_group_incompatible(self, cvst_store):
        pair = bindings_for(
            cvst_store,
            '(BNT162, observed condition, CVST) AND (CVST, risk after vaccination, "4.01")',
        )
        assert {b.statement.raw_group() for b in pair} == {"g1", "g2"}
        assert not compatible(pair, GROUP, cvst_store)
        # same document, so DOCUMENT still fuses them
        assert compatible(pair, DOCUMENT, cvst_store)

    def test_single_binding_compatible_under_every_policy(self, cvst_store):
        (binding,) = bindings_for(cvst_store, "(ChAdOx1 nCov-19, observed condition, CVST)")
        for policy in (GLOBAL, DOCUMENT, GROUP, similarity(0.0), similarity(1.0)):
            assert compatible([binding], policy, cvst_store)

    def test_empty_bindings_rejected(self, cvst_store):
        with pytest.raises(ValueError):
            compatible([], GLOBAL, cvst_store)


class TestStrictnessChain:
    def test_group_implies_document_implies_global(self):
        for seed in range(10):
            store, queries = gen_random(seed, GenParams(docs=5, statements=35, queries=3))
            pool = []
            for query in queries:
                for i, clause in enumerate(query.clauses):
                    pool.extend(edge_bindings(clause, store, i)[:3])
            for size in (1, 2, 3):
                for offset in range(0, max(len(pool) - size, 0), size):
                    chunk = pool[offset : offset + size]
                    if compatible(chunk, GROUP, store):
                        assert compatible(chunk, DOCUMENT, store)
                    if compatible(chunk, DOCUMENT, store):
                        assert compatible(chunk, GLOBAL, store)

    def test_similarity_zero_superset_of_document(self):
        for seed in range(6):
            store, queries = gen_random(seed, GenParams(docs=4, statements=25, queries=2))
            pool = []
            for query in queries:
                for i, clause in enumerate(query.clauses):
                    pool.extend(edge_bindings(clause, store, i)[:2])
            for offset in range(0, max(len(pool) - 2, 0), 2):
                chunk = pool[offset : offset + 2]
                if compatible(chunk, DOCUMENT, store):
                    assert compatible(chunk, similarity(0.0), store)


VOCAB = load_vocabulary(
    json.dumps(
        {
            "entities": [
                {"id": "e1", "name": "Alpha", "type": "T", "synonyms": []},
                {"id": "e2", "name": "Beta", "type": "T", "synonyms": []},
            ],
            "predicates": ["p"],
        }
    )
)


def two_doc_store(keywords_a, keywords_b, authors_a=(), authors_b=()):
    lines = []
    for doc_id, keywords, authors in (
        ("da", keywords_a, authors_a),
        ("db", keywords_b, authors_b),
    ):
        lines.append(
            json.dumps(
                {
                    "id": doc_id,
                    "title": doc_id,
                    "source": "x",
                    "authors": list(authors),
                    "date": "2021-01-01",
                    "keywords": list(keywords),
                    "sentences": {"s1": "t"},
                    "statements": [
                        {"subject": "e1", "predicate": "p", "object": "e2", "sentence": "s1"}
                    ],
                }
            )
        )
    return ingest(lines, VOCAB).store


def cross_doc_pair(store):
    query = parse("(Alpha, p, Beta)", store.vocabulary)
    all_bindings = edge_bindings(query.clauses[0], store, 0)
    assert len(all_bindings) == 2
    return all_bindings


class TestSimilarity:
    def test_jaccard_basics(self):
        assert keyword_jaccard([], []) == 1.0
        assert keyword_jaccard(["a"], []) == 0.0
        assert keyword_jaccard(["a", "b"], ["b", "c"]) == pytest.approx(1 / 3)
        assert keyword_jaccard(["a", "b"], ["a", "b"]) == 1.0

    def test_threshold_one_needs_identical_keywords_or_author(self):
        store = two_doc_store(["x", "y"], ["x"])
        pair = cross_doc_pair(store)
        assert not compatible(pair, similarity(1.0), store)

        store = two_doc_store(["x", "y"], ["x", "y"])
        assert compatible(cross_doc_pair(store), similarity(1.0), store)

        store = two_doc_store(["x"], ["z"], authors_a=["ann"], authors_b=["ann"])
        assert compatible(cross_doc_pair(store), similarity(1.0), store)

    def test_threshold_zero_accepts_cross_document(self):
        store = two_doc_store(["x"], ["z"])
        assert compatible(cross_doc_pair(store), similarity(0.0), store)
        assert not compatible(cross_doc_pair(store), DOCUMENT, store)

    def test_midpoint_threshold(self):
        store = two_doc_store(["x", "y"], ["x", "y", "z"])  # jaccard 2/3
        assert compatible(cross_doc_pair(store), similarity(0.5), store)
        assert not compatible(cross_doc_pair(store), similarity(0.7), store)


class TestInvariance:
    @given(st.permutations(range(4)))
    @settings(max_examples=30, deadline=None)
    def test_permutation_invariant(self, order):
        store, queries = gen_random(3, GenParams(docs=4, statements=30, queries=4))
        pool = []
        for query in queries:
            for i, clause in enumerate(query.clauses):
                pool.extend(edge_bindings(clause, store, i))
        chunk = pool[:4]
        if len(chunk) < 4:
            return
        shuffled = [chunk[i] for i in order]
        for policy in (GLOBAL, DOCUMENT, GROUP, similarity(0.4)):
            assert compatible(chunk, policy, store) == compatible(shuffled, policy, store)

    def test_keyset_contents(self, cvst_store):
        pair = bindings_for(
            cvst_store,
            '(ChAdOx1 nCov-19, observed condition, CVST) AND (CVST, risk after vaccination, "3.58")',
        )
        keys = keyset(pair)
        assert keys.docs == {"trial-cvst-risk"}
        assert len(keys.groups) == 2
