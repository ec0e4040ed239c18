"""Query language: grammar, resolution rules, errors, canonical rendering."""

import json

import pytest

from narql.ingestion import load_vocabulary
from narql.model import (
    DisconnectedQuery,
    EntityTerm,
    LiteralTerm,
    VariableTerm,
)
from narql.parser import (
    AmbiguousEntity,
    QueryParseError,
    QuerySyntaxError,
    UnknownEntity,
    UnknownPredicate,
    parse,
    render,
)
from narql.testkit import GenParams, gen_random


class TestGrammar:
    def test_single_clause_variable(self, demo_store):
        q = parse("(Covid 19, associated, ?X(Vaccine))", demo_store.vocabulary)
        assert len(q.clauses) == 1
        clause = q.clauses[0]
        assert clause.subject == EntityTerm("dz:covid19")
        assert clause.predicate == "associated"
        assert clause.object == VariableTerm("X", "Vaccine")

    def test_two_clause_shared_entity(self, demo_store):
        q = parse(
            "(post-acute COVID-19 syndrome, associated, Human) AND (Human, associated, ?X(Disease))",
            demo_store.vocabulary,
        )
        assert len(q.clauses) == 2
        assert q.clauses[0].object == EntityTerm("sp:humans")
        assert q.clauses[1].subject == EntityTerm("sp:humans")

    def test_missing_paren_is_syntax_error(self, demo_store):
        with pytest.raises(QuerySyntaxError):
            parse("(A, p, ?X(T)", demo_store.vocabulary)

    def test_truncated_clause_is_syntax_error(self, demo_store):
        with pytest.raises(QuerySyntaxError):
            parse("(A, p", demo_store.vocabulary)

    def test_and_is_case_sensitive(self, demo_store):
        with pytest.raises(QuerySyntaxError):
            parse(
                "(Covid 19, associated, Fatigue) and (Covid 19, associated, Headache)",
                demo_store.vocabulary,
            )

    def test_and_needs_surrounding_whitespace(self, demo_store):
        with pytest.raises(QuerySyntaxError):
            parse(
                "(Covid 19, associated, Fatigue)AND (Covid 19, associated, Headache)",
                demo_store.vocabulary,
            )

    def test_bare_text_with_spaces_and_hyphens(self, demo_store):
        q = parse("(post-acute COVID-19 syndrome, associated, ?X(Disease))", demo_store.vocabulary)
        assert q.clauses[0].subject == EntityTerm("dz:long_covid")

    def test_whitespace_insensitive(self, demo_store):
        a = parse("(Covid 19,associated,?X(Vaccine))", demo_store.vocabulary)
        b = parse("  ( Covid 19 , associated , ?X( Vaccine ) )  ", demo_store.vocabulary)
        assert a == b

    def test_variable_in_predicate_position_rejected(self, demo_store):
        with pytest.raises(QuerySyntaxError):
            parse("(Covid 19, ?P(T), Fatigue)", demo_store.vocabulary)

    def test_every_error_carries_position(self, demo_store):
        bad = [
            "(A, p",
            "(zzz, associated, Fatigue)",
            "(Covid 19, zzz, Fatigue)",
            "(Covid 19, associated, zzz)",
            "()",
        ]
        for text in bad:
            with pytest.raises(QueryParseError) as err:
                parse(text, demo_store.vocabulary)
            assert isinstance(err.value.position, int)
            assert 0 <= err.value.position <= len(text)


class TestResolution:
    def test_synonym_resolution(self, demo_store):
        q = parse("(Long Covid, associated, ?X(Disease))", demo_store.vocabulary)
        assert q.clauses[0].subject == EntityTerm("dz:long_covid")

    def test_unknown_bare_entity(self, demo_store):
        with pytest.raises(UnknownEntity):
            parse("(Covid 19, associated, zzz-unknown)", demo_store.vocabulary)

    def test_unknown_predicate(self, demo_store):
        with pytest.raises(UnknownPredicate):
            parse("(Covid 19, causes, Fatigue)", demo_store.vocabulary)

    def test_quoted_object_unresolved_becomes_literal(self, cvst_store):
        q = parse('(CVST, risk after vaccination, "4.01")', cvst_store.vocabulary)
        assert q.clauses[0].object == LiteralTerm("4.01")

    def test_quoted_object_resolving_stays_entity(self, cvst_store):
        q = parse('(?X(Vaccine), observed condition, "CVST")', cvst_store.vocabulary)
        assert q.clauses[0].object == EntityTerm("dz:cvst")

    def test_ambiguous_entity_lists_candidates(self):
        vocab = load_vocabulary(
            json.dumps(
                {
                    "entities": [
                        {"id": "e1", "name": "Alpha", "type": "T", "synonyms": ["twin"]},
                        {"id": "e2", "name": "Beta", "type": "T", "synonyms": ["twin"]},
                    ],
                    "predicates": ["p"],
                }
            )
        )
        with pytest.raises(AmbiguousEntity) as err:
            parse("(twin, p, Alpha)", vocab)
        assert err.value.candidates == ["e1", "e2"]

    def test_exact_id_escape_hatch_for_unlinkable(self, demo_store):
        q = parse(
            "(Human, associated, x:unregistered_symptom)",
            demo_store.vocabulary,
            known_ids=demo_store.entity_ids,
        )
        assert q.clauses[0].object == EntityTerm("x:unregistered_symptom")

    def test_exact_id_without_known_ids_fails(self, demo_store):
        with pytest.raises(UnknownEntity):
            parse("(Human, associated, x:unregistered_symptom)", demo_store.vocabulary)

    def test_vocab_id_always_resolvable(self, demo_store):
        q = parse("(dz:covid19, associated, ?X(Vaccine))", demo_store.vocabulary)
        assert q.clauses[0].subject == EntityTerm("dz:covid19")

    def test_disconnected_query_rejected(self, demo_store):
        with pytest.raises(DisconnectedQuery):
            parse(
                "(Covid 19, associated, Fatigue) AND (Remdesivir, treats, Headache)",
                demo_store.vocabulary,
            )

    def test_quoted_predicate(self, demo_store):
        q = parse('(Covid 19, "observed condition", Fatigue)', demo_store.vocabulary)
        assert q.clauses[0].predicate == "observed condition"

    def test_quoted_subject_resolves_as_surface(self, demo_store):
        q = parse('("Covid 19", associated, Fatigue)', demo_store.vocabulary)
        assert q.clauses[0].subject == EntityTerm("dz:covid19")


class TestRender:
    def test_two_clause_query_round_trips(self, demo_store):
        text = "(post-acute COVID-19 syndrome, associated, Humans) AND (Humans, associated, ?X(Disease))"
        q = parse(text, demo_store.vocabulary)
        rendered = render(q, demo_store.vocabulary)
        assert parse(rendered, demo_store.vocabulary) == q

    def test_literal_renders_quoted(self, cvst_store):
        q = parse('(CVST, risk after vaccination, "4.01")', cvst_store.vocabulary)
        assert render(q, cvst_store.vocabulary) == '(CVST, risk after vaccination, "4.01")'

    def test_random_queries_round_trip(self):
        for seed in range(20):
            store, queries = gen_random(seed, GenParams(docs=5, statements=30, queries=4))
            for q in queries:
                rendered = render(q, store.vocabulary)
                assert parse(rendered, store.vocabulary, known_ids=store.entity_ids) == q
