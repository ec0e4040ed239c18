"""Extraction-file parsing, vocabulary handling, and the indexed statement store.

The document file is UTF-8 JSON-lines, one document per line; the vocabulary
file is a single JSON object. Both schemas are strict: unknown keys are
rejected as malformed rather than ignored.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .model import (
    DEFAULT_GROUP,
    LITERAL_TYPE,
    DocumentGraph,
    Literal,
    Statement,
    group_id,
    value_key,
)

_DATE_SHAPE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

_DOC_KEYS = {"id", "title", "source", "authors", "date", "keywords", "sentences", "statements"}
_STMT_KEYS = {"subject", "predicate", "object", "sentence", "group"}
_VOCAB_KEYS = {"entities", "predicates"}
_ENTITY_KEYS = {"id", "name", "type", "synonyms"}

INDEX_FORMAT = "narql-index"
INDEX_VERSION = 1


class MalformedRecord(Exception):
    """A document line (or the vocabulary file) violating the file contract."""

    def __init__(self, line: int, reason: str) -> None:
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class DuplicateDocumentId(Exception):
    def __init__(self, doc_id: str) -> None:
        self.doc_id = doc_id
        super().__init__(f"duplicate document id {doc_id!r}")


class IndexFormatError(Exception):
    """Index directory missing, unreadable, or of a mismatched version."""


@dataclass(frozen=True)
class VocabEntity:
    id: str
    name: str
    type: str
    synonyms: tuple[str, ...]


@dataclass(frozen=True)
class Vocabulary:
    entities: dict[str, VocabEntity]
    predicates: frozenset[str]
    # casefolded surface form -> entity ids carrying it as name or synonym
    surface: dict[str, tuple[str, ...]]

    @classmethod
    def build(cls, entities: Iterable[VocabEntity], predicates: Iterable[str]) -> "Vocabulary":
        by_id: dict[str, VocabEntity] = {}
        surface: dict[str, set[str]] = {}
        for entity in entities:
            if entity.id in by_id:
                raise MalformedRecord(0, f"duplicate entity id {entity.id!r}")
            by_id[entity.id] = entity
            for form in (entity.name, *entity.synonyms):
                if form.strip():
                    surface.setdefault(form.strip().casefold(), set()).add(entity.id)
        return cls(
            entities=by_id,
            predicates=frozenset(predicates),
            surface={form: tuple(sorted(ids)) for form, ids in surface.items()},
        )

    def resolve_surface(self, form: str) -> list[str]:
        return list(self.surface.get(form.strip().casefold(), ()))

    def entity_type(self, ref: str) -> str | None:
        entity = self.entities.get(ref)
        return entity.type if entity else None

    def display_name(self, ref: str) -> str:
        entity = self.entities.get(ref)
        if entity and entity.name:
            return entity.name
        return ref


def resolve_surface(form: str, vocab: Vocabulary) -> list[str]:
    """All entity ids whose name or a synonym equals ``form`` case-insensitively."""
    return vocab.resolve_surface(form)


def load_vocabulary(text: str) -> Vocabulary:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(0, f"vocabulary is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedRecord(0, "vocabulary must be a JSON object")
    unknown = set(raw) - _VOCAB_KEYS
    if unknown:
        raise MalformedRecord(0, f"unknown vocabulary keys {sorted(unknown)}")
    entities_raw = raw.get("entities")
    predicates_raw = raw.get("predicates")
    if not isinstance(entities_raw, list) or not isinstance(predicates_raw, list):
        raise MalformedRecord(0, "vocabulary needs 'entities' and 'predicates' lists")

    entities = []
    for item in entities_raw:
        if not isinstance(item, dict):
            raise MalformedRecord(0, "entity entries must be objects")
        unknown = set(item) - _ENTITY_KEYS
        if unknown:
            raise MalformedRecord(0, f"unknown entity keys {sorted(unknown)}")
        eid = item.get("id")
        name = item.get("name")
        etype = item.get("type")
        synonyms = item.get("synonyms", [])
        if not isinstance(eid, str) or not eid:
            raise MalformedRecord(0, "entity id must be a non-empty string")
        if not isinstance(name, str):
            raise MalformedRecord(0, f"entity {eid!r}: name must be a string")
        if not isinstance(etype, str) or not etype:
            raise MalformedRecord(0, f"entity {eid!r}: type must be a non-empty string")
        if etype == LITERAL_TYPE:
            raise MalformedRecord(0, f"entity {eid!r}: type {LITERAL_TYPE!r} is reserved")
        if not isinstance(synonyms, list) or not all(isinstance(s, str) for s in synonyms):
            raise MalformedRecord(0, f"entity {eid!r}: synonyms must be strings")
        entities.append(VocabEntity(eid, name, etype, tuple(synonyms)))

    if not all(isinstance(p, str) and p for p in predicates_raw):
        raise MalformedRecord(0, "predicates must be non-empty strings")
    return Vocabulary.build(entities, predicates_raw)


def export_vocabulary(vocab: Vocabulary) -> str:
    payload = {
        "entities": [
            {"id": e.id, "name": e.name, "type": e.type, "synonyms": list(e.synonyms)}
            for e in sorted(vocab.entities.values(), key=lambda e: e.id)
        ],
        "predicates": sorted(vocab.predicates),
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


@dataclass(frozen=True)
class StatementStore:
    """Immutable document collection with the indexes the engine probes."""

    vocabulary: Vocabulary
    documents: dict[str, DocumentGraph]
    by_predicate: dict[str, tuple[Statement, ...]]
    by_subject_predicate: dict[tuple[str, str], tuple[Statement, ...]]
    by_predicate_object: dict[tuple[str, tuple[str, str]], tuple[Statement, ...]]
    entities_by_type: dict[str, frozenset[str]]
    entity_ids: frozenset[str]
    unlinkable: frozenset[str]

    def statements(self) -> Iterator[Statement]:
        for doc_id in sorted(self.documents):
            yield from self.documents[doc_id].statements

    def statement_count(self) -> int:
        return sum(len(d.statements) for d in self.documents.values())

    def entity_type(self, ref: str) -> str | None:
        return self.vocabulary.entity_type(ref)

    def contains(self, statement: Statement) -> bool:
        doc = self.documents.get(statement.doc)
        return doc is not None and statement in doc.statements


def build_store(vocab: Vocabulary, documents: Iterable[DocumentGraph]) -> StatementStore:
    docs = {d.id: d for d in documents}
    by_predicate: dict[str, list[Statement]] = {}
    by_sp: dict[tuple[str, str], list[Statement]] = {}
    by_po: dict[tuple[str, tuple[str, str]], list[Statement]] = {}
    entity_ids: set[str] = set()
    for doc_id in sorted(docs):
        for st in docs[doc_id].statements:
            by_predicate.setdefault(st.predicate, []).append(st)
            by_sp.setdefault((st.subject, st.predicate), []).append(st)
            by_po.setdefault((st.predicate, value_key(st.object)), []).append(st)
            entity_ids.add(st.subject)
            if isinstance(st.object, str):
                entity_ids.add(st.object)

    by_type: dict[str, set[str]] = {}
    for ref in entity_ids:
        etype = vocab.entity_type(ref)
        if etype is not None:
            by_type.setdefault(etype, set()).add(ref)

    return StatementStore(
        vocabulary=vocab,
        documents=docs,
        by_predicate={k: tuple(v) for k, v in by_predicate.items()},
        by_subject_predicate={k: tuple(v) for k, v in by_sp.items()},
        by_predicate_object={k: tuple(v) for k, v in by_po.items()},
        entities_by_type={k: frozenset(v) for k, v in by_type.items()},
        entity_ids=frozenset(entity_ids),
        unlinkable=frozenset(e for e in entity_ids if e not in vocab.entities),
    )


@dataclass(frozen=True)
class IngestResult:
    store: StatementStore
    malformed: tuple[MalformedRecord, ...]


def _require(condition: bool, line: int, reason: str) -> None:
    if not condition:
        raise MalformedRecord(line, reason)


def _parse_statement(raw: object, line: int, doc_id: str, sentences: dict[str, str]) -> Statement:
    _require(isinstance(raw, dict), line, "statement entries must be objects")
    assert isinstance(raw, dict)
    unknown = set(raw) - _STMT_KEYS
    _require(not unknown, line, f"unknown statement keys {sorted(unknown)}")
    for key in ("subject", "predicate", "object"):
        _require(key in raw, line, f"statement missing {key!r}")

    subject = raw["subject"]
    predicate = raw["predicate"]
    _require(isinstance(subject, str) and bool(subject), line, "subject must be a non-empty string")
    _require(isinstance(predicate, str) and bool(predicate), line, "predicate must be a non-empty string")

    obj_raw = raw["object"]
    obj: str | Literal
    if isinstance(obj_raw, str):
        _require(bool(obj_raw), line, "object entity id must be non-empty")
        obj = obj_raw
    elif isinstance(obj_raw, dict):
        _require(set(obj_raw) == {"literal"}, line, "literal objects must be {\"literal\": str}")
        _require(isinstance(obj_raw["literal"], str), line, "literal value must be a string")
        obj = Literal(obj_raw["literal"].strip())
    else:
        raise MalformedRecord(line, "object must be an entity id or a literal object")

    sentence = raw.get("sentence")
    if sentence is not None:
        _require(isinstance(sentence, str) and bool(sentence), line, "sentence id must be a non-empty string")
        _require(sentence in sentences, line, f"statement references unknown sentence {sentence!r}")

    group_raw = raw.get("group")
    if group_raw is not None:
        _require(isinstance(group_raw, str) and bool(group_raw), line, "group must be a non-empty string")

    return Statement(
        subject=subject,
        predicate=predicate,
        object=obj,
        doc=doc_id,
        sentence=sentence,
        group=group_id(doc_id, group_raw),
    )


def _parse_document(text: str, line: int) -> DocumentGraph:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line, f"invalid JSON: {exc.msg}") from None
    _require(isinstance(raw, dict), line, "document record must be a JSON object")
    assert isinstance(raw, dict)
    unknown = set(raw) - _DOC_KEYS
    _require(not unknown, line, f"unknown document keys {sorted(unknown)}")
    missing = _DOC_KEYS - set(raw)
    _require(not missing, line, f"missing document keys {sorted(missing)}")

    doc_id = raw["id"]
    _require(isinstance(doc_id, str) and bool(doc_id), line, "document id must be a non-empty string")
    _require(isinstance(raw["title"], str), line, "title must be a string")
    _require(isinstance(raw["source"], str), line, "source must be a string")
    _require(
        isinstance(raw["authors"], list) and all(isinstance(a, str) for a in raw["authors"]),
        line,
        "authors must be a list of strings",
    )
    _require(
        isinstance(raw["date"], str) and bool(_DATE_SHAPE.match(raw["date"])),
        line,
        "date must have YYYY-MM-DD shape",
    )
    _require(
        isinstance(raw["keywords"], list) and all(isinstance(k, str) for k in raw["keywords"]),
        line,
        "keywords must be a list of strings",
    )
    sentences = raw["sentences"]
    _require(
        isinstance(sentences, dict)
        and all(isinstance(k, str) and isinstance(v, str) for k, v in sentences.items()),
        line,
        "sentences must map sentence ids to text",
    )
    _require(isinstance(raw["statements"], list), line, "statements must be a list")

    statements = [_parse_statement(s, line, doc_id, sentences) for s in raw["statements"]]
    # Identical six-tuples collapse to one; canonical order fixes round trips.
    unique = sorted(set(statements), key=lambda s: s.key())

    return DocumentGraph(
        id=doc_id,
        title=raw["title"],
        source=raw["source"],
        authors=tuple(raw["authors"]),
        date=raw["date"],
        keywords=tuple(raw["keywords"]),
        sentences={sid: sentences[sid] for sid in sorted(sentences)},
        statements=tuple(unique),
    )


def ingest(lines: Iterable[str] | str, vocab: Vocabulary) -> IngestResult:
    """Build a store from JSON-lines document records.

    Malformed records are collected and skipped; a duplicate document id
    aborts ingestion outright.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    documents: dict[str, DocumentGraph] = {}
    malformed: list[MalformedRecord] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            doc = _parse_document(line, line_no)
        except MalformedRecord as exc:
            malformed.append(exc)
            continue
        if doc.id in documents:
            raise DuplicateDocumentId(doc.id)
        documents[doc.id] = doc
    return IngestResult(build_store(vocab, documents.values()), tuple(malformed))


def _statement_payload(st: Statement) -> dict:
    payload: dict = {"subject": st.subject, "predicate": st.predicate}
    if isinstance(st.object, Literal):
        payload["object"] = {"literal": st.object.value}
    else:
        payload["object"] = st.object
    if st.sentence is not None:
        payload["sentence"] = st.sentence
    raw = st.raw_group()
    if raw != DEFAULT_GROUP:
        payload["group"] = raw
    return payload


def document_payload(doc: DocumentGraph) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "source": doc.source,
        "authors": list(doc.authors),
        "date": doc.date,
        "keywords": list(doc.keywords),
        "sentences": dict(doc.sentences),
        "statements": [_statement_payload(s) for s in doc.statements],
    }


def export_lines(store: StatementStore) -> list[str]:
    """Serialize the store back to the document file format, canonically ordered."""
    return [
        json.dumps(document_payload(store.documents[doc_id]), ensure_ascii=False, separators=(",", ":"))
        for doc_id in sorted(store.documents)
    ]


def save_index(store: StatementStore, directory: str | Path) -> None:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    meta = {"format": INDEX_FORMAT, "version": INDEX_VERSION}
    (path / "meta.json").write_text(json.dumps(meta) + "\n", encoding="utf-8")
    (path / "vocabulary.json").write_text(export_vocabulary(store.vocabulary), encoding="utf-8")
    (path / "documents.jsonl").write_text(
        "".join(line + "\n" for line in export_lines(store)), encoding="utf-8"
    )


def load_index(directory: str | Path) -> StatementStore:
    path = Path(directory)
    meta_path = path / "meta.json"
    if not meta_path.is_file():
        raise IndexFormatError(f"{path} is not an index directory (missing meta.json)")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise IndexFormatError(f"unreadable index metadata: {exc}") from None
    if meta.get("format") != INDEX_FORMAT or meta.get("version") != INDEX_VERSION:
        raise IndexFormatError(
            f"index version mismatch: found {meta.get('format')}/{meta.get('version')}, "
            f"need {INDEX_FORMAT}/{INDEX_VERSION}"
        )
    try:
        vocab = load_vocabulary((path / "vocabulary.json").read_text(encoding="utf-8"))
        result = ingest((path / "documents.jsonl").read_text(encoding="utf-8"), vocab)
    except (OSError, MalformedRecord, DuplicateDocumentId) as exc:
        raise IndexFormatError(f"corrupt index: {exc}") from None
    if result.malformed:
        raise IndexFormatError(f"corrupt index: {result.malformed[0]}")
    return result.store
