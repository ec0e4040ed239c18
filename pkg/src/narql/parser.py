"""Textual query language: parsing and canonical rendering.

Grammar (whitespace-insensitive outside bare text):

    query  := clause ("AND" clause)*
    clause := "(" term "," term "," term ")"
    term   := "?" IDENT "(" IDENT ")" | QUOTED_STRING | BARE_TEXT

Clause positions are subject, predicate, object. Predicates are bare or
quoted text; "AND" is case-sensitive and must be surrounded by whitespace.
Bare text may contain spaces and hyphens and is trimmed. A quoted string in
object position that resolves to no entity becomes a literal; anywhere else
an unresolvable form is an error.
"""

from __future__ import annotations

import re

from .ingestion import Vocabulary
from .model import (
    Clause,
    EntityTerm,
    LiteralTerm,
    NarrativeQuery,
    Term,
    VariableTerm,
    validate_query,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# Characters a bare rendering would mis-tokenize.
_UNSAFE_BARE = re.compile(r"[,()\"?]")


class QueryParseError(Exception):
    """Base for parse-level failures; always carries a character position."""

    code = "QueryParseError"

    def __init__(self, message: str, position: int) -> None:
        self.position = position
        super().__init__(f"{message} (at position {position})")


class QuerySyntaxError(QueryParseError):
    code = "SyntaxError"

    def __init__(self, position: int, expected: str) -> None:
        self.expected = expected
        super().__init__(f"expected {expected}", position)


class UnknownEntity(QueryParseError):
    code = "UnknownEntity"

    def __init__(self, form: str, position: int) -> None:
        self.form = form
        super().__init__(f"unknown entity {form!r}", position)


class AmbiguousEntity(QueryParseError):
    code = "AmbiguousEntity"

    def __init__(self, form: str, candidates: list[str], position: int) -> None:
        self.form = form
        self.candidates = list(candidates)
        super().__init__(
            f"ambiguous entity {form!r}; candidates: {', '.join(candidates)}", position
        )


class UnknownPredicate(QueryParseError):
    code = "UnknownPredicate"

    def __init__(self, name: str, position: int) -> None:
        self.name = name
        super().__init__(f"unknown predicate {name!r}", position)


class _Scanner:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def skip_ws(self) -> int:
        skipped = 0
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
            skipped += 1
        return skipped

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str, expected: str) -> None:
        if self.peek() != char:
            raise QuerySyntaxError(self.pos, expected)
        self.pos += 1

    def ident(self, what: str) -> str:
        match = _IDENT.match(self.text, self.pos)
        if not match:
            raise QuerySyntaxError(self.pos, what)
        self.pos = match.end()
        return match.group()

    def quoted(self) -> str:
        # Opening quote already seen by the caller.
        self.expect('"', "opening quote")
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise QuerySyntaxError(self.pos, "closing quote")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == "\\":
                if self.pos >= len(self.text):
                    raise QuerySyntaxError(self.pos, "escaped character")
                out.append(self.text[self.pos])
                self.pos += 1
            elif ch == '"':
                return "".join(out)
            else:
                out.append(ch)

    def bare(self, stops: str) -> tuple[str, int]:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            self.pos += 1
        if self.pos >= len(self.text):
            raise QuerySyntaxError(self.pos, f"one of {' '.join(repr(s) for s in stops)}")
        text = self.text[start:self.pos].strip()
        if not text:
            raise QuerySyntaxError(start, "a term")
        return text, start


# Raw (pre-resolution) term token: kind is "var" | "quoted" | "bare".
_RawTerm = tuple[str, tuple, int]


def _resolve_entity(
    form: str,
    position: int,
    vocab: Vocabulary,
    known_ids: frozenset[str],
    allow_id: bool,
) -> EntityTerm:
    ids = vocab.resolve_surface(form)
    if len(ids) == 1:
        return EntityTerm(ids[0])
    if len(ids) > 1:
        raise AmbiguousEntity(form, ids, position)
    # Exact-id escape hatch: lets queries name entities the vocabulary does
    # not know (they still never match typed variables).
    if allow_id and (form in vocab.entities or form in known_ids):
        return EntityTerm(form)
    raise UnknownEntity(form, position)


def parse(
    text: str,
    vocab: Vocabulary,
    known_ids: frozenset[str] = frozenset(),
) -> NarrativeQuery:
    """Parse query text into a validated query.

    Syntax is checked over the whole input before any name resolution, so a
    malformed clause reports SyntaxError even when its terms are unknown.
    ``known_ids`` extends exact-id entity resolution with ids present in a
    store but absent from the vocabulary.
    """
    scanner = _Scanner(text)
    raw_clauses = [_scan_clause(scanner)]
    while True:
        before = scanner.pos
        ws = scanner.skip_ws()
        if scanner.pos >= len(scanner.text):
            break
        if ws == 0 or not scanner.text.startswith("AND", scanner.pos):
            raise QuerySyntaxError(before, "' AND ' or end of query")
        scanner.pos += 3
        if scanner.skip_ws() == 0:
            raise QuerySyntaxError(scanner.pos, "whitespace after 'AND'")
        raw_clauses.append(_scan_clause(scanner))

    clauses = [
        Clause(
            _resolve_term(subject, "subject", vocab, known_ids),
            _resolve_predicate(predicate, vocab),
            _resolve_term(obj, "object", vocab, known_ids),
        )
        for subject, predicate, obj in raw_clauses
    ]
    query = NarrativeQuery(tuple(clauses))
    validate_query(query)
    return query


def _scan_clause(scanner: _Scanner) -> tuple[_RawTerm, _RawTerm, _RawTerm]:
    scanner.skip_ws()
    scanner.expect("(", "'('")
    subject = _scan_term(scanner, stops=",")
    scanner.skip_ws()
    scanner.expect(",", "','")
    predicate = _scan_term(scanner, stops=",")
    scanner.skip_ws()
    scanner.expect(",", "','")
    obj = _scan_term(scanner, stops=",)")
    scanner.skip_ws()
    scanner.expect(")", "')'")
    return subject, predicate, obj


def _scan_term(scanner: _Scanner, stops: str) -> _RawTerm:
    scanner.skip_ws()
    if scanner.peek() == "?":
        start = scanner.pos
        scanner.pos += 1
        name = scanner.ident("a variable name")
        scanner.skip_ws()
        scanner.expect("(", "'(' before the variable type")
        scanner.skip_ws()
        vtype = scanner.ident("a variable type")
        scanner.skip_ws()
        scanner.expect(")", "')' after the variable type")
        return ("var", (name, vtype), start)
    if scanner.peek() == '"':
        start = scanner.pos
        return ("quoted", (scanner.quoted(),), start)
    form, start = scanner.bare(stops)
    return ("bare", (form,), start)


def _resolve_term(
    raw: _RawTerm, position: str, vocab: Vocabulary, known_ids: frozenset[str]
) -> Term:
    kind, payload, start = raw
    if kind == "var":
        return VariableTerm(*payload)
    content = payload[0]
    if kind == "quoted" and position == "object":
        # Quoted objects that resolve to nothing become literals.
        ids = vocab.resolve_surface(content)
        if len(ids) == 1:
            return EntityTerm(ids[0])
        if len(ids) > 1:
            raise AmbiguousEntity(content, ids, start)
        return LiteralTerm(content.strip())
    return _resolve_entity(content, start, vocab, known_ids, allow_id=True)


def _resolve_predicate(raw: _RawTerm, vocab: Vocabulary) -> str:
    kind, payload, start = raw
    if kind == "var":
        raise QuerySyntaxError(start, "a predicate name, not a variable")
    name = payload[0].strip()
    if name not in vocab.predicates:
        raise UnknownPredicate(name, start)
    return name


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_term(term: Term, vocab: Vocabulary) -> str:
    if isinstance(term, VariableTerm):
        return f"?{term.name}({term.type})"
    if isinstance(term, LiteralTerm):
        return _quote(term.value)
    name = vocab.display_name(term.ref)
    # Prefer the display name, but only when it parses back to this entity.
    if name and not _UNSAFE_BARE.search(name) and vocab.resolve_surface(name) == [term.ref]:
        return name
    if _UNSAFE_BARE.search(term.ref):
        return _quote(term.ref)
    return term.ref


def _render_predicate(name: str) -> str:
    if _UNSAFE_BARE.search(name) or name != name.strip():
        return _quote(name)
    return name


def render_clause(clause: Clause, vocab: Vocabulary) -> str:
    return (
        f"({render_term(clause.subject, vocab)}, "
        f"{_render_predicate(clause.predicate)}, "
        f"{render_term(clause.object, vocab)})"
    )


def render(query: NarrativeQuery, vocab: Vocabulary) -> str:
    """Canonical pretty-printer; parse(render(q)) reproduces q."""
    return " AND ".join(render_clause(c, vocab) for c in query.clauses)
