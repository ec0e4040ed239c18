"""Context-compatibility: the predicate deciding which bindings may be fused.

Four variants. GLOBAL is the no-check baseline that reproduces cross-context
fusion mistakes; DOCUMENT and GROUP require a single shared document or
statement group; SIMILARITY relaxes DOCUMENT by admitting document pairs with
sufficiently similar keyword sets or a shared author.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .ingestion import StatementStore
from .model import Binding, ContextPolicy


@dataclass(frozen=True)
class ContextKeyset:
    docs: frozenset[str]
    groups: frozenset[str]


def keyset(bindings: Sequence[Binding]) -> ContextKeyset:
    return ContextKeyset(
        docs=frozenset(b.statement.doc for b in bindings),
        groups=frozenset(b.statement.group for b in bindings),
    )


def keyword_jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """Jaccard similarity of two keyword sets; identical-empty counts as 1.0."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def _documents_similar(store: StatementStore, doc_a: str, doc_b: str, threshold: float) -> bool:
    a = store.documents[doc_a]
    b = store.documents[doc_b]
    if set(a.authors) & set(b.authors):
        return True
    return keyword_jaccard(a.keywords, b.keywords) >= threshold


def compatible(bindings: Sequence[Binding], policy: ContextPolicy, store: StatementStore) -> bool:
    """True when the bindings' contexts allow fusing them into one result row.

    Invariant under permutation of ``bindings``; monotone under extension
    (a prefix that fails stays failed), which makes incremental pruning
    during joins agree with the post-hoc check on complete rows.
    """
    if not bindings:
        raise ValueError("compatible() needs at least one binding")
    if policy.kind == "GLOBAL":
        return True
    keys = keyset(bindings)
    if policy.kind == "DOCUMENT":
        return len(keys.docs) == 1
    if policy.kind == "GROUP":
        return len(keys.groups) == 1
    # SIMILARITY: every pair of distinct supporting documents must qualify.
    return all(
        _documents_similar(store, doc_a, doc_b, policy.similarity_threshold)
        for doc_a, doc_b in combinations(sorted(keys.docs), 2)
    )


class ContextTracker:
    """Incremental form of :func:`compatible` for the join's partial rows.

    ``admits`` answers whether pushing one more statement keeps the partial
    row compatible; because every policy is monotone under extension, a
    stepwise-admitted row is exactly one that passes the post-hoc check.
    """

    def __init__(self, policy: ContextPolicy, store: StatementStore) -> None:
        self.policy = policy
        self.store = store
        self._doc_counts: dict[str, int] = {}
        self._group_counts: dict[str, int] = {}
        self._similar: dict[tuple[str, str], bool] = {}

    def _pair_similar(self, doc_a: str, doc_b: str) -> bool:
        key = (doc_a, doc_b) if doc_a <= doc_b else (doc_b, doc_a)
        cached = self._similar.get(key)
        if cached is None:
            cached = _documents_similar(self.store, doc_a, doc_b, self.policy.similarity_threshold)
            self._similar[key] = cached
        return cached

    def admits(self, statement) -> bool:
        kind = self.policy.kind
        if kind == "GLOBAL":
            return True
        if kind == "DOCUMENT":
            return not self._doc_counts or statement.doc in self._doc_counts
        if kind == "GROUP":
            return not self._group_counts or statement.group in self._group_counts
        if statement.doc in self._doc_counts:
            return True
        return all(self._pair_similar(statement.doc, seen) for seen in self._doc_counts)

    def push(self, statement) -> None:
        self._doc_counts[statement.doc] = self._doc_counts.get(statement.doc, 0) + 1
        self._group_counts[statement.group] = self._group_counts.get(statement.group, 0) + 1

    def pop(self, statement) -> None:
        for counts, key in ((self._doc_counts, statement.doc), (self._group_counts, statement.group)):
            counts[key] -= 1
            if not counts[key]:
                del counts[key]
