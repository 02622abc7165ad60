"""Query processing: tokenization, stemming, stop words, gazetteer NER, relation intent."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import snowballstemmer

from .errors import EmptyQueryError, MalformedInputError
from .vocab import DEFAULT_TRIGGERS, EntityKind, RelKind

# Bumping this invalidates embedder fingerprints, so persisted indexes get rebuilt.
STEMMER_ID = "snowball-porter/1"

_TOKEN_RE = re.compile(r"[^\W_]+")
_stemmer = snowballstemmer.stemmer("porter")


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    return _stemmer.stemWord(word)


def _as_text(text: str | bytes) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInputError(f"input is not valid UTF-8: {exc}") from None
    try:
        text.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise MalformedInputError(f"input is not valid UTF-8: {exc}") from None
    return text


def tokenize_spans(text: str) -> list[tuple[str, int, int]]:
    """Lowercased tokens with their (start, end) character offsets in ``text``."""
    return [(m.group().lower(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def tokenize(text: str | bytes) -> list[str]:
    """Lowercase tokens split on non-alphanumeric boundaries, unstemmed."""
    return [m.group().lower() for m in _TOKEN_RE.finditer(_as_text(text))]


def normalize(text: str | bytes) -> list[str]:
    """Lowercase, split on non-alphanumerics and stem every token.

    Raises MalformedInputError for undecodable input and EmptyQueryError when
    nothing survives tokenization.
    """
    tokens = [stem(t) for t in tokenize(text)]
    if not tokens:
        raise EmptyQueryError("empty query")
    return tokens


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stop-word file (one token per line, '#' comments).

    Each word is kept both raw and stemmed so the set applies to normalized tokens.
    """
    if path is None:
        raw = resources.files("fuserag").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    words: set[str] = set()
    for line in raw.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
            words.add(stem(line))
    return frozenset(words)


DEFAULT_STOPWORDS = load_stopwords()


def remove_stopwords(tokens: Sequence[str], stopwords: frozenset[str] | None = None) -> list[str]:
    stop = DEFAULT_STOPWORDS if stopwords is None else stopwords
    return [t for t in tokens if t not in stop]


def _trigger_fires(term: str, pattern: str) -> bool:
    if pattern.endswith("*"):
        prefix = pattern[:-1]
        return term.startswith(prefix) or stem(term).startswith(prefix)
    return term == pattern or stem(term) == pattern


def detect_relation_intent(
    key_terms: Sequence[str],
    triggers: Sequence[tuple[str, RelKind]] = DEFAULT_TRIGGERS,
) -> RelKind | None:
    for term in key_terms:
        for pattern, kind in triggers:
            if _trigger_fires(term, pattern):
                return kind
    return None


@dataclass(frozen=True)
class RawQuery:
    text: str
    id: str = ""

    def __post_init__(self):
        if not self.text.strip():
            raise EmptyQueryError("empty query")


@dataclass(frozen=True)
class EntityMention:
    surface: str
    span: tuple[int, int]
    entity_id: str
    kind: EntityKind


@dataclass(frozen=True)
class ProcessedQuery:
    tokens: tuple[str, ...]
    key_terms: tuple[str, ...]
    entities: tuple[EntityMention, ...]
    relation_intent: RelKind | None
    original: RawQuery

    @property
    def entity_ids(self) -> frozenset[str]:
        return frozenset(m.entity_id for m in self.entities)


def alias_key(alias: str) -> tuple[str, ...]:
    return tuple(stem(t) for t in tokenize(alias))


@dataclass(frozen=True)
class GazetteerEntry:
    entity_id: str
    kind: EntityKind


class Gazetteer:
    """Alias lookup keyed on stemmed token tuples.

    Built from (entity_id, kind, alias) triples. When two entities share an
    alias the lexicographically smaller entity_id keeps it; the clash is
    recorded in ``duplicates``. Immutable after construction.
    """

    def __init__(self, entries: Iterable[tuple[str, EntityKind | str, str]]):
        table: dict[tuple[str, ...], GazetteerEntry] = {}
        clashes: dict[tuple[str, ...], set[str]] = {}
        for entity_id, kind, alias in sorted(entries, key=lambda e: (e[0], e[2])):
            key = alias_key(alias)
            if not key:
                continue
            entry = GazetteerEntry(entity_id, EntityKind(kind))
            held = table.get(key)
            if held is None:
                table[key] = entry
            elif held.entity_id != entity_id:
                clashes.setdefault(key, {held.entity_id}).add(entity_id)
        self._table = table
        self._kinds = {e.entity_id: e.kind for e in table.values()}
        self.max_len = max((len(k) for k in table), default=0)
        self.duplicates = {" ".join(k): sorted(v) for k, v in sorted(clashes.items())}
        self._scan = lru_cache(maxsize=8192)(self._scan_uncached)

    def __len__(self) -> int:
        return len(self._table)

    def __contains__(self, alias: str) -> bool:
        return alias_key(alias) in self._table

    def lookup(self, surface: str) -> str | None:
        entry = self._table.get(alias_key(surface))
        return entry.entity_id if entry else None

    def kind_of(self, entity_id: str) -> EntityKind | None:
        return self._kinds.get(entity_id)

    def aliases(self) -> list[tuple[str, str]]:
        return sorted((" ".join(k), e.entity_id) for k, e in self._table.items())

    def recognize(self, text: str) -> tuple[EntityMention, ...]:
        return self._scan(text)

    def entity_ids(self, text: str) -> frozenset[str]:
        return frozenset(m.entity_id for m in self._scan(text))

    def _scan_uncached(self, text: str) -> tuple[EntityMention, ...]:
        spans = tokenize_spans(text)
        stems = [stem(tok) for tok, _, _ in spans]
        matches = []
        for i in range(len(stems)):
            for length in range(1, min(self.max_len, len(stems) - i) + 1):
                entry = self._table.get(tuple(stems[i : i + length]))
                if entry is not None:
                    matches.append((length, i, entry))
        # longest first, leftmost on ties, then drop anything overlapping a kept match
        matches.sort(key=lambda m: (-m[0], m[1]))
        taken = [False] * len(stems)
        kept = []
        for length, i, entry in matches:
            if any(taken[i : i + length]):
                continue
            for j in range(i, i + length):
                taken[j] = True
            kept.append((i, length, entry))
        kept.sort()
        mentions = []
        for i, length, entry in kept:
            start, end = spans[i][1], spans[i + length - 1][2]
            mentions.append(EntityMention(text[start:end], (start, end), entry.entity_id, entry.kind))
        return tuple(mentions)


def recognize_entities(text: str, gazetteer: Gazetteer) -> list[EntityMention]:
    """Longest-match, non-overlapping gazetteer mentions in text order."""
    return list(gazetteer.recognize(_as_text(text)))


def process_query(
    raw: RawQuery | str,
    gazetteer: Gazetteer | None = None,
    stopwords: frozenset[str] | None = None,
    triggers: Sequence[tuple[str, RelKind]] = DEFAULT_TRIGGERS,
) -> ProcessedQuery:
    if isinstance(raw, str):
        raw = RawQuery(raw)
    tokens = normalize(raw.text)
    key_terms = remove_stopwords(tokens, stopwords)
    entities = recognize_entities(raw.text, gazetteer) if gazetteer is not None else []
    intent = detect_relation_intent(key_terms, triggers) if key_terms else None
    return ProcessedQuery(tuple(tokens), tuple(key_terms), tuple(entities), intent, raw)
