"""In-memory typed property graph: construction, pattern queries and fact-checking."""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    DataError,
    KindConflictError,
    NoAnchorError,
    RecordError,
    SchemaError,
    UnknownEntityError,
)
from .query import (
    Gazetteer,
    ProcessedQuery,
    alias_key,
    detect_relation_intent,
    normalize,
    remove_stopwords,
)
from .vocab import DEFAULT_TRIGGERS, EntityKind, RelKind

# ---------------------------------------------------------------- schema


@dataclass(frozen=True)
class Schema:
    entity_kinds: frozenset[str]
    relation_kinds: frozenset[str]
    functional: frozenset[str] = frozenset()
    symmetric: frozenset[str] = frozenset()
    signatures: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "Schema":
        try:
            kinds = frozenset(raw["entity_kinds"])
            rels = frozenset(raw["relation_kinds"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"schema missing field: {exc}") from None
        for k in kinds:
            EntityKind(k)
        for r in rels:
            RelKind(r)
        functional = frozenset(raw.get("functional", ()))
        symmetric = frozenset(raw.get("symmetric", ()))
        if not functional <= rels or not symmetric <= rels:
            raise SchemaError("functional/symmetric lists name unknown relation kinds")
        sigs = {r: tuple(tuple(p) for p in pairs) for r, pairs in raw.get("signatures", {}).items()}
        return cls(kinds, rels, functional, symmetric, sigs)

    def fits(self, rel: str, src_kind: str, dst_kind: str) -> bool:
        pairs = self.signatures.get(rel)
        if not pairs:
            return True
        return any(s in ("*", src_kind) and d in ("*", dst_kind) for s, d in pairs)

    def has_signature(self, rel: str) -> bool:
        return bool(self.signatures.get(rel))


def load_schema(path: str | Path | None = None) -> Schema:
    if path is None:
        raw = resources.files("fuserag").joinpath("data/schema.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    try:
        return Schema.from_dict(json.loads(raw))
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"invalid schema file: {exc}") from None


DEFAULT_SCHEMA = load_schema()

# ---------------------------------------------------------------- records


@dataclass(frozen=True)
class Entity:
    entity_id: str
    kind: EntityKind
    label: str
    aliases: tuple[str, ...]
    props: dict[str, str] = field(default_factory=dict)
    sources: tuple[str, ...] = ()


@dataclass(frozen=True)
class Relation:
    src: str
    dst: str
    rel_kind: RelKind
    confidence: float
    sources: tuple[str, ...] = ()

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.src, self.rel_kind.value, self.dst)


class Claim(NamedTuple):
    src: str
    rel: RelKind
    dst: str


class Verdict(str, Enum):
    SUPPORTED = "supported"
    CONTRADICTED = "contradicted"
    UNKNOWN = "unknown"


def read_graph_records(path: str | Path) -> tuple[list[dict], list[dict]]:
    """Split a JSONL graph file into node and edge records."""
    nodes, edges = [], []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                kind = rec["type"]
            except (ValueError, KeyError, TypeError) as exc:
                raise RecordError(path, line_no, f"malformed graph record ({exc})") from None
            if kind == "node":
                nodes.append(rec)
            elif kind == "edge":
                edges.append(rec)
            else:
                raise RecordError(path, line_no, f"unknown record type {kind!r}")
    return nodes, edges


@dataclass
class QualityReport:
    dangling_edges: list[dict] = field(default_factory=list)
    duplicate_aliases: dict[str, list[str]] = field(default_factory=dict)
    empty_alias_entities: list[str] = field(default_factory=list)
    merged_edges: list[list[str]] = field(default_factory=list)
    extraction_conflicts: list[list[str]] = field(default_factory=list)
    kind_counts: dict[str, int] = field(default_factory=dict)
    relation_counts: dict[str, int] = field(default_factory=dict)

    @property
    def error_count(self) -> int:
        return len(self.dangling_edges)

    def to_dict(self) -> dict:
        return {
            "errors": self.error_count,
            "dangling_edges": self.dangling_edges,
            "duplicate_aliases": self.duplicate_aliases,
            "empty_alias_entities": self.empty_alias_entities,
            "merged_edges": self.merged_edges,
            "extraction_conflicts": self.extraction_conflicts,
            "kind_counts": self.kind_counts,
            "relation_counts": self.relation_counts,
        }


# ---------------------------------------------------------------- graph


class Graph:
    """Immutable graph. Construct via :func:`build_graph`."""

    def __init__(self, entities: dict[str, Entity], relations: dict[tuple[str, str, str], Relation], schema: Schema):
        self.entities = dict(sorted(entities.items()))
        self.relations = dict(sorted(relations.items()))
        self.schema = schema
        self.quality = QualityReport()
        out_adj: dict[str, list[Relation]] = defaultdict(list)
        in_adj: dict[str, list[Relation]] = defaultdict(list)
        for r in self.relations.values():
            out_adj[r.src].append(r)
            in_adj[r.dst].append(r)
        self._out = dict(out_adj)
        self._in = dict(in_adj)
        self._gazetteer: Gazetteer | None = None

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.entities

    @property
    def gazetteer(self) -> Gazetteer:
        if self._gazetteer is None:
            self._gazetteer = Gazetteer(
                (e.entity_id, e.kind, a) for e in self.entities.values() for a in e.aliases
            )
        return self._gazetteer

    def out_edges(self, entity_id: str) -> list[Relation]:
        return self._out.get(entity_id, [])

    def in_edges(self, entity_id: str) -> list[Relation]:
        return self._in.get(entity_id, [])

    def relation(self, src: str, rel: RelKind | str, dst: str) -> Relation | None:
        rel = RelKind(rel)
        found = self.relations.get((src, rel.value, dst))
        if found is None and rel.value in self.schema.symmetric:
            found = self.relations.get((dst, rel.value, src))
        return found

    def serialize(self) -> bytes:
        """Canonical JSONL bytes: nodes by id, then edges by (src, rel, dst)."""
        lines = []
        for e in self.entities.values():
            rec = {
                "type": "node",
                "id": e.entity_id,
                "kind": e.kind.value,
                "label": e.label,
                "aliases": list(e.aliases),
                "props": e.props,
            }
            if e.sources:
                rec["sources"] = list(e.sources)
            lines.append(json.dumps(rec, sort_keys=True, ensure_ascii=False, separators=(",", ":")))
        for r in self.relations.values():
            rec = {
                "type": "edge",
                "src": r.src,
                "dst": r.dst,
                "rel": r.rel_kind.value,
                "confidence": r.confidence,
                "sources": list(r.sources),
            }
            lines.append(json.dumps(rec, sort_keys=True, ensure_ascii=False, separators=(",", ":")))
        return ("\n".join(lines) + "\n").encode("utf-8")

    def fingerprint(self) -> str:
        return hashlib.sha256(self.serialize()).hexdigest()

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.serialize())


def _canonical(src: str, rel: RelKind, dst: str, schema: Schema) -> tuple[str, str]:
    if rel.value in schema.symmetric and dst < src:
        return dst, src
    return src, dst


def build_graph(
    entity_records: Iterable[dict],
    relation_records: Iterable[dict],
    schema: Schema | None = None,
) -> Graph:
    """Deduplicate and validate records into a referentially closed graph.

    Duplicate node ids with the same kind are merged; a kind conflict raises
    KindConflictError. Edges with an unknown endpoint are dropped and listed in
    ``graph.quality.dangling_edges``. Repeated (src, rel, dst) triples keep the
    highest confidence and the union of their sources.
    """
    schema = schema or DEFAULT_SCHEMA
    report = QualityReport()
    entities: dict[str, Entity] = {}
    for rec in entity_records:
        try:
            eid = str(rec["id"])
            kind = str(rec["kind"])
            label = str(rec.get("label") or "").strip()
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"node record missing field: {exc}") from None
        if kind not in schema.entity_kinds:
            raise SchemaError(f"node {eid!r}: kind {kind!r} not allowed by schema")
        if not label:
            raise SchemaError(f"node {eid!r}: empty label")
        raw_aliases = [str(a).strip().lower() for a in rec.get("aliases") or [] if str(a).strip()]
        if not raw_aliases:
            report.empty_alias_entities.append(eid)
        aliases = set(raw_aliases)
        if alias_key(label) not in {alias_key(a) for a in aliases}:
            aliases.add(label.lower())
        props = {str(k): str(v) for k, v in (rec.get("props") or {}).items()}
        sources = {str(s) for s in rec.get("sources") or []}
        prev = entities.get(eid)
        if prev is not None:
            if prev.kind.value != kind:
                raise KindConflictError(f"node {eid!r} declared as both {prev.kind.value} and {kind}")
            aliases |= set(prev.aliases)
            props = {**props, **prev.props}
            sources |= set(prev.sources)
            label = prev.label
        entities[eid] = Entity(eid, EntityKind(kind), label, tuple(sorted(aliases)), props, tuple(sorted(sources)))

    relations: dict[tuple[str, str, str], Relation] = {}
    for rec in relation_records:
        try:
            src, dst, rel_name = str(rec["src"]), str(rec["dst"]), str(rec["rel"])
            conf = float(rec.get("confidence", 1.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"edge record malformed: {exc}") from None
        if rel_name not in schema.relation_kinds:
            raise SchemaError(f"edge {src}->{dst}: relation kind {rel_name!r} not allowed by schema")
        if not 0.0 <= conf <= 1.0 or math.isnan(conf):
            raise SchemaError(f"edge {src}-{rel_name}->{dst}: confidence {conf} outside [0, 1]")
        missing = [x for x in (src, dst) if x not in entities]
        if missing:
            report.dangling_edges.append({"src": src, "rel": rel_name, "dst": dst, "missing": missing})
            continue
        rel = RelKind(rel_name)
        src, dst = _canonical(src, rel, dst, schema)
        if not (
            schema.fits(rel_name, entities[src].kind.value, entities[dst].kind.value)
            or (rel_name in schema.symmetric and schema.fits(rel_name, entities[dst].kind.value, entities[src].kind.value))
        ):
            raise SchemaError(
                f"edge {src}-{rel_name}->{dst}: kinds ({entities[src].kind.value}, "
                f"{entities[dst].kind.value}) violate the schema signature"
            )
        sources = {str(s) for s in rec.get("sources") or []}
        key = (src, rel_name, dst)
        prev = relations.get(key)
        if prev is not None:
            report.merged_edges.append(list(key))
            conf = max(conf, prev.confidence)
            sources |= set(prev.sources)
        relations[key] = Relation(src, dst, rel, conf, tuple(sorted(sources)))

    graph = Graph(entities, relations, schema)
    report.duplicate_aliases = graph.gazetteer.duplicates
    kind_counts: dict[str, int] = defaultdict(int)
    for e in graph.entities.values():
        kind_counts[e.kind.value] += 1
    rel_counts: dict[str, int] = defaultdict(int)
    for r in graph.relations.values():
        rel_counts[r.rel_kind.value] += 1
    report.kind_counts = dict(sorted(kind_counts.items()))
    report.relation_counts = dict(sorted(rel_counts.items()))
    graph.quality = report
    return graph


def load_graph(path: str | Path, schema: Schema | None = None) -> Graph:
    nodes, edges = read_graph_records(path)
    return build_graph(nodes, edges, schema)


def graph_records(graph: Graph) -> tuple[list[dict], list[dict]]:
    nodes, edges = [], []
    for line in graph.serialize().decode("utf-8").splitlines():
        rec = json.loads(line)
        (nodes if rec["type"] == "node" else edges).append(rec)
    return nodes, edges


# ---------------------------------------------------------------- claims

_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_RE.split(text) if s.strip()]


def sentence_relation(sentence: str, triggers=DEFAULT_TRIGGERS) -> RelKind | None:
    try:
        terms = remove_stopwords(normalize(sentence))
    except DataError:
        return None
    return detect_relation_intent(terms, triggers) if terms else None


def extract_claims(
    text: str,
    gazetteer: Gazetteer,
    triggers: Sequence[tuple[str, RelKind]] = DEFAULT_TRIGGERS,
    schema: Schema | None = None,
) -> list[Claim]:
    """Claims asserted by ``text``, one sentence at a time.

    Every pair of distinct entities in a sentence, in order of appearance, is
    joined by the sentence's first relation trigger (ASSOCIATED_WITH when none
    fires). With a schema, a pair is oriented to fit the relation's signature
    and skipped when neither orientation fits.
    """
    claims: list[Claim] = []
    seen: set[Claim] = set()
    for sentence in split_sentences(text):
        ids: list[str] = []
        kinds: dict[str, str] = {}
        for m in gazetteer.recognize(sentence):
            if m.entity_id not in kinds:
                ids.append(m.entity_id)
                kinds[m.entity_id] = m.kind.value
        if len(ids) < 2:
            continue
        rel = sentence_relation(sentence, triggers) or RelKind.ASSOCIATED_WITH
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                a, b = ids[i], ids[j]
                if schema is not None and schema.has_signature(rel.value):
                    if schema.fits(rel.value, kinds[a], kinds[b]):
                        claim = Claim(a, rel, b)
                    elif schema.fits(rel.value, kinds[b], kinds[a]):
                        claim = Claim(b, rel, a)
                    else:
                        continue
                else:
                    claim = Claim(a, rel, b)
                if claim not in seen:
                    seen.add(claim)
                    claims.append(claim)
    return claims


def extract_relations(
    docs: Iterable,
    gazetteer: Gazetteer,
    schema: Schema | None = None,
    triggers: Sequence[tuple[str, RelKind]] = DEFAULT_TRIGGERS,
) -> list[dict]:
    """Edge records mined from sentences with two or more entity mentions.

    Confidence is min(1, sentences asserting the triple / 5); sources are the
    doc ids the triple was seen in.
    """
    if len(gazetteer) == 0:
        raise ValueError("gazetteer is empty")
    schema = schema or DEFAULT_SCHEMA
    counts: dict[Claim, int] = defaultdict(int)
    sources: dict[Claim, set[str]] = defaultdict(set)
    for doc in docs:
        for sentence in split_sentences(doc.text):
            for claim in extract_claims(sentence, gazetteer, triggers, schema):
                src, dst = _canonical(claim.src, claim.rel, claim.dst, schema)
                key = Claim(src, claim.rel, dst)
                counts[key] += 1
                sources[key].add(doc.doc_id)
    records = []
    for key in sorted(counts, key=lambda c: (c.src, c.rel.value, c.dst)):
        records.append(
            {
                "type": "edge",
                "src": key.src,
                "dst": key.dst,
                "rel": key.rel.value,
                "confidence": min(1.0, counts[key] / 5),
                "sources": sorted(sources[key]),
            }
        )
    return records


def verify_claim(graph: Graph, claim: tuple[str, RelKind | str, str]) -> Verdict:
    src, rel, dst = claim[0], RelKind(claim[1]), claim[2]
    if src not in graph or dst not in graph:
        return Verdict.UNKNOWN
    if graph.relation(src, rel, dst) is not None:
        return Verdict.SUPPORTED
    if graph.relation(src, RelKind.CONTRAINDICATED_WITH, dst) or graph.relation(
        dst, RelKind.CONTRAINDICATED_WITH, src
    ):
        return Verdict.CONTRADICTED
    if rel.value in graph.schema.functional:
        if any(r.rel_kind is rel and r.dst != dst for r in graph.out_edges(src)):
            return Verdict.CONTRADICTED
    return Verdict.UNKNOWN


# ---------------------------------------------------------------- queries

_TARGET_FOR_REL = {
    RelKind.ASSOCIATED_GENE: EntityKind.GENETIC_MARKER,
    RelKind.TREATS: EntityKind.TREATMENT,
    RelKind.HAS_SYMPTOM: EntityKind.SYMPTOM,
}


@dataclass(frozen=True)
class GraphPattern:
    anchor_entity: str
    rel_kind: RelKind | None = None
    target_kind: EntityKind | None = None
    direction: str = "both"
    max_hops: int = 1

    def __post_init__(self):
        if self.direction not in ("out", "in", "both"):
            raise ValueError(f"direction must be out|in|both, got {self.direction!r}")
        if self.max_hops not in (1, 2):
            raise ValueError("max_hops must be 1 or 2")


@dataclass(frozen=True)
class GraphHit:
    entity: Entity
    path: tuple[Relation, ...]
    accuracy: float


def translate_query(pq: ProcessedQuery, schema: Schema | None = None) -> GraphPattern:
    """Anchor on the first recognized entity; relation from the query intent.

    The target kind follows the relation (genes, treatments, symptoms). When the
    anchor already has that kind, e.g. a drug anchoring a TREATS query, the
    opposite end of the schema signature is used instead.
    """
    if not pq.entities:
        raise NoAnchorError("query mentions no known entity")
    anchor = pq.entities[0]
    rel = pq.relation_intent
    target = _TARGET_FOR_REL.get(rel) if rel is not None else None
    schema = schema or DEFAULT_SCHEMA
    if target is not None and target == anchor.kind:
        target = None
        for s, d in schema.signatures.get(rel.value, ()):
            if s == anchor.kind.value and d != "*":
                target = EntityKind(d)
                break
    return GraphPattern(anchor.entity_id, rel, target, "both", 1)


def _steps(graph: Graph, node: str, direction: str) -> list[tuple[Relation, str]]:
    steps = []
    if direction in ("out", "both"):
        steps.extend((r, r.dst) for r in graph.out_edges(node))
    if direction in ("in", "both"):
        steps.extend((r, r.src) for r in graph.in_edges(node))
    if direction != "both":
        # symmetric relations are stored once but traversable either way
        other = graph.in_edges(node) if direction == "out" else graph.out_edges(node)
        for r in other:
            if r.rel_kind.value in graph.schema.symmetric:
                steps.append((r, r.src if r.dst == node else r.dst))
    return steps


def _path_key(path: Sequence[Relation]) -> tuple:
    return tuple(r.key for r in path)


def kg_query(graph: Graph, pattern: GraphPattern, k: int = 5) -> list[GraphHit]:
    """Breadth-first expansion from the anchor up to ``max_hops``.

    Every edge on a path must match ``rel_kind`` (if set) and the end entity
    must match ``target_kind`` (if set). Each reachable entity keeps its best
    simple path: highest confidence product, then fewest hops, then smallest
    edge-key sequence. Hits are ordered by accuracy desc, entity_id asc.
    """
    if pattern.anchor_entity not in graph:
        raise UnknownEntityError(f"anchor {pattern.anchor_entity!r} is not in the graph")
    best: dict[str, tuple[float, int, tuple, tuple[Relation, ...]]] = {}
    frontier: list[tuple[str, tuple[Relation, ...], frozenset[str]]] = [
        (pattern.anchor_entity, (), frozenset([pattern.anchor_entity]))
    ]
    for _ in range(pattern.max_hops):
        nxt = []
        for node, path, visited in frontier:
            for rel, other in _steps(graph, node, pattern.direction):
                if other in visited:
                    continue
                if pattern.rel_kind is not None and rel.rel_kind is not pattern.rel_kind:
                    continue
                new_path = path + (rel,)
                nxt.append((other, new_path, visited | {other}))
                if pattern.target_kind is not None and graph.entities[other].kind is not pattern.target_kind:
                    continue
                acc = math.prod(r.confidence for r in new_path)
                cand = (acc, len(new_path), _path_key(new_path), new_path)
                held = best.get(other)
                if held is None or (-cand[0], cand[1], cand[2]) < (-held[0], held[1], held[2]):
                    best[other] = cand
        frontier = nxt
    hits = [GraphHit(graph.entities[eid], v[3], v[0]) for eid, v in best.items()]
    hits.sort(key=lambda h: (-h.accuracy, h.entity.entity_id))
    return hits[:k]


# ---------------------------------------------------------------- verbalization

_TEMPLATES = {
    RelKind.TREATS: "{src} treats {dst}.",
    RelKind.HAS_SYMPTOM: "{dst} is a symptom of {src}.",
    RelKind.ASSOCIATED_GENE: "{src} is linked to the genetic marker {dst}.",
    RelKind.INTERACTS_WITH: "{src} interacts with {dst}.",
    RelKind.CONTRAINDICATED_WITH: "{src} is contraindicated in {dst}.",
    RelKind.ASSOCIATED_WITH: "{src} is associated with {dst}.",
}


def verbalize(relation: Relation, graph: Graph) -> str:
    text = _TEMPLATES[relation.rel_kind].format(
        src=graph.entities[relation.src].label, dst=graph.entities[relation.dst].label
    )
    return text[0].upper() + text[1:]


def hit_text(hit: GraphHit, graph: Graph) -> str:
    return " ".join(verbalize(r, graph) for r in hit.path)
