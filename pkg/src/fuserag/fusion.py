"""Score fusion of vector and graph evidence: filtering, context matching,
fact-checked decision fusion and weighted voting."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import IO, Mapping, Sequence

from .errors import ConfigError
from .kg import Claim, Graph, GraphHit, Verdict, extract_claims, hit_text, verify_claim
from .query import Gazetteer, ProcessedQuery
from .vector_store import Chunk, VectorHit

FILTERED = "filtered"
CONTRADICTED = "contradicted"
CROSS_VERIFIED = "cross_verified"


@dataclass(frozen=True)
class FusionConfig:
    w1: float = 0.4
    w2: float = 0.4
    w3: float = 0.2
    tau_vector: float = 0.25
    tau_graph: float = 0.30
    k_final: int = 6

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3)
        if any(w < 0 for w in ws) or abs(sum(ws) - 1.0) > 1e-9:
            raise ConfigError(f"fusion weights must be non-negative and sum to 1, got {ws}")
        for name in ("tau_vector", "tau_graph"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.k_final < 1:
            raise ConfigError("k_final must be >= 1")

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)

    def with_weights(self, w1: float, w2: float, w3: float) -> "FusionConfig":
        return replace(self, w1=w1, w2=w2, w3=w3)


WEIGHT_PRESETS: dict[str, tuple[float, float, float]] = {
    "default": (0.4, 0.4, 0.2),
    "vector-heavy": (0.6, 0.2, 0.2),
    "graph-heavy": (0.2, 0.6, 0.2),
    "vector-only": (1.0, 0.0, 0.0),
    "graph-only": (0.0, 1.0, 0.0),
}


@dataclass(frozen=True)
class Candidate:
    id: str
    source: str
    text: str
    s_vector: float | None = None
    s_graph: float | None = None
    s_context: float = 0.0
    fused_score: float = 0.0
    flags: frozenset[str] = frozenset()
    doc_id: str | None = None
    # graph triples this candidate stands for (graph source) or ids merged into it
    triples: tuple[tuple[str, str, str], ...] = ()
    linked: tuple[str, ...] = ()

    @property
    def provenance(self) -> tuple[str, ...]:
        return (self.id,) + self.linked

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "doc_id": self.doc_id,
            "s_vector": self.s_vector,
            "s_graph": self.s_graph,
            "s_context": self.s_context,
            "fused_score": self.fused_score,
            "flags": sorted(self.flags),
            "linked": list(self.linked),
            "text": self.text,
        }


@dataclass(frozen=True)
class FusedContext:
    candidates: tuple[Candidate, ...]
    query: ProcessedQuery | None
    provenance_summary: dict = field(default_factory=dict)
    dropped: tuple[tuple[str, Candidate], ...] = ()

    def audit_records(self) -> list[dict]:
        out = []
        for rank, c in enumerate(self.candidates, start=1):
            out.append({"status": "kept", "rank": rank, **c.to_record()})
        for reason, c in self.dropped:
            out.append({"status": reason, "rank": None, **c.to_record()})
        return out

    def to_json_lines(self) -> str:
        return "".join(
            json.dumps(r, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n"
            for r in self.audit_records()
        )

    def write_audit(self, fh: IO[str]) -> None:
        fh.write(self.to_json_lines())


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def candidates_from_vector(hits: Sequence[VectorHit], chunks: Mapping[str, Chunk]) -> list[Candidate]:
    out = []
    for h in hits:
        chunk = chunks[h.chunk_id]
        out.append(Candidate(h.chunk_id, "vector", chunk.text, s_vector=_clip01(h.score), doc_id=chunk.doc_id))
    return out


def candidates_from_graph(hits: Sequence[GraphHit], graph: Graph) -> list[Candidate]:
    return [
        Candidate(
            h.entity.entity_id,
            "graph",
            hit_text(h, graph),
            s_graph=_clip01(h.accuracy),
            triples=tuple(r.key for r in h.path),
        )
        for h in hits
    ]


def prefilter(
    cands: Sequence[Candidate], cfg: FusionConfig, audit: list | None = None
) -> list[Candidate]:
    """Drop vector candidates under ``tau_vector`` and graph candidates under ``tau_graph``."""
    kept = []
    for c in cands:
        low = (c.s_vector is not None and c.source == "vector" and c.s_vector < cfg.tau_vector) or (
            c.s_graph is not None and c.source == "graph" and c.s_graph < cfg.tau_graph
        )
        if low:
            if audit is not None:
                audit.append((FILTERED, replace(c, flags=c.flags | {FILTERED})))
        else:
            kept.append(c)
    return kept


def context_score(cand: Candidate, pq: ProcessedQuery, gazetteer: Gazetteer | None) -> float:
    """Jaccard overlap of query entities and entities mentioned in the candidate."""
    query_ids = pq.entity_ids
    if not query_ids or gazetteer is None:
        return 0.0
    cand_ids = gazetteer.entity_ids(cand.text)
    return len(query_ids & cand_ids) / len(query_ids | cand_ids)


def fuse_score(cand: Candidate, cfg: FusionConfig) -> float:
    """Weighted vote; absent component scores count as zero."""
    score = (
        cfg.w1 * (cand.s_vector or 0.0)
        + cfg.w2 * (cand.s_graph or 0.0)
        + cfg.w3 * cand.s_context
    )
    return _clip01(score)


def _canonical_key(claim: Claim, graph: Graph) -> tuple[str, str, str]:
    rel = graph.relation(claim.src, claim.rel, claim.dst)
    return rel.key if rel is not None else (claim.src, claim.rel.value, claim.dst)


def decision_fuse(
    vec_top: Sequence[Candidate],
    graph_top: Sequence[Candidate],
    graph: Graph,
    audit: list | None = None,
) -> list[Candidate]:
    """Cross-verify vector evidence against the graph and merge complementary hits.

    A vector candidate with any contradicted claim is removed. One with a
    supported claim is flagged cross_verified, and a graph candidate whose
    triple it asserts is folded into it (both source scores kept, max context).
    """
    gaz = graph.gazetteer
    verified: list[Candidate] = []
    supported_keys: dict[str, set[tuple[str, str, str]]] = {}
    for c in vec_top:
        verdicts = [(cl, verify_claim(graph, cl)) for cl in extract_claims(c.text, gaz, schema=graph.schema)]
        if any(v is Verdict.CONTRADICTED for _, v in verdicts):
            if audit is not None:
                audit.append((CONTRADICTED, replace(c, flags=c.flags | {CONTRADICTED})))
            continue
        keys = {_canonical_key(cl, graph) for cl, v in verdicts if v is Verdict.SUPPORTED}
        if keys:
            c = replace(c, flags=c.flags | {CROSS_VERIFIED})
        supported_keys[c.id] = keys
        verified.append(c)

    by_id = {c.id: c for c in verified}
    remaining_graph: list[Candidate] = []
    for g in graph_top:
        matches = [c for c in verified if supported_keys[c.id] & set(g.triples)]
        if not matches:
            remaining_graph.append(g)
            continue
        target = min(matches, key=lambda c: (-(c.s_vector or 0.0), c.id))
        cur = by_id[target.id]
        by_id[target.id] = replace(
            cur,
            s_graph=max(cur.s_graph or 0.0, g.s_graph or 0.0),
            s_context=max(cur.s_context, g.s_context),
            linked=cur.linked + (g.id,),
        )
        if audit is not None:
            audit.append((f"merged:{target.id}", g))
    return [by_id[c.id] for c in verified] + remaining_graph


def _summary(cands: Sequence[Candidate], dropped: Sequence[tuple[str, Candidate]]) -> dict:
    sources = {"vector": 0, "graph": 0}
    flags = {CROSS_VERIFIED: 0, CONTRADICTED: 0, FILTERED: 0}
    for c in cands:
        sources[c.source] = sources.get(c.source, 0) + 1
    for c in list(cands) + [d for _, d in dropped]:
        for f in c.flags:
            flags[f] = flags.get(f, 0) + 1
    merged = sum(len(c.linked) for c in cands)
    return {"sources": sources, "flags": flags, "merged": merged}


def fuse_candidates(
    vec_cands: Sequence[Candidate],
    graph_cands: Sequence[Candidate],
    pq: ProcessedQuery | None,
    cfg: FusionConfig,
    graph: Graph | None = None,
    fact_check: bool = True,
) -> FusedContext:
    """prefilter -> context score -> decision fusion -> weighted vote -> sort -> dedup -> truncate."""
    audit: list[tuple[str, Candidate]] = []
    vec = prefilter(vec_cands, cfg, audit)
    gra = prefilter(graph_cands, cfg, audit)
    gaz = graph.gazetteer if graph is not None else None
    if pq is not None:
        vec = [replace(c, s_context=context_score(c, pq, gaz)) for c in vec]
        gra = [replace(c, s_context=context_score(c, pq, gaz)) for c in gra]
    if fact_check and graph is not None:
        merged = decision_fuse(vec, gra, graph, audit)
    else:
        merged = list(vec) + list(gra)
    scored = [replace(c, fused_score=fuse_score(c, cfg)) for c in merged]
    scored.sort(key=lambda c: (-c.fused_score, c.id))
    final: list[Candidate] = []
    seen_docs: set[str] = set()
    for c in scored:
        if c.doc_id is not None:
            if c.doc_id in seen_docs:
                audit.append(("duplicate_doc", c))
                continue
            seen_docs.add(c.doc_id)
        final.append(c)
    kept = final[: cfg.k_final]
    dropped = tuple(audit) + tuple(("truncated", c) for c in final[cfg.k_final :])
    return FusedContext(tuple(kept), pq, _summary(kept, dropped), dropped)


def fuse(
    vec_hits: Sequence[VectorHit],
    graph_hits: Sequence[GraphHit],
    pq: ProcessedQuery | None,
    cfg: FusionConfig,
    *,
    chunks: Mapping[str, Chunk] | None = None,
    graph: Graph | None = None,
    fact_check: bool = True,
) -> FusedContext:
    if vec_hits and chunks is None:
        raise ValueError("chunk texts are required to fuse vector hits")
    if graph_hits and graph is None:
        raise ValueError("the graph is required to fuse graph hits")
    vec = candidates_from_vector(vec_hits, chunks or {})
    gra = candidates_from_graph(graph_hits, graph) if graph_hits else []
    return fuse_candidates(vec, gra, pq, cfg, graph, fact_check)

