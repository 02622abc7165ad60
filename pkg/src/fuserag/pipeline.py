"""End-to-end orchestration: artifact building, loading and per-query runs."""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
import warnings
from collections import OrderedDict
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

from filelock import FileLock, Timeout

from . import __version__
from .config import PipelineConfig
from .embedding import embed
from .errors import (
    ConfigError,
    DataError,
    FingerprintMismatchError,
    FingerprintMismatchWarning,
    NoAnchorError,
)
from .fusion import WEIGHT_PRESETS, FusedContext, FusionConfig, fuse
from .generation import (
    GeneratedResponse,
    GeneratorAdapter,
    HttpGenerator,
    TemplateGenerator,
    assemble_prompt,
    generate,
)
from .kg import (
    Graph,
    Verdict,
    build_graph,
    extract_relations,
    kg_query,
    load_graph,
    load_schema,
    read_graph_records,
    translate_query,
    verify_claim,
)
from .query import RawQuery, process_query
from .vector_store import (
    Chunk,
    VectorIndex,
    build_index,
    chunk_corpus,
    load_index,
    read_chunks,
    read_corpus,
    save_index,
    search,
    write_chunks,
)

log = logging.getLogger(__name__)

# in-memory audits kept per pipeline when no audit directory is configured
AUDIT_MEMORY_CAP = 1024

# variant -> (use_vector, use_graph, weight preset or None for the configured weights)
VARIANTS: dict[str, tuple[bool, bool, str | None]] = {
    "ensemble": (True, True, None),
    "vector-only": (True, False, "vector-only"),
    "graph-only": (False, True, "graph-only"),
    "vector-heavy": (True, True, "vector-heavy"),
    "graph-heavy": (True, True, "graph-heavy"),
}


def variant_settings(variant: str, base: FusionConfig) -> tuple[bool, bool, FusionConfig]:
    try:
        use_vector, use_graph, preset = VARIANTS[variant]
    except KeyError:
        raise ConfigError(f"unknown variant {variant!r}; choose from {sorted(VARIANTS)}") from None
    cfg = base if preset is None else base.with_weights(*WEIGHT_PRESETS[preset])
    return use_vector, use_graph, cfg


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _read_manifest(path: Path) -> dict:
    if not path.exists():
        return {}
    try:
        return json.loads(path.read_text("utf-8"))
    except ValueError as exc:
        raise DataError(f"{path}: corrupt manifest ({exc})") from None


def _write_manifest(path: Path, manifest: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    tmp.replace(path)


@contextmanager
def artifact_lock(config: PipelineConfig, timeout: float = 30.0):
    """Exclusive lock over the artifact directory for ingestion commands."""
    config.paths.artifacts.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(config.paths.lock))
    try:
        with lock.acquire(timeout=timeout):
            yield
    except Timeout:
        raise DataError(f"artifact directory {config.paths.artifacts} is locked by another process") from None


@dataclass(frozen=True)
class IngestResult:
    index_path: Path
    chunk_count: int
    fingerprint: str


def ingest(config: PipelineConfig, corpus_path: Path | None = None) -> IngestResult:
    corpus_path = corpus_path or config.paths.corpus
    with artifact_lock(config):
        docs = read_corpus(corpus_path)
        chunks = chunk_corpus(docs, config.max_chunk_chars, config.overlap_chars)
        index = build_index(chunks, config.embedder)
        config.paths.index.parent.mkdir(parents=True, exist_ok=True)
        save_index(index, config.paths.index)
        write_chunks(chunks, config.paths.chunks)
        manifest = _read_manifest(config.paths.manifest)
        manifest["index"] = {
            "path": str(config.paths.index),
            "embedder_fingerprint": index.fingerprint.hex(),
            "count": len(index),
            "chunks_sha256": _sha256_file(config.paths.chunks),
            "max_chunk_chars": config.max_chunk_chars,
            "overlap_chars": config.overlap_chars,
        }
        _write_manifest(config.paths.manifest, manifest)
    log.info("indexed %d chunks from %s", len(index), corpus_path)
    return IngestResult(config.paths.index, len(index), index.fingerprint.hex())


@dataclass(frozen=True)
class BuildKgResult:
    graph: Graph
    graph_path: Path
    report_path: Path
    extracted_edges: int


def build_kg(
    config: PipelineConfig,
    graph_path: Path | None = None,
    schema_path: Path | None = None,
    corpus_path: Path | None = None,
) -> BuildKgResult:
    """Build the canonical graph (optionally adding corpus-mined relations) plus its quality report."""
    graph_path = graph_path or config.paths.graph
    schema_path = schema_path or config.paths.schema
    with artifact_lock(config):
        schema = load_schema(schema_path)
        nodes, edges = read_graph_records(graph_path)
        base = build_graph(nodes, edges, schema)
        conflicts: list[list[str]] = []
        added = 0
        if corpus_path is not None:
            mined = extract_relations(read_corpus(corpus_path), base.gazetteer, schema)
            kept = []
            for rec in mined:
                if verify_claim(base, (rec["src"], rec["rel"], rec["dst"])) is Verdict.CONTRADICTED:
                    conflicts.append([rec["src"], rec["rel"], rec["dst"]])
                else:
                    kept.append(rec)
            graph = build_graph(nodes, edges + kept, schema)
            added = len(graph.relations) - len(base.relations)
            graph.quality.extraction_conflicts = conflicts
        else:
            graph = base
        config.paths.kg.parent.mkdir(parents=True, exist_ok=True)
        graph.save(config.paths.kg)
        report = graph.quality.to_dict()
        report["entity_count"] = len(graph.entities)
        report["edge_count"] = len(graph.relations)
        report["extracted_edges_added"] = added
        config.paths.quality_report.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", "utf-8")
        manifest = _read_manifest(config.paths.manifest)
        manifest["graph"] = {
            "path": str(config.paths.kg),
            "sha256": graph.fingerprint(),
            "schema_sha256": _sha256_file(Path(schema_path)),
        }
        _write_manifest(config.paths.manifest, manifest)
    return BuildKgResult(graph, config.paths.kg, config.paths.quality_report, added)


@dataclass
class QueryResult:
    query_id: str
    question: str
    response: GeneratedResponse
    provenance: tuple[str, ...]
    audit_ref: str
    timing: dict[str, float]
    context: FusedContext = field(repr=False, default=None)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "query_id": self.query_id,
            "question": self.question,
            "answer": self.response.text,
            "response": self.response.to_dict(),
            "provenance": list(self.provenance),
            "audit_ref": self.audit_ref,
            "provenance_summary": self.context.provenance_summary if self.context else {},
        }
        if include_timing:
            out["timing_ms"] = self.timing
        return out


def query_id_for(question: str) -> str:
    return "q-" + hashlib.sha1(question.strip().encode("utf-8")).hexdigest()[:12]


def make_adapter(config: PipelineConfig) -> GeneratorAdapter:
    g = config.generator
    if g.kind == "template":
        return TemplateGenerator()
    return HttpGenerator(
        g.endpoint,
        timeout=g.timeout,
        max_response_chars=g.max_response_chars,
        model_name=g.model_name,
        max_parallel=g.max_parallel,
    )


class _Stopwatch:
    def __init__(self):
        self.stages: dict[str, float] = {}
        self._t0 = self._last = time.perf_counter()

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.stages[name] = self.stages.get(name, 0.0) + (now - self._last) * 1000.0
        self._last = now

    def total(self) -> float:
        return (self._last - self._t0) * 1000.0


class Pipeline:
    """Loaded, immutable artifacts plus a generator adapter. Safe to share across threads."""

    def __init__(
        self,
        config: PipelineConfig,
        index: VectorIndex,
        chunks: dict[str, Chunk],
        graph: Graph,
        adapter: GeneratorAdapter | None = None,
        audit_dir: Path | None = None,
    ):
        self.config = config
        self.index = index
        self.chunks = chunks
        self.graph = graph
        self.adapter = adapter or make_adapter(config)
        self.audit_dir = audit_dir
        self._audit_mem: OrderedDict[str, str] = OrderedDict()
        self._audit_lock = threading.Lock()
        cap = self.adapter.max_parallel if getattr(self.adapter, "concurrency_safe", True) else 1
        self._gen_slots = threading.BoundedSemaphore(max(1, cap))

    @classmethod
    def load(cls, config: PipelineConfig, adapter: GeneratorAdapter | None = None, audit: bool = False) -> "Pipeline":
        """Load index, chunk texts and graph, refusing artifacts that do not match the config."""
        paths = config.paths
        for p, what in ((paths.index, "index"), (paths.chunks, "chunk store"), (paths.kg, "graph")):
            if not p.exists():
                raise DataError(f"missing {what} artifact {p}; run ingest/build-kg first")
        with warnings.catch_warnings():
            warnings.simplefilter("error", FingerprintMismatchWarning)
            try:
                index = load_index(paths.index, config.embedder)
            except FingerprintMismatchWarning as w:
                raise FingerprintMismatchError(str(w)) from None
        manifest = _read_manifest(paths.manifest)
        chunks = read_chunks(paths.chunks)
        if "index" in manifest and manifest["index"].get("chunks_sha256") != _sha256_file(paths.chunks):
            raise FingerprintMismatchError(f"{paths.chunks} does not match the manifest")
        missing = [cid for cid in index.ids if cid not in chunks]
        if missing:
            raise DataError(f"chunk store lacks {len(missing)} indexed ids, e.g. {missing[0]!r}")
        schema = load_schema(paths.schema)
        graph = load_graph(paths.kg, schema)
        if "graph" in manifest and manifest["graph"].get("sha256") != graph.fingerprint():
            raise FingerprintMismatchError(f"{paths.kg} does not match the manifest")
        return cls(config, index, chunks, graph, adapter, paths.audit_dir if audit else None)

    def fingerprints(self) -> dict[str, str]:
        return {
            "embedder": self.config.embedder.fingerprint().hex(),
            "index": self.index.fingerprint.hex(),
            "graph": self.graph.fingerprint(),
            "version": __version__,
        }

    def retrieve(
        self,
        question: str,
        *,
        use_vector: bool = True,
        use_graph: bool = True,
        fusion: FusionConfig | None = None,
        watch: _Stopwatch | None = None,
    ) -> FusedContext:
        watch = watch or _Stopwatch()
        cfg = fusion or self.config.fusion
        pq = process_query(RawQuery(question, query_id_for(question)), self.graph.gazetteer)
        watch.lap("process")
        vec_hits = []
        if use_vector:
            qv = embed(question, self.config.embedder)
            watch.lap("embed")
            vec_hits = search(self.index, qv, self.config.k_vector)
            watch.lap("vector_search")
        graph_hits = []
        if use_graph:
            try:
                pattern = translate_query(pq, self.graph.schema)
                graph_hits = kg_query(self.graph, pattern, self.config.k_graph)
            except NoAnchorError:
                log.debug("no anchor entity in %r; graph retrieval skipped", question)
            watch.lap("graph_query")
        ctx = fuse(
            vec_hits,
            graph_hits,
            pq,
            cfg,
            chunks=self.chunks,
            graph=self.graph,
            fact_check=use_graph,
        )
        watch.lap("fusion")
        return ctx

    def run(
        self,
        question: str,
        *,
        use_vector: bool = True,
        use_graph: bool = True,
        fusion: FusionConfig | None = None,
        adapter: GeneratorAdapter | None = None,
    ) -> QueryResult:
        watch = _Stopwatch()
        ctx = self.retrieve(question, use_vector=use_vector, use_graph=use_graph, fusion=fusion, watch=watch)
        prompt = assemble_prompt(ctx, question, self.config.generator.evidence_budget)
        watch.lap("prompt")
        with self._gen_slots:
            response = generate(prompt, adapter or self.adapter)
        watch.lap("generate")
        qid = query_id_for(question)
        timing = {k: round(v, 3) for k, v in watch.stages.items()}
        timing["total"] = round(watch.total(), 3)
        provenance = tuple(i for c in ctx.candidates for i in c.provenance)
        ref = self._store_audit(qid, ctx)
        return QueryResult(qid, question, response, provenance, ref, timing, ctx)

    def run_variant(self, question: str, variant: str, adapter: GeneratorAdapter | None = None) -> QueryResult:
        use_vector, use_graph, cfg = variant_settings(variant, self.config.fusion)
        return self.run(question, use_vector=use_vector, use_graph=use_graph, fusion=cfg, adapter=adapter)

    def _store_audit(self, qid: str, ctx: FusedContext) -> str:
        lines = ctx.to_json_lines()
        if self.audit_dir is None:
            with self._audit_lock:
                self._audit_mem[qid] = lines
                self._audit_mem.move_to_end(qid)
                while len(self._audit_mem) > AUDIT_MEMORY_CAP:
                    self._audit_mem.popitem(last=False)
            return f"memory:{qid}"
        self.audit_dir.mkdir(parents=True, exist_ok=True)
        path = self.audit_dir / f"{qid}.jsonl"
        path.write_text(lines, "utf-8")
        return str(path)

    def audit(self, ref: str) -> str:
        """Fusion audit lines for a result's ``audit_ref``."""
        if ref.startswith("memory:"):
            with self._audit_lock:
                try:
                    return self._audit_mem[ref[len("memory:") :]]
                except KeyError:
                    raise DataError(f"audit {ref} has been evicted or never existed") from None
        return Path(ref).read_text("utf-8")


def with_fusion(config: PipelineConfig, fusion: FusionConfig) -> PipelineConfig:
    return replace(config, fusion=fusion)
