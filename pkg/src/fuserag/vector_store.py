"""Document chunking and an exact, file-persisted cosine-similarity index."""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import EmbedderSpec, EmbeddingVector, HttpEmbedder, embed_batch
from .errors import (
    DataError,
    DimensionMismatchError,
    DuplicateIdError,
    EmptyIndexError,
    FingerprintMismatchError,
    FingerprintMismatchWarning,
    FormatError,
    RecordError,
)

MAGIC = b"FRVI"
FORMAT_VERSION = 1
DEFAULT_MAX_CHUNK_CHARS = 1000
DEFAULT_OVERLAP_CHARS = 100
NORM_TOLERANCE = 1e-6
_SCORE_BLOCK = 2048  # rows scored per temporary buffer


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.doc_id:
            raise DataError("document id must be non-empty")
        if not self.text or not self.text.strip():
            raise DataError(f"document {self.doc_id!r} has empty text")


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    text: str
    char_range: tuple[int, int]


def read_corpus(path: str | Path) -> list[Document]:
    """Parse a JSONL corpus: {"doc_id", "text", "metadata"} per line.

    Raises RecordError naming the offending line, and DataError for an empty
    corpus or duplicate doc ids.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                meta = rec.get("metadata") or {}
                if not isinstance(meta, dict):
                    raise ValueError("metadata must be an object")
                doc = Document(str(rec["doc_id"]), rec["text"], {str(k): str(v) for k, v in meta.items()})
            except (ValueError, KeyError, TypeError, AttributeError, DataError) as exc:
                raise RecordError(path, line_no, f"malformed corpus record ({exc})") from None
            if doc.doc_id in seen:
                raise RecordError(path, line_no, f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)
            docs.append(doc)
    if not docs:
        raise DataError(f"{path}: empty corpus")
    return docs


def _sentence_cut(text: str, limit: int, floor: int) -> int | None:
    """Last position p in (floor, limit] such that text[p-2] is .!? and text[p-1] a space."""
    for p in range(limit, floor, -1):
        if p >= 2 and text[p - 1] == " " and text[p - 2] in ".!?":
            return p
    return None


def chunk_document(
    doc: Document,
    max_chunk_chars: int = DEFAULT_MAX_CHUNK_CHARS,
    overlap_chars: int = DEFAULT_OVERLAP_CHARS,
) -> list[Chunk]:
    """Greedy windows of at most ``max_chunk_chars``, cut after a sentence end when one fits.

    Consecutive chunks share exactly ``overlap_chars`` characters, so
    ``chunks[0].text + "".join(c.text[overlap_chars:] for c in chunks[1:])``
    reconstructs the document.
    """
    if not 0 <= overlap_chars < max_chunk_chars:
        raise ValueError("need 0 <= overlap_chars < max_chunk_chars")
    text = doc.text
    chunks: list[Chunk] = []
    start = 0
    while True:
        if len(text) - start <= max_chunk_chars:
            end = len(text)
        else:
            limit = start + max_chunk_chars
            end = _sentence_cut(text, limit, start + overlap_chars) or limit
        chunks.append(Chunk(f"{doc.doc_id}#{len(chunks)}", doc.doc_id, text[start:end], (start, end)))
        if end == len(text):
            return chunks
        start = end - overlap_chars


def chunk_corpus(
    docs: Iterable[Document],
    max_chunk_chars: int = DEFAULT_MAX_CHUNK_CHARS,
    overlap_chars: int = DEFAULT_OVERLAP_CHARS,
) -> list[Chunk]:
    return [c for d in docs for c in chunk_document(d, max_chunk_chars, overlap_chars)]


def write_chunks(chunks: Sequence[Chunk], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in chunks:
            rec = {"chunk_id": c.chunk_id, "doc_id": c.doc_id, "text": c.text, "char_range": list(c.char_range)}
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def read_chunks(path: str | Path) -> dict[str, Chunk]:
    out: dict[str, Chunk] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                c = Chunk(rec["chunk_id"], rec["doc_id"], rec["text"], tuple(rec["char_range"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise RecordError(path, line_no, f"malformed chunk record ({exc})") from None
            out[c.chunk_id] = c
    return out


@dataclass(frozen=True)
class VectorHit:
    chunk_id: str
    score: float
    rank: int


class VectorIndex:
    """Immutable exact index over unit-norm float32 vectors.

    Scores are dot products computed in float64; with unit-norm rows and
    queries this is the cosine similarity.
    """

    def __init__(self, ids: Sequence[str], matrix: np.ndarray, fingerprint: bytes):
        matrix = np.ascontiguousarray(matrix, dtype=np.float32)
        if matrix.ndim != 2 or matrix.shape[0] != len(ids):
            raise DimensionMismatchError("matrix shape does not match id count")
        if len(fingerprint) != 32:
            raise FormatError("fingerprint must be 32 bytes")
        seen: set[str] = set()
        for cid in ids:
            if cid in seen:
                raise DuplicateIdError(cid, "chunk_id")
            seen.add(cid)
        if len(ids):
            norms = np.sqrt(np.einsum("ij,ij->i", matrix.astype(np.float64), matrix.astype(np.float64)))
            bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOLERANCE)
            if bad.size:
                raise DataError(f"entry {ids[bad[0]]!r} is not unit-norm (|v|={norms[bad[0]]:.8f})")
        self.ids: tuple[str, ...] = tuple(ids)
        self.fingerprint = bytes(fingerprint)
        self.fingerprint_mismatch = False
        self._matrix = matrix
        self._matrix.setflags(write=False)
        self._mat64 = matrix.astype(np.float64)
        # position of each entry in ascending chunk_id order, used as the tie-break key
        order = sorted(range(len(ids)), key=lambda i: ids[i])
        self._id_rank = np.empty(len(ids), dtype=np.int64)
        self._id_rank[order] = np.arange(len(ids))

    @property
    def dim(self) -> int:
        return int(self._matrix.shape[1])

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __len__(self) -> int:
        return len(self.ids)

    def vector(self, chunk_id: str) -> EmbeddingVector:
        return EmbeddingVector(self._mat64[self.ids.index(chunk_id)])

    def scores(self, query: np.ndarray) -> np.ndarray:
        # Row-local multiply-and-sum rather than a BLAS matvec: BLAS may sum a
        # row in an order that depends on its position, so identical vectors
        # could score an ulp apart and break exact ties.
        out = np.empty(len(self.ids), dtype=np.float64)
        for start in range(0, len(out), _SCORE_BLOCK):
            block = self._mat64[start : start + _SCORE_BLOCK]
            np.sum(block * query, axis=1, out=out[start : start + _SCORE_BLOCK])
        return out


def build_index(
    chunks: Sequence[Chunk], spec: EmbedderSpec, client: HttpEmbedder | None = None
) -> VectorIndex:
    if not chunks:
        raise EmptyIndexError("cannot build an index from zero chunks")
    seen: set[str] = set()
    for c in chunks:
        if c.chunk_id in seen:
            raise DuplicateIdError(c.chunk_id, "chunk_id")
        seen.add(c.chunk_id)
    vectors = embed_batch([c.text for c in chunks], spec, client)
    matrix = np.stack([v.values for v in vectors]).astype(np.float32)
    # float32 storage drifts the norm by ~1e-8; renormalize in float64 then cast
    matrix = (matrix / np.linalg.norm(matrix.astype(np.float64), axis=1, keepdims=True)).astype(np.float32)
    return VectorIndex([c.chunk_id for c in chunks], matrix, spec.fingerprint())


def search(index: VectorIndex, query_vec: EmbeddingVector | np.ndarray, k: int = 5) -> list[VectorHit]:
    """Exact top-k by cosine; ties broken by ascending chunk_id."""
    if index.fingerprint_mismatch:
        raise FingerprintMismatchError("index was built with a different embedder than the one configured")
    q = query_vec.values if isinstance(query_vec, EmbeddingVector) else np.asarray(query_vec, dtype=np.float64)
    if q.shape != (index.dim,):
        raise DimensionMismatchError(f"query dim {q.shape[-1] if q.ndim else 0} != index dim {index.dim}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        raise EmptyIndexError("index is empty")
    norm = float(np.sqrt(q @ q))
    if norm == 0.0:
        raise DataError("query vector has zero norm")
    scores = index.scores(q / norm)
    order = np.lexsort((index._id_rank, -scores))[:k]
    return [VectorHit(index.ids[i], float(scores[i]), r) for r, i in enumerate(order, start=1)]


_HEADER = struct.Struct("<4sIIQ32s")
_IDLEN = struct.Struct("<H")


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Binary little-endian layout: magic, version u32, dim u32, count u64,
    fingerprint[32], then per entry: id length u16, UTF-8 id, dim x f32."""
    rows = index.matrix.astype("<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, index.dim, len(index), index.fingerprint))
        for cid, row in zip(index.ids, rows):
            raw = cid.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise DataError(f"chunk id too long: {cid[:40]!r}...")
            fh.write(_IDLEN.pack(len(raw)))
            fh.write(raw)
            fh.write(row.tobytes())


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError("truncated index file")
    return data


def load_index(path: str | Path, expected: EmbedderSpec | None = None) -> VectorIndex:
    """Load an index file. If ``expected`` is given and its fingerprint differs,
    a FingerprintMismatchWarning is issued and later searches raise."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size or head[:4] != MAGIC:
            raise FormatError(f"{path}: not an index file (bad magic)")
        _, version, dim, count, fingerprint = _HEADER.unpack(head)
        if version != FORMAT_VERSION:
            raise FormatError(f"{path}: unsupported index format version {version}")
        ids = []
        matrix = np.empty((count, dim), dtype=np.float32)
        for i in range(count):
            (n,) = _IDLEN.unpack(_read_exact(fh, _IDLEN.size))
            ids.append(_read_exact(fh, n).decode("utf-8"))
            matrix[i] = np.frombuffer(_read_exact(fh, 4 * dim), dtype="<f4")
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after last entry")
    index = VectorIndex(ids, matrix, fingerprint)
    if expected is not None and expected.fingerprint() != fingerprint:
        index.fingerprint_mismatch = True
        warnings.warn(
            f"{path}: index fingerprint {fingerprint.hex()[:12]} does not match "
            f"configured embedder {expected.fingerprint().hex()[:12]}",
            FingerprintMismatchWarning,
            stacklevel=2,
        )
    return index

