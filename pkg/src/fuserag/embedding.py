"""Text embedding: a deterministic feature-hashing embedder and an HTTP adapter."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import httpx
import numpy as np

from .errors import (
    BatchEmbeddingError,
    ConfigError,
    DataError,
    DimensionMismatchError,
    ResponseSchemaError,
    TransportError,
)
from .query import DEFAULT_STOPWORDS, STEMMER_ID, normalize, remove_stopwords

log = logging.getLogger(__name__)

HASH_VERSION = 1
DEFAULT_DIM = 384
_BUCKET_PERSON = b"fuserag.bkt.v1"
_SIGN_PERSON = b"fuserag.sgn.v1"


@dataclass(frozen=True)
class EmbedderSpec:
    kind: str = "builtin-hash"
    dim: int = DEFAULT_DIM
    endpoint: str | None = None
    model_name: str | None = None
    timeout: float = 30.0
    batch_size: int = 64
    max_parallel: int = 4
    max_retries: int = 3

    def __post_init__(self):
        if self.kind not in ("builtin-hash", "external"):
            raise ConfigError(f"unknown embedder kind {self.kind!r}")
        if self.dim < 8:
            raise ConfigError(f"embedding dim must be >= 8, got {self.dim}")
        if (self.kind == "external") != (self.endpoint is not None):
            raise ConfigError("endpoint must be set iff kind == 'external'")

    def fingerprint(self) -> bytes:
        """32-byte digest of everything that changes the vectors this spec produces."""
        ident = {"kind": self.kind, "dim": self.dim, "model": self.model_name}
        if self.kind == "builtin-hash":
            ident["hash_version"] = HASH_VERSION
            ident["stemmer"] = STEMMER_ID
            ident["stopwords"] = hashlib.sha256("\n".join(sorted(DEFAULT_STOPWORDS)).encode()).hexdigest()
        blob = json.dumps(ident, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).digest()


def features(text: str) -> list[str]:
    """Unigram and adjacent-bigram features over normalized, stop-word-filtered tokens.

    Falls back to the unfiltered tokens when every token is a stop word.
    """
    tokens = normalize(text)
    kept = remove_stopwords(tokens) or tokens
    feats = [f"u:{t}" for t in kept]
    feats.extend(f"b:{a} {b}" for a, b in zip(kept, kept[1:]))
    return feats


def _bucket(feature: str, dim: int) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8, person=_BUCKET_PERSON).digest()
    return int.from_bytes(digest, "little") % dim


def _sign(feature: str) -> float:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=1, person=_SIGN_PERSON).digest()
    return 1.0 if digest[0] & 1 else -1.0


def hashed_counts(text: str, dim: int) -> np.ndarray:
    """Signed bucket counts before normalization."""
    out = np.zeros(dim, dtype=np.float64)
    for feat in features(text):
        out[_bucket(feat, dim)] += _sign(feat)
    return out


def _unit(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise DataError("embedding contains non-finite values")
    norm = float(np.sqrt(np.dot(values, values)))
    if norm == 0.0:
        # every feature cancelled out; fall back to a fixed unit vector
        values = np.zeros_like(values)
        values[0] = 1.0
        return values
    return values / norm


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise DimensionMismatchError("embedding must be a non-empty 1-d vector")
        if not np.all(np.isfinite(arr)):
            raise DataError("embedding contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other):
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return self.values.tobytes() == other.values.tobytes()

    def __hash__(self):
        return hash(self.values.tobytes())


def _embed_builtin(text: str, dim: int) -> EmbeddingVector:
    return EmbeddingVector(_unit(hashed_counts(text, dim)))


@dataclass
class HttpEmbedder:
    """Client for the external embedding protocol.

    POST {"model": str, "texts": [str]} -> {"vectors": [[float]]}. Transport
    failures and 5xx statuses are retried with capped exponential backoff.
    """

    spec: EmbedderSpec
    client: httpx.Client | None = None
    backoff_base: float = 0.1
    backoff_cap: float = 2.0
    _owns_client: bool = field(default=False, init=False)

    def __post_init__(self):
        if self.client is None:
            self.client = httpx.Client(timeout=self.spec.timeout)
            self._owns_client = True

    def close(self):
        if self._owns_client and self.client is not None:
            self.client.close()

    def _post(self, texts: Sequence[str]) -> list[list[float]]:
        payload = {"model": self.spec.model_name or "", "texts": list(texts)}
        attempt = 0
        while True:
            try:
                resp = self.client.post(self.spec.endpoint, json=payload)
            except httpx.HTTPError as exc:
                err = TransportError(f"embedding request failed: {exc}")
            else:
                if resp.status_code < 300:
                    break
                err = TransportError(f"embedding service returned {resp.status_code}")
                if resp.status_code < 500:
                    raise err
            if attempt >= self.spec.max_retries:
                raise err
            delay = min(self.backoff_cap, self.backoff_base * 2**attempt)
            log.debug("%s; retrying in %.2fs", err, delay)
            time.sleep(delay)
            attempt += 1
        try:
            vectors = resp.json()["vectors"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ResponseSchemaError(f"malformed embedding response: {exc}") from None
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ResponseSchemaError(
                f"embedding service returned {len(vectors) if isinstance(vectors, list) else '?'} "
                f"vectors for {len(texts)} texts"
            )
        return vectors

    def _to_vector(self, raw) -> EmbeddingVector:
        try:
            arr = np.asarray(raw, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ResponseSchemaError(f"non-numeric embedding: {exc}") from None
        if arr.ndim != 1 or arr.shape[0] != self.spec.dim:
            raise DimensionMismatchError(
                f"embedding service returned dim {arr.shape[-1] if arr.ndim else 0}, expected {self.spec.dim}"
            )
        return EmbeddingVector(_unit(arr))

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        for i, text in enumerate(texts):
            try:
                normalize(text)
            except DataError as exc:
                raise BatchEmbeddingError(i, exc) from exc
        size = max(1, self.spec.batch_size)
        starts = list(range(0, len(texts), size))

        def run(start: int) -> list[EmbeddingVector]:
            chunk = texts[start : start + size]
            try:
                raw = self._post(chunk)
            except TransportError as exc:
                raise BatchEmbeddingError(start, exc) from exc
            out = []
            for j, item in enumerate(raw):
                try:
                    out.append(self._to_vector(item))
                except DataError as exc:
                    raise BatchEmbeddingError(start + j, exc) from exc
            return out

        results: list[EmbeddingVector] = []
        workers = max(1, min(self.spec.max_parallel, len(starts)))
        if workers == 1:
            for start in starts:
                results.extend(run(start))
            return results
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map() yields in submission order, which keeps the output aligned with texts
            for part in pool.map(run, starts):
                results.extend(part)
        return results


def embed(text: str, spec: EmbedderSpec, client: HttpEmbedder | None = None) -> EmbeddingVector:
    if spec.kind == "builtin-hash":
        return _embed_builtin(text, spec.dim)
    return embed_batch([text], spec, client)[0]


def embed_batch(
    texts: Sequence[str], spec: EmbedderSpec, client: HttpEmbedder | None = None
) -> list[EmbeddingVector]:
    """Embed texts in order. Any failure raises BatchEmbeddingError naming the index."""
    if spec.kind == "builtin-hash":
        out = []
        for i, text in enumerate(texts):
            try:
                out.append(_embed_builtin(text, spec.dim))
            except DataError as exc:
                raise BatchEmbeddingError(i, exc) from exc
        return out
    if not texts:
        return []
    owned = client is None
    client = client or HttpEmbedder(spec)
    try:
        return client.embed_batch(texts)
    finally:
        if owned:
            client.close()


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} != {b.dim}")
    na = math.sqrt(float(np.dot(a.values, a.values)))
    nb = math.sqrt(float(np.dot(b.values, b.values)))
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a.values, b.values)) / (na * nb)
