from __future__ import annotations

import json
from collections import Counter

import httpx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import hashed_embedding

from fuserag.embedding import (
    EmbedderSpec,
    EmbeddingVector,
    HttpEmbedder,
    _bucket,
    cosine,
    embed,
    embed_batch,
    features,
    hashed_counts,
)
from fuserag.errors import (
    BatchEmbeddingError,
    ConfigError,
    DimensionMismatchError,
    EmptyQueryError,
    TransportError,
)
from fuserag.query import DEFAULT_STOPWORDS

SPEC = EmbedderSpec()
WORDS = ["lithium", "mood", "sleep", "anxiety", "therapy", "gene", "panic", "dose", "risk", "brain", "walk", "trial"]
phrases = st.lists(st.sampled_from(WORDS), min_size=1, max_size=10).map(" ".join)


def test_deterministic_and_unit_norm():
    a = embed("Lithium treats bipolar disorder.", SPEC)
    b = embed("Lithium treats bipolar disorder.", SPEC)
    assert a == b and a.values.tobytes() == b.values.tobytes()
    assert abs(np.linalg.norm(a.values) - 1.0) < 1e-9
    assert a.dim == 384


def test_matches_independent_hashing_oracle():
    for text in ["Lithium treats bipolar disorder.", "What are the symptoms of PTSD?", "the of and"]:
        np.testing.assert_allclose(embed(text, SPEC).values, hashed_embedding(text, 384, DEFAULT_STOPWORDS), atol=1e-12)


def test_disjoint_texts_nearly_orthogonal():
    spec = EmbedderSpec(dim=4096)
    a, b = "lithium carbonate serum level", "morning walks improve sleep"
    oracle = float(hashed_embedding(a, 4096, DEFAULT_STOPWORDS) @ hashed_embedding(b, 4096, DEFAULT_STOPWORDS))
    got = cosine(embed(a, spec), embed(b, spec))
    assert abs(got - oracle) < 1e-12
    assert abs(got) < 0.2


def test_empty_text_rejected():
    with pytest.raises(EmptyQueryError):
        embed("  ?? ", SPEC)


def test_batch_pointwise_and_empty():
    assert embed_batch([], SPEC) == []
    texts = [f"{WORDS[i % 12]} {WORDS[(i * 7) % 12]} item{i}" for i in range(1000)]
    batch = embed_batch(texts, SPEC)
    assert batch == [embed(t, SPEC) for t in texts]


def test_batch_reports_failing_index():
    with pytest.raises(BatchEmbeddingError) as info:
        embed_batch(["fine text", "also fine", "..."], SPEC)
    assert info.value.index == 2


@pytest.mark.parametrize(
    "kwargs",
    [{"dim": 4}, {"kind": "external"}, {"kind": "builtin-hash", "endpoint": "http://x"}, {"kind": "bogus"}],
)
def test_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        EmbedderSpec(**kwargs)


def test_fingerprint_tracks_vector_shaping_fields():
    assert SPEC.fingerprint() == EmbedderSpec().fingerprint()
    assert SPEC.fingerprint() != EmbedderSpec(dim=256).fingerprint()
    ext = EmbedderSpec(kind="external", endpoint="http://a", model_name="m1")
    assert ext.fingerprint() != EmbedderSpec(kind="external", endpoint="http://a", model_name="m2").fingerprint()
    assert len(SPEC.fingerprint()) == 32


def test_embedding_vector_rejects_nonfinite():
    with pytest.raises(Exception):
        EmbeddingVector(np.array([1.0, np.nan]))


@settings(max_examples=100)
@given(phrases, st.sampled_from(WORDS))
def test_appending_a_token_touches_only_its_feature_buckets(text, extra):
    dim = 64
    before = hashed_counts(text, dim)
    after = hashed_counts(f"{text} {extra}", dim)
    new_feats = Counter(features(f"{text} {extra}")) - Counter(features(text))
    allowed = {_bucket(f, dim) for f in new_feats}
    changed = set(np.nonzero(before != after)[0].tolist())
    assert changed <= allowed
    assert len(changed) <= 2  # one unigram and one bigram


# ---------------------------------------------------------------- external adapter


def _service(dim=8, fail_first=0, status=500, seen=None):
    state = {"calls": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        state["calls"] += 1
        body = json.loads(request.content)
        if seen is not None:
            seen.append(body)
        if state["calls"] <= fail_first:
            return httpx.Response(status)
        vecs = [[float(len(t))] + [1.0] * (dim - 1) for t in body["texts"]]
        return httpx.Response(200, json={"vectors": vecs})

    return httpx.Client(transport=httpx.MockTransport(handler)), state


def _ext(**kw):
    return EmbedderSpec(kind="external", endpoint="http://embed.test/v1", model_name="m", dim=8, **kw)


def test_external_protocol_and_order():
    seen = []
    client, _ = _service(seen=seen)
    spec = _ext(batch_size=2, max_parallel=3)
    texts = ["a", "bb", "ccc", "dddd", "eeeee"]
    out = embed_batch(texts, spec, HttpEmbedder(spec, client))
    assert all(s.keys() == {"model", "texts"} and s["model"] == "m" for s in seen)
    firsts = [v.values[0] * np.sqrt(len(t) ** 2 + 7) for v, t in zip(out, texts)]
    np.testing.assert_allclose(firsts, [1, 2, 3, 4, 5])
    assert all(abs(np.linalg.norm(v.values) - 1) < 1e-9 for v in out)


def test_external_retries_5xx_then_succeeds():
    client, state = _service(fail_first=2)
    spec = _ext(max_retries=3)
    vec = embed("hello", spec, HttpEmbedder(spec, client, backoff_base=0.0))
    assert vec.dim == 8 and state["calls"] == 3


def test_external_gives_up_after_retries_with_transport_exit_code():
    client, state = _service(fail_first=99)
    spec = _ext(max_retries=2)
    with pytest.raises(BatchEmbeddingError) as info:
        embed("hello", spec, HttpEmbedder(spec, client, backoff_base=0.0))
    assert isinstance(info.value.cause, TransportError)
    assert info.value.exit_code == 3
    assert state["calls"] == 3


def test_external_4xx_not_retried():
    client, state = _service(fail_first=99, status=400)
    spec = _ext(max_retries=5)
    with pytest.raises(BatchEmbeddingError):
        embed("hello", spec, HttpEmbedder(spec, client, backoff_base=0.0))
    assert state["calls"] == 1


def test_external_dimension_mismatch():
    client, _ = _service(dim=5)
    spec = _ext()
    with pytest.raises(BatchEmbeddingError) as info:
        embed_batch(["x", "y"], spec, HttpEmbedder(spec, client))
    assert isinstance(info.value.cause, DimensionMismatchError)
    assert info.value.index == 0
