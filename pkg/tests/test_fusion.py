from __future__ import annotations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fuserag.errors import ConfigError
from fuserag.fusion import (
    CONTRADICTED,
    CROSS_VERIFIED,
    FILTERED,
    Candidate,
    FusionConfig,
    context_score,
    decision_fuse,
    fuse,
    fuse_candidates,
    fuse_score,
    prefilter,
)
from fuserag.kg import GraphPattern, Verdict, extract_claims, kg_query, verify_claim
from fuserag.query import process_query
from fuserag.vector_store import Chunk, VectorHit

ZERO_TAUS = dict(tau_vector=0.0, tau_graph=0.0)


def vec(i, s, doc=None, text="", ctx=0.0):
    return Candidate(i, "vector", text or f"text {i}", s_vector=s, s_context=ctx, doc_id=doc or f"doc-{i}")


def gra(i, s, ctx=0.0, triples=()):
    return Candidate(i, "graph", f"fact {i}", s_graph=s, s_context=ctx, triples=triples)


# ---------------------------------------------------------------- config


@pytest.mark.parametrize(
    "kw",
    [dict(w1=0.5, w2=0.5, w3=0.5), dict(w1=-0.1, w2=0.9, w3=0.2), dict(tau_vector=1.5), dict(k_final=0)],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        FusionConfig(**kw)


# ---------------------------------------------------------------- prefilter


def test_prefilter_identity_at_zero():
    cands = [vec("a", 0.0), gra("b", 0.0), vec("c", 0.7)]
    assert prefilter(cands, FusionConfig(**ZERO_TAUS)) == cands


def test_prefilter_drops_and_audits():
    audit = []
    out = prefilter([vec("a", 0.3)], FusionConfig(tau_vector=0.35), audit)
    assert out == [] and audit[0][0] == FILTERED and FILTERED in audit[0][1].flags


def test_prefilter_mixed_twenty():
    scores = [0.05, 0.31, 0.25, 0.9, 0.24, 0.3, 0.29, 0.5, 0.0, 1.0]
    cands = [vec(f"v{i}", s) for i, s in enumerate(scores)] + [gra(f"g{i}", s) for i, s in enumerate(scores)]
    out = prefilter(cands, FusionConfig(tau_vector=0.25, tau_graph=0.30))
    # by hand: vectors >= 0.25 -> v1 v2 v3 v5 v6 v7 v9; graphs >= 0.30 -> g1 g3 g5 g7 g9
    assert [c.id for c in out] == ["v1", "v2", "v3", "v5", "v6", "v7", "v9", "g1", "g3", "g5", "g7", "g9"]


@settings(max_examples=100)
@given(st.lists(st.tuples(st.booleans(), st.floats(0, 1)), max_size=30), st.floats(0, 1), st.floats(0, 1))
def test_prefilter_soundness(items, tv, tg):
    cands = [vec(f"v{i}", s) if is_vec else gra(f"g{i}", s) for i, (is_vec, s) in enumerate(items)]
    out = prefilter(cands, FusionConfig(tau_vector=tv, tau_graph=tg))
    assert all((c.s_vector >= tv) if c.source == "vector" else (c.s_graph >= tg) for c in out)
    kept_ids = [c.id for c in out]
    assert kept_ids == [c.id for c in cands if c.id in set(kept_ids)]


# ---------------------------------------------------------------- scoring


def test_context_score_examples(gazetteer):
    pq = process_query("Is panic attack a sign of panic disorder?", gazetteer)
    assert pq.entity_ids == {"panic_attack", "panic_disorder"}
    assert context_score(vec("x", 0.5, text="Panic attack and PTSD."), pq, gazetteer) == pytest.approx(1 / 3)
    single = process_query("panic attack", gazetteer)
    assert context_score(vec("x", 0.5, text="A panic attack can last minutes."), single, gazetteer) == 1.0
    assert context_score(vec("x", 0.5, text="Schizophrenia and delusions."), single, gazetteer) == 0.0
    assert context_score(vec("x", 0.5, text="panic attack"), process_query("hello there", gazetteer), gazetteer) == 0.0


def test_fuse_score_arithmetic():
    cfg = FusionConfig(w1=0.5, w2=0.3, w3=0.2)
    assert fuse_score(vec("x", 0.8, ctx=0.5), cfg) == pytest.approx(0.50)
    assert fuse_score(vec("x", 0.37, ctx=0.9), FusionConfig(1, 0, 0)) == 0.37


def test_graph_only_weights_follow_accuracy():
    accs = [0.9, 0.35, 0.7, 0.7, 0.99, 0.5, 0.41, 0.8, 0.62, 0.33]
    cands = [gra(f"e{i}", a, ctx=(i % 3) / 2) for i, a in enumerate(accs)]
    ctx = fuse_candidates([], cands, None, FusionConfig(0, 1, 0, k_final=10, **ZERO_TAUS))
    assert [c.id for c in ctx.candidates] == [c.id for c in sorted(cands, key=lambda c: (-c.s_graph, c.id))]


def test_twelve_candidate_hand_ranking():
    cfg = FusionConfig(w1=0.5, w2=0.3, w3=0.2, tau_vector=0.2, tau_graph=0.3, k_final=6)
    vecs = [
        vec("v01", 0.90, "dA", ctx=0.0),  # 0.45, loses dA to v02
        vec("v02", 0.85, "dA", ctx=0.5),  # 0.425 + 0.1 = 0.525
        vec("v03", 0.15, "dB", ctx=1.0),  # filtered
        vec("v04", 0.60, "dC", ctx=1.0),  # 0.30 + 0.2 = 0.50
        vec("v05", 0.60, "dD", ctx=0.5),  # 0.30 + 0.1 = 0.40
        vec("v06", 0.40, "dE", ctx=0.0),  # 0.20
        vec("v07", 0.20, "dF", ctx=0.0),  # 0.10, kept at the floor
    ]
    gras = [
        gra("g01", 0.95, ctx=0.5),  # 0.285 + 0.1 = 0.385
        gra("g02", 0.29, ctx=1.0),  # filtered
        gra("g03", 0.80, ctx=1.0),  # 0.24 + 0.2 = 0.44
        gra("g04", 0.50, ctx=0.0),  # 0.15
        gra("g05", 1.00, ctx=0.5),  # 0.30 + 0.1 = 0.40, ties v05 and wins on id
    ]
    ctx = fuse_candidates(vecs, gras, None, cfg)
    assert [c.id for c in ctx.candidates] == ["v02", "v04", "g03", "g05", "v05", "g01"]
    reasons = {c.id: r for r, c in ctx.dropped}
    assert reasons == {
        "v03": "filtered", "g02": "filtered", "v01": "duplicate_doc",
        "v06": "truncated", "g04": "truncated", "v07": "truncated",
    }
    assert ctx.provenance_summary["sources"] == {"vector": 3, "graph": 3}


def test_empty_inputs_give_empty_context():
    ctx = fuse([], [], None, FusionConfig())
    assert ctx.candidates == () and ctx.to_json_lines() == ""


# ---------------------------------------------------------------- decision fusion


def test_cross_verified_merge_and_contradiction(fixture_graph):
    good = vec("good#0", 0.6, text="Lithium treats bipolar disorder.")
    bad = vec("bad#0", 0.9, text="Bupropion treats bulimia nervosa.")
    plain = vec("plain#0", 0.5, text="Sleep matters.")
    g = gra("lithium", 0.95, triples=(("lithium", "TREATS", "bipolar_disorder"),))
    other = gra("cacna1c", 0.9, triples=(("bipolar_disorder", "ASSOCIATED_GENE", "cacna1c"),))
    audit = []
    out = decision_fuse([good, bad, plain], [g, other], fixture_graph, audit)
    ids = [c.id for c in out]
    assert ids == ["good#0", "plain#0", "cacna1c"]
    merged = out[0]
    assert CROSS_VERIFIED in merged.flags and merged.s_vector == 0.6 and merged.s_graph == 0.95
    assert merged.linked == ("lithium",)
    assert CROSS_VERIFIED not in out[1].flags
    assert [(r, c.id) for r, c in audit] == [(CONTRADICTED, "bad#0"), ("merged:good#0", "lithium")]


def test_disjoint_candidates_concatenate(fixture_graph):
    v = [vec("a#0", 0.5, text="Sleep hygiene."), vec("b#0", 0.4, text="Exercise daily.")]
    g = [gra("x", 0.9, triples=(("lithium", "TREATS", "bipolar_disorder"),))]
    assert decision_fuse(v, g, fixture_graph) == v + g


# ---------------------------------------------------------------- reduction


def _vector_hits(draw_scores):
    return [VectorHit(f"c{i:03d}#0", s, r) for r, (i, s) in enumerate(draw_scores, start=1)]


@settings(max_examples=150)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=40), st.integers(1, 50))
def test_reduction_to_vector_ranking(scores, k):
    order = sorted(enumerate(scores), key=lambda t: (-t[1], f"c{t[0]:03d}#0"))
    hits = _vector_hits(order)
    chunks = {h.chunk_id: Chunk(h.chunk_id, h.chunk_id[:-2], "t", (0, 1)) for h in hits}
    ctx = fuse(hits, [], None, FusionConfig(1, 0, 0, k_final=k, **ZERO_TAUS), chunks=chunks)
    assert [c.id for c in ctx.candidates] == [h.chunk_id for h in hits][:k]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["bipolar_disorder", "schizophrenia", "cbt", "sertraline", "adhd", "fatigue"]), st.integers(1, 12))
def test_reduction_to_graph_ranking(fixture_graph, anchor, k):
    hits = kg_query(fixture_graph, GraphPattern(anchor, None, None, "both", 2), k=50)
    ctx = fuse([], hits, None, FusionConfig(0, 1, 0, k_final=k, **ZERO_TAUS), graph=fixture_graph)
    assert [c.id for c in ctx.candidates] == [h.entity.entity_id for h in hits][:k]


# ---------------------------------------------------------------- invariants


@settings(max_examples=150)
@given(
    st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)), min_size=2, max_size=12),
    st.floats(0.05, 0.9),
    st.floats(0.0, 1.0),
    st.floats(0.01, 0.5),
)
def test_weight_monotonicity(rows, w2, split, bump):
    w2_new = min(1.0, w2 + bump)
    top_g = max(g for _, g, _ in rows)
    cands = [Candidate(f"c{i}", "vector", "t", s_vector=v, s_graph=g, s_context=c) for i, (v, g, c) in enumerate(rows)]
    star = Candidate("star", "graph", "t", s_vector=rows[0][0], s_graph=min(1.0, top_g + 0.05), s_context=rows[0][2])
    assume(star.s_graph > top_g)
    cands.append(star)

    def rank(w2_):
        rest = 1.0 - w2_
        cfg = FusionConfig(w1=rest * split, w2=w2_, w3=rest - rest * split, k_final=100, **ZERO_TAUS)
        ids = [c.id for c in fuse_candidates([], cands, None, cfg).candidates]
        return ids.index("star")

    assert rank(w2_new) <= rank(w2)


def _claim_text(rng_pairs):
    verbs = {"TREATS": "treats", "HAS_SYMPTOM": "has the symptom", "ASSOCIATED_WITH": "goes with"}
    return " ".join(f"{a} {verbs[r]} {b}." for a, r, b in rng_pairs)


LABELS = ["lithium", "bupropion", "bulimia nervosa", "anorexia nervosa", "schizophrenia", "methylphenidate",
          "fluoxetine", "bipolar disorder", "insomnia", "ocd", "clozapine"]


@settings(max_examples=120, deadline=None)
@given(
    st.lists(
        st.lists(st.tuples(st.sampled_from(LABELS), st.sampled_from(["TREATS", "HAS_SYMPTOM", "ASSOCIATED_WITH"]), st.sampled_from(LABELS)), min_size=1, max_size=3),
        min_size=1,
        max_size=8,
    )
)
def test_contradicted_candidates_never_survive(fixture_graph, docs):
    hits = [VectorHit(f"d{i}#0", 0.9 - i * 0.01, i + 1) for i in range(len(docs))]
    chunks = {f"d{i}#0": Chunk(f"d{i}#0", f"d{i}", _claim_text(d), (0, 1)) for i, d in enumerate(docs)}
    ctx = fuse(hits, [], None, FusionConfig(k_final=10), chunks=chunks, graph=fixture_graph)
    for c in ctx.candidates:
        assert CONTRADICTED not in c.flags
        claims = extract_claims(c.text, fixture_graph.gazetteer, schema=fixture_graph.schema)
        assert all(verify_claim(fixture_graph, cl) is not Verdict.CONTRADICTED for cl in claims)
    again = fuse(hits, [], None, FusionConfig(k_final=10), chunks=chunks, graph=fixture_graph)
    assert again.to_json_lines() == ctx.to_json_lines()
