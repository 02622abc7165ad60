from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import _stem, words

from fuserag.errors import DataError, EmptyQueryError, MalformedInputError
from fuserag.query import (
    Gazetteer,
    RawQuery,
    alias_key,
    detect_relation_intent,
    load_stopwords,
    normalize,
    process_query,
    recognize_entities,
    remove_stopwords,
)
from fuserag.vocab import EntityKind, RelKind

# Expected stems frozen from the Porter oracle in tests/oracles.py.
NORMALIZE_CASES = [
    ("Treatments for Bipolar Disorder?", ["treatment", "for", "bipolar", "disord"]),
    ("aaa", ["aaa"]),
    ("What genetic factors are linked to bipolar disorder?", ["what", "genet", "factor", "ar", "link", "to", "bipolar", "disord"]),
    ("SSRIs, 5-HTTLPR & sleep", ["ssri", "5", "httlpr", "sleep"]),
]


@pytest.mark.parametrize("text, expected", NORMALIZE_CASES)
def test_normalize_examples(text, expected):
    assert normalize(text) == expected
    assert [_stem(w) for w in words(text)] == expected


def test_empty_and_malformed_are_distinct_errors():
    with pytest.raises(EmptyQueryError):
        normalize("")
    with pytest.raises(EmptyQueryError):
        normalize("?!  ...")
    with pytest.raises(MalformedInputError):
        normalize(b"\xff\xfe broken")
    assert not issubclass(EmptyQueryError, MalformedInputError)
    assert not issubclass(MalformedInputError, EmptyQueryError)
    assert issubclass(EmptyQueryError, DataError)


def test_raw_query_rejects_blank():
    with pytest.raises(EmptyQueryError):
        RawQuery("   ")


@pytest.mark.parametrize(
    "tokens, expected",
    [
        (["what", "is", "anxiety"], ["anxiety"]),
        ([], []),
        (["anxiety", "anxiety"], ["anxiety", "anxiety"]),
    ],
)
def test_remove_stopwords(tokens, expected):
    assert remove_stopwords(tokens) == expected


def test_stopword_file_comments_and_stems(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment line\nthe\n\nbeing  # inline\n", "utf-8")
    stops = load_stopwords(path)
    assert "the" in stops and "being" in stops and _stem("being") in stops
    assert "comment" not in stops


@pytest.mark.parametrize(
    "terms, expected",
    [
        (["genet", "factor", "bipolar", "disord"], RelKind.ASSOCIATED_GENE),
        (["weather", "today"], None),
        (["symptom", "treatment"], RelKind.HAS_SYMPTOM),
        (["treatment", "symptom"], RelKind.TREATS),
        (["interact", "lithium"], RelKind.INTERACTS_WITH),
        (["contraind"], RelKind.CONTRAINDICATED_WITH),
    ],
)
def test_relation_intent(terms, expected):
    assert detect_relation_intent(terms) is expected


def test_bipolar_query_example(gazetteer):
    pq = process_query("What genetic factors are linked to bipolar disorder?", gazetteer)
    assert [(m.entity_id, m.kind) for m in pq.entities] == [("bipolar_disorder", EntityKind.CONDITION)]
    assert pq.relation_intent is RelKind.ASSOCIATED_GENE
    assert "what" not in pq.key_terms


def test_no_gazetteer_term_gives_no_mentions(gazetteer):
    assert recognize_entities("the weather is nice today", gazetteer) == []


def test_longest_alias_wins():
    gaz = Gazetteer([("panic", "symptom", "panic"), ("panic_attack", "symptom", "panic attack")])
    mentions = recognize_entities("panic attack", gaz)
    assert [(m.surface, m.entity_id) for m in mentions] == [("panic attack", "panic_attack")]
    # brute force: every alias occurrence, the chosen one is the longest
    toks = [_stem(w) for w in words("panic attack")]
    found = [(i, n) for i in range(len(toks)) for n in (1, 2) if tuple(toks[i : i + n]) in {("panic",), ("panic", "attack")}]
    assert max(n for _, n in found) == 2


def test_duplicate_alias_goes_to_smaller_id():
    gaz = Gazetteer([("zeta", "condition", "shared name"), ("alpha", "condition", "shared name")])
    assert gaz.lookup("Shared Name") == "alpha"
    assert gaz.duplicates == {"share name": ["alpha", "zeta"]}


def test_spans_are_character_offsets():
    gaz = Gazetteer([("d", "condition", "dépression majeure")])
    text = "Über la dépression majeure."
    (m,) = recognize_entities(text, gaz)
    assert text[m.span[0] : m.span[1]] == "dépression majeure" == m.surface


# ---------------------------------------------------------------- properties

VOCAB = ["panic", "attack", "disorder", "bipolar", "major", "depression", "the", "of", "lithium", "sleep", "x1"]
ALIASES = ["panic", "panic attack", "panic disorder", "bipolar disorder", "major depression", "depression", "lithium"]

texts = st.lists(st.sampled_from(VOCAB), min_size=1, max_size=12).map(" ".join)
alias_sets = st.lists(st.sampled_from(ALIASES), min_size=1, max_size=len(ALIASES), unique=True)


def _gaz(aliases):
    return Gazetteer([(a.replace(" ", "_"), "condition", a) for a in aliases])


@given(st.lists(st.sampled_from(["treatments", "running", "disorders", "factor", "sleep", "ab12"]), min_size=1, max_size=8))
def test_normalize_idempotent_on_stem_stable_tokens(toks):
    once = normalize(" ".join(toks))
    if all(_stem(t) == t for t in once):
        assert normalize(" ".join(once)) == once


@given(texts, alias_sets)
def test_mentions_sound_and_unique(text, aliases):
    gaz = _gaz(aliases)
    mentions = recognize_entities(text, gaz)
    assert mentions == recognize_entities(text, gaz)
    seen = set()
    last_end = -1
    for m in mentions:
        assert m.span[0] < m.span[1]
        assert text[m.span[0] : m.span[1]] == m.surface
        assert gaz.lookup(m.surface) == m.entity_id
        assert (m.entity_id, m.span) not in seen
        seen.add((m.entity_id, m.span))
        assert m.span[0] >= last_end  # non-overlapping, in order
        last_end = m.span[1]


@settings(max_examples=200)
@given(texts, alias_sets, st.sampled_from(ALIASES))
def test_coverage_monotone_under_gazetteer_growth(text, aliases, extra):
    """A mention lost after adding an alias must be covered by a new, at least as long, overlapping match."""
    before = recognize_entities(text, _gaz(aliases))
    after = recognize_entities(text, _gaz(sorted(set(aliases) | {extra})))
    after_set = {(m.entity_id, m.span) for m in after}
    for m in before:
        if (m.entity_id, m.span) in after_set:
            continue
        length = len(alias_key(m.surface))
        assert any(
            n.span[0] < m.span[1] and m.span[0] < n.span[1] and len(alias_key(n.surface)) >= length for n in after
        )
