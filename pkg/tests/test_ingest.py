import json

import pytest
from hypothesis import given, strategies as st

from npindex.ingest import (
    ADJECTIVE,
    DETERMINER,
    NOUN,
    OTHER,
    PAST_PARTICIPLE,
    PREPOSITION,
    PROGRESSIVE_VERB,
    CorpusFormatError,
    Document,
    TaggedToken,
    chunk_complex,
    chunk_simplex,
    doc_tokens,
    load_lexicon,
    read_documents,
    tag_pretokenized,
    tag_tokens,
    tokenize,
)

LEX = {
    "the": DETERMINER,
    "a": DETERMINER,
    "of": PREPOSITION,
    "in": PREPOSITION,
    "near": PREPOSITION,
    "stainless": ADJECTIVE,
    "steel": NOUN,
    "strip": NOUN,
    "quality": NOUN,
    "surface": NOUN,
    "storage": NOUN,
    "docks": NOUN,
    "runs": OTHER,
}


def cats(tokens):
    return [(t.lemma, t.category) for t in tokens]


class TestTagging:
    def test_suffix_rules_and_lexicon(self):
        tagged = tag_tokens("treated stainless steel strip", LEX)
        assert cats(tagged) == [
            ("treated", PAST_PARTICIPLE),
            ("stainless", ADJECTIVE),
            ("steel", NOUN),
            ("strip", NOUN),
        ]

    def test_empty_text(self):
        assert tag_tokens("", LEX) == []

    def test_unknown_word_defaults_to_noun(self):
        (tok,) = tag_tokens("zzxqw", LEX)
        assert tok.category == NOUN

    def test_ing_suffix(self):
        (tok,) = tag_tokens("operating", {})
        assert tok.category == PROGRESSIVE_VERB

    def test_lexicon_beats_suffix_rule(self):
        (tok,) = tag_tokens("red", {"red": ADJECTIVE})
        assert tok.category == ADJECTIVE

    def test_punctuation_is_other(self):
        tagged = tag_tokens("steel, strip.", LEX)
        assert cats(tagged) == [
            ("steel", NOUN), (",", OTHER), ("strip", NOUN), (".", OTHER)]

    def test_hyphen_split_before_tagging(self):
        tagged = tag_tokens("corpus-based strip", LEX)
        assert [t.lemma for t in tagged] == ["corpus", "based", "strip"]
        assert tagged[1].category == PAST_PARTICIPLE

    def test_possessive_stays_attached(self):
        assert tokenize("Wilson's disease") == ["Wilson's", "disease"]

    def test_total_function_over_arbitrary_text(self):
        tagged = tag_tokens("weird één 12x -- #tag", LEX)
        assert all(t.category for t in tagged)

    def test_pretokenized_validates_tags(self):
        assert cats(tag_pretokenized([("Steel", NOUN)])) == [("steel", NOUN)]
        with pytest.raises(CorpusFormatError, match="NN"):
            tag_pretokenized([("steel", "NN")])


class TestSimplexChunking:
    def test_determiner_dropped(self):
        tagged = tag_tokens("the quality", LEX)
        (np,) = chunk_simplex(tagged, "d")
        assert np.lemmas() == ("quality",)
        assert np.position == 1
        assert np.span == (0, 2)

    def test_premodifier_sequence(self):
        tagged = tag_tokens("treated stainless steel strip", LEX)
        (np,) = chunk_simplex(tagged, "d")
        assert np.lemmas() == ("treated", "stainless", "steel", "strip")

    def test_no_noun_no_np(self):
        assert chunk_simplex(tag_tokens("runs", LEX), "d") == []

    def test_trailing_non_noun_excluded(self):
        tagged = tag_pretokenized([
            ("new", ADJECTIVE), ("york", NOUN), ("quickly", "Adverb")])
        (np,) = chunk_simplex(tagged, "d")
        assert np.lemmas() == ("new", "york")

    def test_determiner_after_failed_run_starts_np(self):
        tagged = tag_pretokenized([
            ("green", ADJECTIVE), ("the", DETERMINER), ("dog", NOUN)])
        (np,) = chunk_simplex(tagged, "d")
        assert np.lemmas() == ("dog",)

    def test_chunking_is_deterministic(self):
        tagged = tag_tokens("the quality of surface of treated stainless steel strip", LEX)
        first = [np.lemmas() for np in chunk_simplex(tagged, "d")]
        second = [np.lemmas() for np in chunk_simplex(tagged, "d")]
        assert first == second


class TestComplexChunking:
    def test_quality_of_surface_of_strip(self):
        tagged = tag_tokens(
            "the quality of surface of treated stainless steel strip", LEX)
        simplexes = chunk_simplex(tagged, "d")
        (cnp,) = chunk_complex(tagged, simplexes)
        assert [s.lemmas() for s in cnp.segments] == [
            ("quality",), ("surface",), ("treated", "stainless", "steel", "strip")]
        assert cnp.connectors == ["of", "of"]

    def test_lone_simplex_yields_nothing(self):
        tagged = tag_tokens("the quality", LEX)
        simplexes = chunk_simplex(tagged, "d")
        assert chunk_complex(tagged, simplexes) == []

    def test_three_segments_two_connectors(self):
        tagged = tag_tokens("strip in storage near docks", LEX)
        simplexes = chunk_simplex(tagged, "d")
        (cnp,) = chunk_complex(tagged, simplexes)
        assert len(cnp.segments) == 3
        assert cnp.connectors == ["in", "near"]

    def test_two_prepositions_break_the_chain(self):
        tagged = tag_pretokenized([
            ("strip", NOUN), ("in", PREPOSITION), ("of", PREPOSITION),
            ("storage", NOUN)])
        simplexes = chunk_simplex(tagged, "d")
        assert chunk_complex(tagged, simplexes) == []

    def test_segments_and_connectors_are_contiguous(self):
        tagged = tag_tokens(
            "the quality of surface of treated stainless steel strip", LEX)
        simplexes = chunk_simplex(tagged, "d")
        (cnp,) = chunk_complex(tagged, simplexes)
        for left, right in zip(cnp.segments, cnp.segments[1:]):
            gap = right.span[0] - left.span[1]
            assert gap == 1
            assert tagged[left.span[1]].category == PREPOSITION


np_words = st.lists(
    st.sampled_from([
        ("the", DETERMINER), ("of", PREPOSITION), ("big", ADJECTIVE),
        ("steel", NOUN), ("strip", NOUN), ("runs", OTHER), (",", OTHER),
        ("treated", PAST_PARTICIPLE),
    ]),
    min_size=0, max_size=30)


@given(np_words)
def test_tokens_never_shared_between_nps(pairs):
    tokens = tag_pretokenized(pairs)
    claimed = set()
    for np in chunk_simplex(tokens, "d"):
        start, end = np.span
        span = set(range(start, end))
        assert not span & claimed
        claimed |= span
        assert np.units[-1].category == NOUN
        assert all(u.category not in (DETERMINER, PREPOSITION, OTHER)
                   for u in np.units)


class TestFileFormats:
    def test_lexicon_roundtrip(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# comment\nsteel\tNoun\nThe\tDeterminer\n")
        lex = load_lexicon(path)
        assert lex == {"steel": NOUN, "the": DETERMINER}

    def test_lexicon_rejects_bad_category(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("steel\tNN\n")
        with pytest.raises(CorpusFormatError, match="NN"):
            load_lexicon(path)

    def test_documents_text_and_tokens(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text(
            json.dumps({"id": "d1", "text": "steel strip"}) + "\n"
            + json.dumps({"id": "d2", "tokens": [["Steel", "Noun"]]}) + "\n")
        docs = read_documents(path)
        assert [d.id for d in docs] == ["d1", "d2"]
        assert doc_tokens(docs[1], {})[0].lemma == "steel"

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text(
            json.dumps({"id": "d1", "text": "a"}) + "\n"
            + json.dumps({"id": "d1", "text": "b"}) + "\n")
        with pytest.raises(CorpusFormatError, match="duplicate"):
            read_documents(path)

    def test_text_and_tokens_mutually_exclusive(self, tmp_path):
        path = tmp_path / "docs.jsonl"
        path.write_text(json.dumps(
            {"id": "d1", "text": "a", "tokens": [["a", "Noun"]]}) + "\n")
        with pytest.raises(CorpusFormatError, match="exactly one"):
            read_documents(path)
