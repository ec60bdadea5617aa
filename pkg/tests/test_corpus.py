import pytest
from hypothesis import given, strategies as st

from rbmtkit.corpus import (
    AnnotatedToken,
    Sentence,
    StatsAccumulator,
    corpus_stats,
    iter_lines,
    lowercase,
    parse_token_line,
    read_alignment_line,
    render_token_line,
    validate_arity,
)
from rbmtkit.errors import EmptySurface, LineCountMismatch, MalformedPair, RaggedFeatures, SeparatorCollision

atoms = st.text(
    alphabet=st.characters(blacklist_categories=("Zs", "Zl", "Zp", "Cc", "Cs"), blacklist_characters="|￨\x85\x1c\x1d\x1e\x1f"),
    min_size=1,
    max_size=6,
)
tokens = st.builds(AnnotatedToken, atoms, st.lists(atoms, max_size=3).map(tuple))
sentences = st.lists(tokens, max_size=8).map(lambda ts: Sentence(tuple(ts)))


def test_parse_feature_line_example():
    s = parse_token_line("He|GEN should|GEN", "|")
    assert s.surfaces == ["He", "should"]
    assert [t.features for t in s] == [("GEN",), ("GEN",)]


def test_parse_blank_line():
    assert parse_token_line("", "|") == Sentence()


def test_parse_multiple_features_and_bare_token():
    s = parse_token_line("a|x|y b", "|")
    assert s.tokens == (AnnotatedToken("a", ("x", "y")), AnnotatedToken("b"))


def test_parse_rejects_leading_separator():
    with pytest.raises(EmptySurface):
        parse_token_line("|GEN word", "|")


def test_render_examples():
    assert render_token_line(Sentence((AnnotatedToken("a", ("x",)),)), "|") == "a|x"
    assert render_token_line(Sentence(), "|") == ""
    s = Sentence((AnnotatedToken("He", ("GEN",)), AnnotatedToken("should", ("GEN",))))
    assert render_token_line(s, "|") == "He|GEN should|GEN"


def test_render_separator_collision():
    with pytest.raises(SeparatorCollision):
        render_token_line(Sentence((AnnotatedToken("a|b"),)), "|")
    with pytest.raises(SeparatorCollision):
        render_token_line(Sentence((AnnotatedToken("a", ("x￨y",)),)))


def test_default_separator_is_fullwidth_bar():
    s = parse_token_line("word￨NST")
    assert s[0].features == ("NST",)


@given(sentences, st.sampled_from(["|", "￨"]))
def test_round_trip(sentence, sep):
    assert parse_token_line(render_token_line(sentence, sep), sep) == sentence


def test_alignment_lines():
    assert read_alignment_line("0-0 1-2").links == {(0, 0), (1, 2)}
    assert read_alignment_line("").links == frozenset()
    assert read_alignment_line("3-1 3-1 2-0").links == {(3, 1), (2, 0)}


@pytest.mark.parametrize("bad", ["0-", "a-1", "01", "1-2-3", "-1"])
def test_malformed_alignment(bad):
    with pytest.raises(MalformedPair):
        read_alignment_line(bad)


def _sents(*lines):
    return [parse_token_line(line, "|") for line in lines]


def test_corpus_stats_examples():
    assert corpus_stats(_sents("a b", "a c")).as_dict() == dict(words=4, vocab=3, subwords=0, subword_vocab=0, lines=2)
    assert corpus_stats([]).as_dict() == dict(words=0, vocab=0, subwords=0, subword_vocab=0, lines=0)
    st_ = corpus_stats(_sents("x x x"), _sents("x@@ x x@@ x x@@ x"))
    assert (st_.words, st_.vocab, st_.subwords, st_.subword_vocab) == (3, 1, 6, 2)


def test_corpus_stats_line_mismatch():
    with pytest.raises(LineCountMismatch):
        corpus_stats(_sents("a", "b"), _sents("a"))


def test_corpus_stats_exclude_only_affects_vocab():
    st_ = corpus_stats(_sents("⦅ a ⦆"), exclude=("⦅", "⦆"))
    assert (st_.words, st_.vocab) == (3, 1)


@given(st.lists(sentences, max_size=6), st.lists(sentences, max_size=6))
def test_stats_additive_and_mergeable(a, b):
    whole = corpus_stats(a + b)
    left, right = StatsAccumulator(), StatsAccumulator()
    for s in a:
        left.add(s)
    for s in b:
        right.add(s)
    assert left.merge(right).result() == whole
    assert whole.words == corpus_stats(a).words + corpus_stats(b).words
    assert whole.lines == len(a) + len(b)
    assert corpus_stats(list(reversed(a + b))).vocab == whole.vocab
    assert whole.vocab <= whole.words


def test_validate_arity():
    assert validate_arity(_sents("a|x b|y", "", "c|z")) == 1
    assert validate_arity(_sents("a b")) == 0
    assert validate_arity([]) is None
    with pytest.raises(RaggedFeatures, match="line 2"):
        validate_arity(_sents("a|x", "b|x|y"))
    with pytest.raises(RaggedFeatures):
        validate_arity(_sents("a|x b"))


def test_lowercase_keeps_features():
    assert lowercase(parse_token_line("He|GEN", "|")) == parse_token_line("he|GEN", "|")


def test_iter_lines_strips_crlf(tmp_path):
    p = tmp_path / "x.txt"
    p.write_bytes("a b\r\nc\rd\n\nü\n".encode("utf-8"))
    assert list(iter_lines(p)) == ["a b", "c\rd", "", "ü"]
