import pytest
from hypothesis import given, strategies as st

from rbmtkit.annotate import (
    CLOSE_BRACKET,
    OPEN_BRACKET,
    PENN_TO_LUCY,
    ParseTree,
    PosTagMap,
    annotate_catcl,
    annotate_pos,
    disambiguate_catcl,
    linearize_tree,
    parse_bracketed_tree,
    strip_sentinels,
)
from rbmtkit.corpus import Sentence, render_token_line, validate_arity
from rbmtkit.errors import EmptyNode, LengthMismatch, UnbalancedParens, ValidationError
from rbmtkit.lexicon import build_ambiguity_index, parse_lexicon


@pytest.fixture
def index(snake_lexicon):
    return build_ambiguity_index(parse_lexicon(snake_lexicon + '("cat" NST CL (P-S)) ("own" VST CL (P-ED))'))


@pytest.fixture
def nn_map():
    return PosTagMap.from_mapping({"NN": {"NST"}, "VB": {"VST"}})


def test_annotate_catcl(index):
    out = annotate_catcl(Sentence.from_text("snake zzz"), index)
    assert render_token_line(out, "|") == "snake|NST_VST|P-S+S-01_G-ING+I-E+P-ED+PA-ED+PR-ES1 zzz|NONE|NONE"
    assert annotate_catcl(Sentence(), index) == Sentence()


def test_disambiguate_keeps_matching_analysis(index, nn_map):
    (tok,) = disambiguate_catcl(Sentence.from_text("snake"), ["NN"], nn_map, index)
    assert tok.features == ("NST", "P-S+S-01")


def test_disambiguate_unmapped_tag_keeps_full_bundle(index, nn_map):
    (tok,) = disambiguate_catcl(Sentence.from_text("snake"), ["UH"], nn_map, index)
    assert tok.features[0] == "NST_VST"


def test_disambiguate_no_overlap_keeps_full_bundle(index, nn_map):
    (tok,) = disambiguate_catcl(Sentence.from_text("cat"), ["VB"], nn_map, index)
    assert tok.features == ("NST", "P-S")


def test_disambiguate_unknown_word(index, nn_map):
    (tok,) = disambiguate_catcl(Sentence.from_text("zzz"), ["NN"], nn_map, index)
    assert tok.features == ("NONE", "NONE")


def test_disambiguate_length_mismatch(index, nn_map):
    with pytest.raises(LengthMismatch):
        disambiguate_catcl(Sentence.from_text("a b"), ["NN"], nn_map, index)


@given(words=st.lists(st.sampled_from(["snake", "cat", "own", "zzz"]), max_size=6), data=st.data())
def test_disambiguation_only_filters(snake_lexicon, words, data):
    index = build_ambiguity_index(parse_lexicon(snake_lexicon + '("cat" NST CL (P-S)) ("own" VST CL (P-ED))'))
    tags = data.draw(st.lists(st.sampled_from(sorted(PENN_TO_LUCY) + ["UH"]), min_size=len(words), max_size=len(words)))
    sent = Sentence.from_text(" ".join(words))
    full = annotate_catcl(sent, index)
    filtered = disambiguate_catcl(sent, tags, PosTagMap.from_mapping(PENN_TO_LUCY), index)
    assert filtered.surfaces == sent.surfaces
    for f, a in zip(filtered, full):
        assert set(f.features[0].split("_")) <= set(a.features[0].split("_"))
    assert validate_arity([full, filtered]) in (2, None)


def test_annotate_pos():
    assert render_token_line(annotate_pos(Sentence.from_text("dog"), ["NN"]), "|") == "dog|NN"
    assert annotate_pos(Sentence(), []) == Sentence()
    assert render_token_line(annotate_pos(Sentence.from_text("I own"), ["PRP", "VBP"]), "|") == "I|PRP own|VBP"
    with pytest.raises(LengthMismatch):
        annotate_pos(Sentence.from_text("a"), [])


def test_tag_map_tsv():
    m = PosTagMap.parse("NN\tNST\n# comment\nIN\tPREP+CONJ\n")
    assert m == {"NN": frozenset({"NST"}), "IN": frozenset({"PREP", "CONJ"})}
    with pytest.raises(ValidationError):
        PosTagMap.parse("NN\t\n")


def test_parse_tree_examples():
    assert parse_bracketed_tree("(NO:57 (PRN I))") == ParseTree("NO", (ParseTree("PRN", ("I",)),))
    assert parse_bracketed_tree("(X y)") == ParseTree("X", ("y",))
    assert parse_bracketed_tree("(S:1 (A:2 a) (B b))") == ParseTree(
        "S", (ParseTree("A", ("a",)), ParseTree("B", ("b",)))
    )


@pytest.mark.parametrize("text, error", [
    ("(X y", UnbalancedParens), ("(X y))", UnbalancedParens), ("(X)", EmptyNode),
    ("(() y)", EmptyNode), ("", EmptyNode), ("x", UnbalancedParens),
])
def test_parse_tree_errors(text, error):
    with pytest.raises(error):
        parse_bracketed_tree(text)


def test_house_tree_linearization(house_tree):
    tree = strip_sentinels(parse_bracketed_tree(house_tree))
    out = linearize_tree(tree, {"CLS", "NP", "PP"})
    assert " ".join(out.surfaces) == "⦅ I own ⦅ the house ⦆ ⦅ down ⦅ the street ⦆ ⦆ ⦆"
    words = {t.surface: t.features[0] for t in out if t.surface not in (OPEN_BRACKET, CLOSE_BRACKET)}
    assert words["house"] == "NP"
    assert words["own"] == "PRED"
    assert words["down"] == "PP"
    # default label set gives the same result on this tree
    assert linearize_tree(tree) == out


def test_shallow_tree_fallbacks():
    (tok,) = linearize_tree(parse_bracketed_tree("(X (Y (Z w)))"), set())
    assert (tok.surface, tok.features) == ("w", ("X",))
    (tok,) = linearize_tree(parse_bracketed_tree("(Y (Z w))"), set())
    assert tok.features == ("Y",)
    (tok,) = linearize_tree(parse_bracketed_tree("(Z w)"), set())
    assert tok.features == ("Z",)


def test_unary_chain_bracketed_once():
    out = linearize_tree(parse_bracketed_tree("(NP (NP (A a) (B b)))"), {"NP"})
    assert out.surfaces == ["⦅", "a", "b", "⦆"]


def test_strip_sentinels():
    assert strip_sentinels(parse_bracketed_tree("($ $)")) is None


labels = st.sampled_from(["S", "NP", "PP", "CLS", "X"])
trees = st.recursive(
    st.builds(lambda l, w: ParseTree(l, (w,)), labels, st.sampled_from(["a", "b", "c"])),
    lambda inner: st.builds(lambda l, cs: ParseTree(l, tuple(cs)), labels, st.lists(inner, min_size=1, max_size=3)),
    max_leaves=10,
)


@given(trees, st.sets(labels))
def test_linearization_properties(tree, bracketed):
    out = linearize_tree(tree, bracketed)
    words = [t.surface for t in out if t.surface not in (OPEN_BRACKET, CLOSE_BRACKET)]
    assert words == tree.leaves()
    depth = 0
    for t in out:
        depth += {OPEN_BRACKET: 1, CLOSE_BRACKET: -1}.get(t.surface, 0)
        assert depth >= 0
    assert depth == 0
    assert all(len(t.features) == 1 for t in out)
