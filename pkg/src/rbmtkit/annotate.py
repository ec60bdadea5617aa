"""Source-side word features: ambiguity classes, tagger-filtered ambiguity
classes, raw POS tags, and the bracketed-tree representation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .corpus import AnnotatedToken, Sentence
from .errors import EmptyNode, LengthMismatch, UnbalancedParens, ValidationError
from .lexicon import AmbiguityIndex, bundle_for, lookup_features

OPEN_BRACKET = "⦅"
CLOSE_BRACKET = "⦆"
BRACKET_FEATURE = "BR"
DEFAULT_BRACKETED_LABELS = frozenset({"CLS", "NP", "PP", "AP", "ADVP"})

# Best-effort Penn Treebank -> Lucy LT category map. Override with a TSV file.
PENN_TO_LUCY = {
    "NN": {"NST"}, "NNS": {"NST"}, "NNP": {"NST"}, "NNPS": {"NST"},
    "VB": {"VST"}, "VBD": {"VST"}, "VBG": {"VST"}, "VBN": {"VST"},
    "VBP": {"VST"}, "VBZ": {"VST"}, "MD": {"VST"},
    "JJ": {"AST"}, "JJR": {"AST"}, "JJS": {"AST"},
    "RB": {"ADV"}, "RBR": {"ADV"}, "RBS": {"ADV"},
    "PRP": {"PRN"}, "PRP$": {"PRN", "DET"}, "WP": {"PRN"},
    "DT": {"DET"}, "PDT": {"DET"}, "WDT": {"DET"},
    "IN": {"PREP", "CONJ"}, "TO": {"PREP"}, "CC": {"CONJ"},
    "CD": {"NUM"},
}


class PosTagMap(dict):
    """External tag -> set of lexicon categories. Unmapped tags are absent."""

    def __setitem__(self, tag, categories):
        categories = frozenset(categories)
        if not categories:
            raise ValidationError(f"tag {tag!r} maps to an empty category set")
        super().__setitem__(tag, categories)

    @classmethod
    def from_mapping(cls, mapping) -> PosTagMap:
        m = cls()
        for tag, cats in mapping.items():
            m[tag] = cats
        return m

    @classmethod
    def parse(cls, text: str) -> PosTagMap:
        """Two-column TSV: ``TAG<TAB>CAT+CAT``."""
        m = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ValidationError(f"tag map line {lineno}: expected 2 tab-separated columns")
            m[cols[0].strip()] = {c for c in cols[1].strip().split("+") if c}
        return m


def annotate_catcl(sentence: Sentence, index: AmbiguityIndex) -> Sentence:
    out = []
    for tok in sentence:
        b = lookup_features(tok.surface, index)
        out.append(AnnotatedToken(tok.surface, (b.cat_tag, b.cl_tag)))
    return Sentence(tuple(out))


def disambiguate_catcl(
    sentence: Sentence,
    external_tags: Sequence[str],
    tag_map: PosTagMap,
    index: AmbiguityIndex,
) -> Sentence:
    """Drop lexicon analyses that contradict the tagger, when any survive."""
    if len(external_tags) != len(sentence):
        raise LengthMismatch(f"{len(sentence)} tokens but {len(external_tags)} tags")
    out = []
    for tok, tag in zip(sentence, external_tags):
        entries = index.lookup(tok.surface)
        allowed = tag_map.get(tag, frozenset())
        kept = [e for e in entries if e.category in allowed]
        b = bundle_for(kept or entries)
        out.append(AnnotatedToken(tok.surface, (b.cat_tag, b.cl_tag)))
    return Sentence(tuple(out))


def annotate_pos(sentence: Sentence, external_tags: Sequence[str]) -> Sentence:
    if len(external_tags) != len(sentence):
        raise LengthMismatch(f"{len(sentence)} tokens but {len(external_tags)} tags")
    return Sentence(tuple(AnnotatedToken(t.surface, (tag,)) for t, tag in zip(sentence, external_tags)))


@dataclass(frozen=True)
class ParseTree:
    label: str
    children: tuple[Union["ParseTree", str], ...]

    def leaves(self) -> list[str]:
        out = []
        for c in self.children:
            out.extend([c] if isinstance(c, str) else c.leaves())
        return out

    def __str__(self):
        return "(" + " ".join([self.label, *map(str, self.children)]) + ")"


def _strip_rule_id(label: str) -> str:
    # "NP:97" -> "NP"; "$:" -> "$"
    head, sep, _ = label.partition(":")
    return head if sep and head else label


def parse_bracketed_tree(text: str) -> ParseTree:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise EmptyNode("empty tree")
    pos = 0

    def node() -> ParseTree:
        nonlocal pos
        pos += 1  # '('
        if pos >= len(tokens):
            raise UnbalancedParens("tree ends after '('")
        if tokens[pos] in "()":
            raise EmptyNode(f"node without a label at token {pos}")
        label = _strip_rule_id(tokens[pos])
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                children.append(node())
            else:
                children.append(tokens[pos])
                pos += 1
        if pos >= len(tokens):
            raise UnbalancedParens(f"node {label!r} is never closed")
        pos += 1  # ')'
        if not children:
            raise EmptyNode(f"node {label!r} has no children")
        return ParseTree(label, tuple(children))

    if tokens[0] != "(":
        raise UnbalancedParens("tree must start with '('")
    tree = node()
    if pos != len(tokens):
        raise UnbalancedParens(f"trailing material after the tree: {' '.join(tokens[pos:])}")
    return tree


def strip_sentinels(tree: ParseTree, sentinel: str = "$") -> ParseTree | None:
    """Remove sentinel leaves and any node left without children."""
    children = []
    for c in tree.children:
        if isinstance(c, str):
            if c != sentinel:
                children.append(c)
        else:
            sub = strip_sentinels(c, sentinel)
            if sub is not None:
                children.append(sub)
    return ParseTree(tree.label, tuple(children)) if children else None


def linearize_tree(
    tree: ParseTree,
    bracketed_labels: Iterable[str] = DEFAULT_BRACKETED_LABELS,
    min_span: int = 2,
) -> Sentence:
    """Flatten a tree into bracket and word tokens with a phrase feature.

    A constituent is bracketed when its label is listed and it covers at least
    ``min_span`` words; in a unary chain covering the same words only the top
    qualifying node is bracketed. Each word's feature is the label two levels
    above its preterminal (parent, then root, for shallow trees).
    """
    labels = frozenset(bracketed_labels)
    out: list[AnnotatedToken] = []

    def walk(node: ParseTree, ancestors: list[str], inside_same_span: bool):
        width = len(node.leaves())
        bracket = node.label in labels and width >= min_span and not inside_same_span
        if bracket:
            out.append(AnnotatedToken(OPEN_BRACKET, (BRACKET_FEATURE,)))
        path = ancestors + [node.label]
        for child in node.children:
            if isinstance(child, str):
                # node is the preterminal: path[-1] is it, path[-3] its grandparent
                phrase = path[-3] if len(path) >= 3 else (path[-2] if len(path) >= 2 else path[0])
                out.append(AnnotatedToken(child, (phrase,)))
            else:
                same = len(node.children) == 1 and (bracket or inside_same_span)
                walk(child, path, same)
        if bracket:
            out.append(AnnotatedToken(CLOSE_BRACKET, (BRACKET_FEATURE,)))

    walk(tree, [], False)
    return Sentence(tuple(out))
