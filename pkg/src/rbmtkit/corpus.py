"""Feature-annotated tokens, sentences, word alignments and corpus statistics.

A token line is a space-delimited sequence of ``surface[SEP feat]*`` fields.
OpenNMT expects the separator U+FFE8; ASCII ``|`` is accepted everywhere the
separator is configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    EmptySurface,
    LineCountMismatch,
    MalformedPair,
    RaggedFeatures,
    SeparatorCollision,
    ValidationError,
)

FEATURE_SEP = "￨"
ASCII_SEP = "|"


class EmptyFeature(ValidationError):
    pass


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    features: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.surface:
            raise EmptySurface("token surface must be non-empty")
        if not isinstance(self.features, tuple):
            object.__setattr__(self, "features", tuple(self.features))

    def with_features(self, features: Iterable[str]) -> AnnotatedToken:
        return AnnotatedToken(self.surface, tuple(features))


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[AnnotatedToken, ...] = ()

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))

    @classmethod
    def from_surfaces(cls, surfaces: Iterable[str]) -> Sentence:
        return cls(tuple(AnnotatedToken(s) for s in surfaces))

    @classmethod
    def from_text(cls, text: str) -> Sentence:
        """Plain whitespace-tokenized text, no features."""
        return cls.from_surfaces(text.split())

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[AnnotatedToken]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def strip_features(self) -> Sentence:
        return Sentence(tuple(AnnotatedToken(t.surface) for t in self.tokens))

    def text(self) -> str:
        return " ".join(self.surfaces)


@dataclass(frozen=True)
class ParallelPair:
    id: int
    source: Sentence
    target: Sentence


@dataclass(frozen=True)
class AlignmentSet:
    links: frozenset[tuple[int, int]] = frozenset()

    def __iter__(self):
        return iter(sorted(self.links))

    def __len__(self) -> int:
        return len(self.links)

    def targets_of(self, src_index: int) -> list[int]:
        return sorted(j for i, j in self.links if i == src_index)

    def check_bounds(self, src_len: int, tgt_len: int) -> None:
        for i, j in self.links:
            if not (0 <= i < src_len and 0 <= j < tgt_len):
                raise MalformedPair(f"link {i}-{j} outside {src_len}x{tgt_len} sentence pair")

    def render(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in sorted(self.links))


def parse_token_line(line: str, separator: str = FEATURE_SEP) -> Sentence:
    if len(separator) != 1:
        raise ValueError(f"separator must be a single character, got {separator!r}")
    tokens = []
    for fld in line.split():
        surface, *features = fld.split(separator)
        if not surface:
            raise EmptySurface(f"field {fld!r} starts with the feature separator")
        if any(not f for f in features):
            raise EmptyFeature(f"field {fld!r} has an empty feature")
        tokens.append(AnnotatedToken(surface, tuple(features)))
    return Sentence(tuple(tokens))


def render_token_line(sentence: Sentence, separator: str = FEATURE_SEP) -> str:
    fields = []
    for tok in sentence:
        for part in (tok.surface, *tok.features):
            if separator in part:
                raise SeparatorCollision(f"{part!r} contains the separator {separator!r}")
            if not part or any(c.isspace() for c in part):
                raise SeparatorCollision(f"{part!r} is empty or contains whitespace")
        fields.append(separator.join((tok.surface, *tok.features)))
    return " ".join(fields)


def read_alignment_line(line: str) -> AlignmentSet:
    links = set()
    for pair in line.split():
        src, dash, tgt = pair.partition("-")
        if not dash or not src.isdecimal() or not tgt.isdecimal():
            raise MalformedPair(f"expected i-j, got {pair!r}")
        links.add((int(src), int(tgt)))
    return AlignmentSet(frozenset(links))


def lowercase(sentence: Sentence) -> Sentence:
    """Lowercase surfaces; features are left untouched."""
    return Sentence(tuple(AnnotatedToken(t.surface.lower(), t.features) for t in sentence))


def feature_arity(sentence: Sentence) -> int | None:
    arities = {len(t.features) for t in sentence}
    if len(arities) > 1:
        raise RaggedFeatures(f"mixed feature arities {sorted(arities)} in one sentence")
    return arities.pop() if arities else None


def validate_arity(sentences: Iterable[Sentence]) -> int | None:
    """Check that every token of a corpus side carries the same number of features.

    Returns the common arity, or None when the corpus has no tokens at all.
    """
    expected = None
    for lineno, sent in enumerate(sentences, 1):
        try:
            arity = feature_arity(sent)
        except RaggedFeatures as exc:
            raise RaggedFeatures(f"line {lineno}: {exc}") from None
        if arity is None:
            continue
        if expected is None:
            expected = arity
        elif arity != expected:
            raise RaggedFeatures(f"line {lineno}: arity {arity}, expected {expected}")
    return expected


@dataclass(frozen=True)
class CorpusStats:
    words: int = 0
    vocab: int = 0
    subwords: int = 0
    subword_vocab: int = 0
    lines: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "words": self.words,
            "vocab": self.vocab,
            "subwords": self.subwords,
            "subword_vocab": self.subword_vocab,
            "lines": self.lines,
        }


@dataclass
class StatsAccumulator:
    """Mergeable running statistics; merging chunks equals a sequential pass."""

    words: int = 0
    subwords: int = 0
    lines: int = 0
    surfaces: set[str] = field(default_factory=set)
    subword_surfaces: set[str] = field(default_factory=set)
    exclude: frozenset[str] = frozenset()

    def add(self, sentence: Sentence, subword_sentence: Sentence | None = None) -> None:
        self.lines += 1
        self.words += len(sentence)
        self.surfaces.update(s for s in sentence.surfaces if s not in self.exclude)
        if subword_sentence is not None:
            self.subwords += len(subword_sentence)
            self.subword_surfaces.update(
                s for s in subword_sentence.surfaces if s not in self.exclude
            )

    def merge(self, other: StatsAccumulator) -> StatsAccumulator:
        return StatsAccumulator(
            words=self.words + other.words,
            subwords=self.subwords + other.subwords,
            lines=self.lines + other.lines,
            surfaces=self.surfaces | other.surfaces,
            subword_surfaces=self.subword_surfaces | other.subword_surfaces,
            exclude=self.exclude | other.exclude,
        )

    def result(self) -> CorpusStats:
        return CorpusStats(
            words=self.words,
            vocab=len(self.surfaces),
            subwords=self.subwords,
            subword_vocab=len(self.subword_surfaces),
            lines=self.lines,
        )


def corpus_stats(
    word_corpus: Iterable[Sentence],
    subword_corpus: Iterable[Sentence] | None = None,
    exclude: Iterable[str] = (),
) -> CorpusStats:
    """Count words, distinct surfaces and lines (plus subword counterparts).

    ``exclude`` removes surfaces (e.g. tree bracket tokens) from the vocabulary
    counts only; running word totals still include them.
    """
    acc = StatsAccumulator(exclude=frozenset(exclude))
    if subword_corpus is None:
        for sent in word_corpus:
            acc.add(sent)
        return acc.result()
    words_it, sub_it = iter(word_corpus), iter(subword_corpus)
    sentinel = object()
    while True:
        w = next(words_it, sentinel)
        s = next(sub_it, sentinel)
        if w is sentinel and s is sentinel:
            break
        if w is sentinel or s is sentinel:
            raise LineCountMismatch("word and subword corpora differ in line count")
        acc.add(w, s)
    return acc.result()


def iter_lines(path) -> Iterator[str]:
    """Yield UTF-8 lines split on ``\\n`` with one trailing ``\\r`` removed."""
    with open(path, "rb") as fh:
        for raw in fh:
            line = raw.decode("utf-8")
            if line.endswith("\n"):
                line = line[:-1]
            if line.endswith("\r"):
                line = line[:-1]
            yield line


def read_sentences(path, separator: str = FEATURE_SEP) -> list[Sentence]:
    return [parse_token_line(line, separator) for line in iter_lines(path)]


def write_lines(path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def zip_strict(*streams: Sequence, what: str = "streams"):
    lengths = {len(s) for s in streams}
    if len(lengths) > 1:
        raise LineCountMismatch(f"{what} have different line counts: {[len(s) for s in streams]}")
    return zip(*streams)
