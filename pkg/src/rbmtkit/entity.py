"""Named-entity and terminology injection around a black-box translator.

Entities are either marked with a per-token feature or replaced by a single
tag token. After translation, tag tokens in the hypothesis are matched back to
source tags through attention weights and replaced by dictionary translations.
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import AlignmentSet, AnnotatedToken, ParallelPair, Sentence
from .errors import (
    DimensionMismatch,
    InvalidAttention,
    LineCountMismatch,
    OverlappingSpans,
    ReservedTagCollision,
    SidecarMismatch,
    SpanOutOfBounds,
    ValidationError,
)
from .lexicon import TermDictionary

log = logging.getLogger(__name__)

FEATURE, REPLACE = "feature", "replace"
BINARY, CLASS = "binary", "class"
RECORD_SEP = "␟"


@dataclass(frozen=True, order=True)
class EntitySpan:
    start: int
    end: int
    label: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise SpanOutOfBounds(f"invalid span {self.start}:{self.end}")

    def __str__(self):
        return f"{self.start}:{self.end}:{self.label}"


def parse_spans(line: str) -> list[EntitySpan]:
    spans = []
    for item in line.split():
        parts = item.split(":", 2)
        if len(parts) != 3 or not parts[0].isdecimal() or not parts[1].isdecimal() or not parts[2]:
            raise ValidationError(f"expected start:end:label, got {item!r}")
        spans.append(EntitySpan(int(parts[0]), int(parts[1]), parts[2]))
    return sorted(spans)


def render_spans(spans: Iterable[EntitySpan]) -> str:
    return " ".join(str(s) for s in spans)


def check_spans(spans: Sequence[EntitySpan], length: int) -> list[EntitySpan]:
    spans = sorted(spans)
    for s in spans:
        if s.end > length:
            raise SpanOutOfBounds(f"span {s} exceeds sentence length {length}")
    for prev, cur in zip(spans, spans[1:]):
        if cur.start < prev.end:
            raise OverlappingSpans(f"spans {prev} and {cur} overlap")
    return spans


# Sidecar: one (label, phrase) record per emitted tag token, in source order.
Sidecar = list[tuple[str, str]]


def render_sidecar(records: Sidecar) -> str:
    return "\t".join(f"{label}{RECORD_SEP}{phrase}" for label, phrase in records)


def parse_sidecar(line: str) -> Sidecar:
    records = []
    for rec in line.split("\t") if line else []:
        label, sep, phrase = rec.partition(RECORD_SEP)
        if not sep:
            raise ValidationError(f"sidecar record without separator: {rec!r}")
        records.append((label, phrase))
    return records


def _tag_for(span: EntitySpan, tagset: str, binary_tag: str) -> str:
    return span.label if tagset == CLASS else binary_tag


def tag_entities(
    sentence: Sentence,
    spans: Sequence[EntitySpan],
    mode: str = FEATURE,
    tagset: str = CLASS,
    default_label: str = "GEN",
    binary_tag: str = "NE",
) -> tuple[Sentence, Sidecar]:
    spans = check_spans(spans, len(sentence))
    if mode == FEATURE:
        labels = [default_label] * len(sentence)
        for s in spans:
            for i in range(s.start, s.end):
                labels[i] = _tag_for(s, tagset, binary_tag)
        tokens = tuple(AnnotatedToken(t.surface, (*t.features, lab)) for t, lab in zip(sentence, labels))
        return Sentence(tokens), []
    if mode != REPLACE:
        raise ValueError(f"unknown mode {mode!r}")
    out: list[AnnotatedToken] = []
    sidecar: Sidecar = []
    pos = 0
    for s in spans:
        out.extend(sentence.tokens[pos:s.start])
        feats = sentence.tokens[s.start].features
        out.append(AnnotatedToken(_tag_for(s, tagset, binary_tag), feats))
        sidecar.append((s.label, " ".join(sentence.surfaces[s.start:s.end])))
        pos = s.end
    out.extend(sentence.tokens[pos:])
    return Sentence(tuple(out)), sidecar


def project_spans(
    src_spans: Sequence[EntitySpan],
    alignments: AlignmentSet,
    tgt_len: int,
    warnings: Counter | None = None,
) -> list[EntitySpan]:
    """Map source spans onto the target through word alignments.

    Each projected span is the smallest contiguous range covering every target
    position linked to the source span. Overlapping results merge when they
    share a label; otherwise the later one is dropped.
    """
    by_src = defaultdict(list)
    for i, j in alignments.links:
        if not 0 <= j < tgt_len:
            raise SpanOutOfBounds(f"alignment target {j} outside target length {tgt_len}")
        by_src[i].append(j)
    kept: list[EntitySpan] = []
    for s in sorted(src_spans):
        targets = [j for i in range(s.start, s.end) for j in by_src.get(i, ())]
        if not targets:
            continue
        cand = EntitySpan(min(targets), max(targets) + 1, s.label)
        while True:
            clash = next((k for k in kept if k.start < cand.end and cand.start < k.end), None)
            if clash is None:
                kept.append(cand)
                break
            if clash.label != cand.label:
                log.warning("dropping projected span %s overlapping %s", cand, clash)
                if warnings is not None:
                    warnings["dropped_overlap"] += 1
                break
            kept.remove(clash)
            cand = EntitySpan(min(clash.start, cand.start), max(clash.end, cand.end), cand.label)
    return sorted(kept)


def prepare_training_pair(
    pair: ParallelPair,
    src_spans: Sequence[EntitySpan],
    alignments: AlignmentSet,
    mode: str = REPLACE,
    tagset: str = CLASS,
    default_label: str = "GEN",
    binary_tag: str = "NE",
    warnings: Counter | None = None,
) -> ParallelPair:
    source, _ = tag_entities(pair.source, src_spans, mode, tagset, default_label, binary_tag)
    if mode == FEATURE:
        return ParallelPair(pair.id, source, pair.target)
    tgt_spans = project_spans(src_spans, alignments, len(pair.target), warnings)
    target, _ = tag_entities(pair.target, tgt_spans, REPLACE, tagset, default_label, binary_tag)
    return ParallelPair(pair.id, source, target)


def duplicate_augment(
    corpus: Iterable[ParallelPair],
    spans_per_pair: Iterable[Sequence[EntitySpan]],
    alignments: Iterable[AlignmentSet] | None = None,
    mode: str = REPLACE,
    tagset: str = CLASS,
    default_label: str = "GEN",
    binary_tag: str = "NE",
) -> Iterator[ParallelPair]:
    """Emit every pair processed, plus an untouched copy of pairs with spans.

    The untouched copy in feature mode carries ``default_label`` on every
    token so feature arity stays uniform.
    """
    pairs = list(corpus)
    spans_list = list(spans_per_pair)
    aligns = list(alignments) if alignments is not None else [AlignmentSet()] * len(pairs)
    if not (len(pairs) == len(spans_list) == len(aligns)):
        raise LineCountMismatch("corpus, span and alignment streams differ in length")
    for pair, spans, links in zip(pairs, spans_list, aligns):
        yield prepare_training_pair(pair, spans, links, mode, tagset, default_label, binary_tag)
        if spans:
            if mode == FEATURE:
                generic, _ = tag_entities(pair.source, [], FEATURE, tagset, default_label, binary_tag)
                yield ParallelPair(pair.id, generic, pair.target)
            else:
                yield pair


class AttentionMatrix:
    """Soft alignment: one row per hypothesis token over source tokens."""

    def __init__(self, weights, tol: float = 1e-4):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 2:
            if w.size == 0:
                w = w.reshape(0, 0)
            else:
                raise InvalidAttention("attention must be a 2-D matrix")
        if (w < 0).any():
            raise InvalidAttention("attention weights must be non-negative")
        if w.shape[1] and not np.allclose(w.sum(axis=1), 1.0, atol=tol, rtol=0):
            raise InvalidAttention("attention rows must sum to 1")
        self.weights = w

    @property
    def shape(self):
        return self.weights.shape

    def check(self, hyp_len: int, src_len: int) -> None:
        if hyp_len == 0:
            return
        if self.weights.shape != (hyp_len, src_len):
            raise DimensionMismatch(
                f"attention is {self.weights.shape}, sentence pair is {(hyp_len, src_len)}"
            )

    @classmethod
    def from_json(cls, line: str) -> AttentionMatrix:
        return cls(json.loads(line)["attn"])

    def to_json(self) -> str:
        return json.dumps({"attn": self.weights.tolist()})


def _first_argmax(values) -> int:
    return int(np.argmax(values))  # numpy returns the first maximum


def restore_tags(
    hypothesis: Sentence,
    processed_source: Sentence,
    sidecar: Sidecar,
    attention: AttentionMatrix,
    terms: TermDictionary,
    tag_labels: Iterable[str],
    warnings: Counter | None = None,
) -> Sentence:
    """Replace hypothesis tag tokens with translations of their source phrases.

    Tags are resolved left to right. Each takes the unconsumed source tag with
    the same surface and the highest attention weight, falling back to any
    unconsumed source tag and finally to the best consumed one. Without any
    source tag the hypothesis tag is deleted.
    """
    tags = frozenset(tag_labels)
    attention.check(len(hypothesis), len(processed_source))
    src_tags = [i for i, t in enumerate(processed_source) if t.surface in tags]
    if len(src_tags) != len(sidecar):
        raise SidecarMismatch(f"{len(src_tags)} source tags but {len(sidecar)} sidecar records")
    record_at = dict(zip(src_tags, sidecar))
    consumed: set[int] = set()
    out: list[AnnotatedToken] = []
    for h, tok in enumerate(hypothesis):
        if tok.surface not in tags:
            out.append(tok)
            continue
        if not src_tags:
            log.warning("hypothesis tag %s has no source tag; deleted", tok.surface)
            if warnings is not None:
                warnings["extra_tag"] += 1
            continue
        row = attention.weights[h]
        tiers = (
            [i for i in src_tags if i not in consumed and processed_source[i].surface == tok.surface],
            [i for i in src_tags if i not in consumed],
            src_tags,
        )
        pool = next(t for t in tiers if t)
        if pool is src_tags and warnings is not None:
            warnings["reused_tag"] += 1
        choice = pool[_first_argmax(row[pool])]
        consumed.add(choice)
        label, phrase = record_at[choice]
        target = terms.get(phrase, label) or terms.get(phrase, processed_source[choice].surface)
        pieces = target if target is not None else tuple(phrase.split())
        out.extend(AnnotatedToken(p, tok.features) for p in pieces)
    return Sentence(tuple(out))


class PhraseTable:
    """Single-token translation counts; lookups return the most frequent target."""

    def __init__(self, counts: dict[str, Counter] | None = None):
        self.counts: dict[str, Counter] = defaultdict(Counter)
        for src, tgts in (counts or {}).items():
            self.counts[src].update(tgts)

    def __len__(self):
        return len(self.counts)

    def __contains__(self, src: str) -> bool:
        return src in self.counts and bool(self.counts[src])

    def add(self, src: str, tgt: str, count: int = 1) -> None:
        if count < 1:
            raise ValidationError("phrase table counts must be >= 1")
        self.counts[src][tgt] += count

    def lookup(self, src: str) -> str | None:
        tgts = self.counts.get(src)
        if not tgts:
            return None
        return min(tgts.items(), key=lambda kv: (-kv[1], kv[0]))[0]

    def merge(self, other: PhraseTable) -> PhraseTable:
        merged = PhraseTable(self.counts)
        for src, tgts in other.counts.items():
            merged.counts[src].update(tgts)
        return merged

    def dumps(self) -> str:
        rows = [
            f"{src}\t{tgt}\t{n}"
            for src in sorted(self.counts)
            for tgt, n in sorted(self.counts[src].items(), key=lambda kv: (-kv[1], kv[0]))
        ]
        return "".join(r + "\n" for r in rows)

    @classmethod
    def loads(cls, text: str) -> PhraseTable:
        table = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3 or not cols[2].strip().isdecimal():
                raise ValidationError(f"phrase table line {lineno}: expected src<TAB>tgt<TAB>count")
            table.add(cols[0], cols[1], int(cols[2]))
        return table


def build_phrase_table(pairs: Iterable[ParallelPair], alignments: Iterable[AlignmentSet]) -> PhraseTable:
    pairs, alignments = list(pairs), list(alignments)
    if len(pairs) != len(alignments):
        raise LineCountMismatch(f"{len(pairs)} pairs but {len(alignments)} alignment lines")
    table = PhraseTable()
    for pair, links in zip(pairs, alignments):
        links.check_bounds(len(pair.source), len(pair.target))
        for i, j in links:
            table.add(pair.source[i].surface, pair.target[j].surface)
    return table


def replace_unknowns(
    hypothesis: Sentence,
    source: Sentence,
    attention: AttentionMatrix,
    table: PhraseTable,
    unk_token: str = "<unk>",
) -> Sentence:
    if not any(t.surface == unk_token for t in hypothesis):
        return hypothesis
    attention.check(len(hypothesis), len(source))
    out = []
    for h, tok in enumerate(hypothesis):
        if tok.surface == unk_token and len(source):
            src = source[_first_argmax(attention.weights[h])].surface
            out.append(AnnotatedToken(table.lookup(src) or src, tok.features))
        else:
            out.append(tok)
    return Sentence(tuple(out))


def check_reserved_tags(sentence: Sentence, spans: Sequence[EntitySpan], tag_labels: Iterable[str]) -> None:
    """Tag labels are reserved words: they may not occur outside a span."""
    tags = frozenset(tag_labels)
    inside = {i for s in spans for i in range(s.start, s.end)}
    for i, tok in enumerate(sentence):
        if tok.surface in tags and i not in inside:
            raise ReservedTagCollision(f"reserved tag {tok.surface!r} used as a word at position {i}")
