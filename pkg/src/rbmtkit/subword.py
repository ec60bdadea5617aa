"""Byte-pair encoding that carries word features onto every subword piece."""

from __future__ import annotations

import heapq
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .corpus import AnnotatedToken, Sentence
from .errors import ValidationError

log = logging.getLogger(__name__)

END_OF_WORD = "</w>"
MARKER = "@@"
MAX_MERGES = 32000
SUFFIX, PREFIX = "suffix", "prefix"
_HEADER = "#rbmtkit-bpe"


@dataclass(frozen=True)
class BpeModel:
    merges: tuple[tuple[str, str], ...] = ()
    marker_mode: str = SUFFIX

    def __post_init__(self):
        if self.marker_mode not in (SUFFIX, PREFIX):
            raise ValueError(f"unknown marker mode {self.marker_mode!r}")
        if len(set(self.merges)) != len(self.merges):
            raise ValidationError("duplicate merge pair in BPE model")

    def __len__(self):
        return len(self.merges)

    def __hash__(self):
        return hash((self.merges, self.marker_mode))

    def dumps(self) -> str:
        lines = [f"{_HEADER} version=1 marker={self.marker_mode}"]
        lines += [f"{a} {b}" for a, b in self.merges]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> BpeModel:
        lines = text.splitlines()
        marker_mode = SUFFIX
        if lines and lines[0].startswith("#"):
            for kv in lines[0].split()[1:]:
                key, _, value = kv.partition("=")
                if key == "marker":
                    marker_mode = value
            lines = lines[1:]
        merges = []
        for lineno, line in enumerate(lines, 2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(f"BPE model line {lineno}: expected 'left right'")
            merges.append((parts[0], parts[1]))
        return cls(tuple(merges), marker_mode)


def _word_symbols(word: str) -> tuple[str, ...]:
    return (*word[:-1], word[-1] + END_OF_WORD)


def _pairs(symbols):
    return zip(symbols, symbols[1:])


def bpe_learn(
    corpus: Iterable[Sentence],
    max_merges: int = MAX_MERGES,
    min_frequency: int = 2,
    marker_mode: str = SUFFIX,
) -> BpeModel:
    """Learn merges greedily on frequency-weighted symbol pairs.

    Ties between equally frequent pairs go to the lexicographically smallest
    ``(left, right)``, which makes learning deterministic.
    """
    if max_merges < 0:
        raise ValueError("max_merges must be >= 0")
    freqs = Counter(tok.surface for sent in corpus for tok in sent)
    words = [list(_word_symbols(w)) for w in sorted(freqs)]
    counts = [freqs[w] for w in sorted(freqs)]

    pair_counts: dict[tuple[str, str], int] = defaultdict(int)
    where: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, (symbols, f) in enumerate(zip(words, counts)):
        for p in _pairs(symbols):
            pair_counts[p] += f
            where[p].add(idx)
    heap = [(-c, p) for p, c in pair_counts.items()]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    while len(merges) < max_merges and heap:
        neg, pair = heapq.heappop(heap)
        if pair_counts.get(pair, 0) != -neg:
            continue  # stale heap entry
        if -neg < min_frequency:
            break
        merges.append(pair)
        a, b = pair
        touched: set[tuple[str, str]] = set()
        for idx in sorted(where.pop(pair, ())):
            symbols, f = words[idx], counts[idx]
            for p in _pairs(symbols):
                pair_counts[p] -= f
                touched.add(p)
                where[p].discard(idx)
            merged, i = [], 0
            while i < len(symbols):
                if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
                    merged.append(a + b)
                    i += 2
                else:
                    merged.append(symbols[i])
                    i += 1
            words[idx] = merged
            for p in _pairs(merged):
                pair_counts[p] += f
                touched.add(p)
                where[p].add(idx)
        pair_counts.pop(pair, None)
        for p in touched:
            c = pair_counts.get(p, 0)
            if c > 0:
                heapq.heappush(heap, (-c, p))
            else:
                pair_counts.pop(p, None)
                where.pop(p, None)
    return BpeModel(tuple(merges), marker_mode)


@lru_cache(maxsize=8)
def _ranks(model: BpeModel) -> dict[tuple[str, str], int]:
    return {pair: i for i, pair in enumerate(model.merges)}


def segment_word(word: str, model: BpeModel) -> list[str]:
    """Split one word into unmarked pieces by replaying merges in learned order."""
    ranks = _ranks(model)
    symbols = list(_word_symbols(word))
    while len(symbols) > 1:
        best = min(_pairs(symbols), key=lambda p: ranks.get(p, float("inf")))
        if best not in ranks:
            break
        a, b = best
        merged, i = [], 0
        while i < len(symbols):
            if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
                merged.append(a + b)
                i += 2
            else:
                merged.append(symbols[i])
                i += 1
        symbols = merged
    symbols[-1] = symbols[-1][: -len(END_OF_WORD)]
    if not symbols[-1]:
        symbols.pop()
    return symbols


def bpe_apply(sentence: Sentence, model: BpeModel) -> Sentence:
    cache: dict[str, list[str]] = {}
    out = []
    for tok in sentence:
        pieces = cache.get(tok.surface)
        if pieces is None:
            pieces = cache[tok.surface] = segment_word(tok.surface, model)
        last = len(pieces) - 1
        for i, piece in enumerate(pieces):
            if model.marker_mode == SUFFIX:
                surface = piece + MARKER if i < last else piece
            else:
                surface = MARKER + piece if i > 0 else piece
            out.append(AnnotatedToken(surface, tok.features))
    return Sentence(tuple(out))


def bpe_undo(sentence: Sentence, marker_mode: str = SUFFIX, warnings: Counter | None = None) -> Sentence:
    """Rejoin marked pieces; the joined token keeps its first piece's features."""
    out: list[AnnotatedToken] = []
    if marker_mode == SUFFIX:
        pending: list[str] = []
        features = ()
        for tok in sentence:
            if not pending:
                features = tok.features
            if tok.surface.endswith(MARKER):
                pending.append(tok.surface[: -len(MARKER)])
                continue
            out.append(AnnotatedToken("".join(pending) + tok.surface, features))
            pending = []
        if pending:
            log.warning("dangling BPE marker at end of sentence")
            if warnings is not None:
                warnings["dangling_marker"] += 1
            joined = "".join(pending)
            if joined:
                out.append(AnnotatedToken(joined, features))
    elif marker_mode == PREFIX:
        for tok in sentence:
            if tok.surface.startswith(MARKER):
                rest = tok.surface[len(MARKER):]
                if out:
                    prev = out[-1]
                    out[-1] = AnnotatedToken(prev.surface + rest, prev.features)
                    continue
                log.warning("dangling BPE marker at start of sentence")
                if warnings is not None:
                    warnings["dangling_marker"] += 1
                if rest:
                    out.append(AnnotatedToken(rest, tok.features))
                continue
            out.append(tok)
    else:
        raise ValueError(f"unknown marker mode {marker_mode!r}")
    return Sentence(tuple(out))
