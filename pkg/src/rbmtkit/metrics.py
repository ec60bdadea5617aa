"""BLEU, TER and chrF on pre-tokenized text, UNK counting, and paired
bootstrap resampling.

Every metric is computed from additive per-sentence sufficient statistics so
that corpus scores and bootstrap samples share one code path.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .corpus import Sentence
from .errors import EmptyCorpus, EmptyReference, LineCountMismatch

TokensLike = Union[Sentence, str, Sequence[str]]

TER_MAX_SHIFT_SIZE = 10
TER_MAX_SHIFT_DIST = 50


@dataclass(frozen=True)
class MetricScore:
    metric: str
    value: float

    def __float__(self):
        return float(self.value)


def _tokens(x: TokensLike) -> list[str]:
    if isinstance(x, Sentence):
        return x.surfaces
    if isinstance(x, str):
        return x.split()
    return list(x)


def _paired(hypotheses, references):
    hyps, refs = list(hypotheses), list(references)
    if len(hyps) != len(refs):
        raise LineCountMismatch(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise EmptyCorpus("no sentences to score")
    return hyps, refs


# BLEU

def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(hypothesis: TokensLike, reference: TokensLike, max_n: int = 4) -> np.ndarray:
    """[matches_1..n, totals_1..n, hyp_len, ref_len] for one sentence pair."""
    h, r = _tokens(hypothesis), _tokens(reference)
    stats = np.zeros(2 * max_n + 2)
    for n in range(1, max_n + 1):
        hn = _ngrams(h, n)
        stats[n - 1] = sum((hn & _ngrams(r, n)).values())
        stats[max_n + n - 1] = sum(hn.values())
    stats[-2], stats[-1] = len(h), len(r)
    return stats


def bleu_from_stats(stats: np.ndarray, max_n: int = 4, smoothing: str = "none") -> float:
    if smoothing not in ("none", "add1"):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    hyp_len, ref_len = stats[-2], stats[-1]
    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        match, total = stats[n - 1], stats[max_n + n - 1]
        if smoothing == "add1" and n > 1:
            match, total = match + 1, total + 1
        if match == 0 or total == 0:
            return 0.0
        log_sum += math.log(match / total)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1 - ref_len / hyp_len)
    return min(100.0, 100.0 * bp * math.exp(log_sum / max_n))


def bleu(
    hypotheses: Iterable[TokensLike],
    references: Iterable[TokensLike],
    max_n: int = 4,
    smoothing: str = "none",
) -> MetricScore:
    hyps, refs = _paired(hypotheses, references)
    stats = sum(bleu_stats(h, r, max_n) for h, r in zip(hyps, refs))
    return MetricScore("bleu", bleu_from_stats(stats, max_n, smoothing))


def sentence_bleu(hypothesis: TokensLike, reference: TokensLike, max_n: int = 4, smoothing: str = "none") -> MetricScore:
    return bleu([hypothesis], [reference], max_n, smoothing)


# TER

def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _matched_positions(h: Sequence[str], r: Sequence[str]) -> dict[int, int]:
    """hyp index -> ref index for exact matches on one minimal edit path."""
    rows, cols = len(h) + 1, len(r) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (h[i - 1] != r[j - 1]))
    matched = {}
    i, j = len(h), len(r)
    while i > 0 and j > 0:
        if h[i - 1] == r[j - 1] and d[i][j] == d[i - 1][j - 1]:
            matched[i - 1] = j - 1
            i, j = i - 1, j - 1
        elif d[i][j] == d[i - 1][j - 1] + 1:
            i, j = i - 1, j - 1
        elif d[i][j] == d[i - 1][j] + 1:
            i -= 1
        else:
            j -= 1
    return matched


def _advance(rows: np.ndarray, token: str, r: Sequence[str]) -> np.ndarray:
    """Extend edit-distance DP rows (last axis over ref prefixes) by one hyp token."""
    sub = np.array([token != y for y in r], dtype=np.int64)
    diag = np.minimum(rows[..., 1:] + 1, rows[..., :-1] + sub)
    cand = np.concatenate([rows[..., :1] + 1, diag], axis=-1)
    # insertions: cur[c] = min(cand[c], cur[c-1] + 1)
    offs = np.arange(cand.shape[-1])
    return np.minimum.accumulate(cand - offs, axis=-1) + offs


def _prefix_rows(seq: Sequence[str], r: Sequence[str]) -> np.ndarray:
    """Row j holds ED(seq[:j], r[:c]) for every c."""
    rows = np.empty((len(seq) + 1, len(r) + 1), dtype=np.int64)
    rows[0] = np.arange(len(r) + 1)
    for j, tok in enumerate(seq):
        rows[j + 1] = _advance(rows[j], tok, r)
    return rows


def _shift_distances(rest: list[str], block: list[str], r: Sequence[str], lo: int, hi: int) -> np.ndarray:
    """ED(rest[:j] + block + rest[j:], r) for every j in [lo, hi]."""
    fwd = _prefix_rows(rest, r)[lo:hi + 1]
    # suffix rows via the reversed problem: bwd[j][c] = ED(rest[j:], r[c:])
    bwd = _prefix_rows(rest[::-1], r[::-1])[::-1][:, ::-1][lo:hi + 1]
    for tok in block:
        fwd = _advance(fwd, tok, r)
    return (fwd + bwd).min(axis=1)


def _best_shift(h: list[str], r: list[str], current: int, max_size: int, max_dist: int):
    ref_blocks: dict[tuple, list[int]] = {}
    for k in range(len(r)):
        for size in range(1, min(max_size, len(r) - k) + 1):
            ref_blocks.setdefault(tuple(r[k:k + size]), []).append(k)
    matched = _matched_positions(h, r)
    best_gain, best = 0, None
    for i in range(len(h)):
        for size in range(1, min(max_size, len(h) - i) + 1):
            block = h[i:i + size]
            starts = ref_blocks.get(tuple(block))
            if starts is None:
                break
            if all(all(matched.get(i + t) == k + t for t in range(size)) for k in starts):
                continue  # already sits on every matching reference position
            rest = h[:i] + h[i + size:]
            lo, hi = max(0, i - max_dist), min(len(rest), i + max_dist)
            gains = current - _shift_distances(rest, block, r, lo, hi)
            gains[i - lo] = 0  # j == i puts the block back
            j = int(np.argmax(gains))
            if gains[j] > best_gain:
                best_gain = int(gains[j])
                best = rest[:lo + j] + block + rest[lo + j:]
    return best_gain, best


def ter_stats(
    hypothesis: TokensLike,
    reference: TokensLike,
    shifts: bool = True,
    max_shift_size: int = TER_MAX_SHIFT_SIZE,
    max_shift_dist: int = TER_MAX_SHIFT_DIST,
) -> tuple[int, int]:
    """Return (edits, reference length); edits include one per block shift."""
    h, r = _tokens(hypothesis), _tokens(reference)
    n_shifts = 0
    current = edit_distance(h, r)
    while shifts and current > 0:
        gain, shifted = _best_shift(h, r, current, max_shift_size, max_shift_dist)
        if shifted is None:
            break
        h, current = shifted, current - gain
        n_shifts += 1
    return n_shifts + current, len(r)


def ter(hypothesis: TokensLike, reference: TokensLike, shifts: bool = True) -> MetricScore:
    edits, ref_len = ter_stats(hypothesis, reference, shifts)
    if ref_len == 0:
        raise EmptyReference("TER needs a non-empty reference")
    return MetricScore("ter", edits / ref_len)


def corpus_ter(hypotheses: Iterable[TokensLike], references: Iterable[TokensLike], shifts: bool = True) -> MetricScore:
    hyps, refs = _paired(hypotheses, references)
    edits = ref_len = 0
    for h, r in zip(hyps, refs):
        e, n = ter_stats(h, r, shifts)
        edits, ref_len = edits + e, ref_len + n
    if ref_len == 0:
        raise EmptyReference("TER needs non-empty references")
    return MetricScore("ter", edits / ref_len)


# chrF

def _char_stream(x: TokensLike, strip_whitespace: bool) -> str:
    if isinstance(x, str):
        return "".join(x.split()) if strip_whitespace else x.strip()
    return ("" if strip_whitespace else " ").join(_tokens(x))


def chrf_stats(hypothesis: TokensLike, reference: TokensLike, max_n: int = 6, strip_whitespace: bool = True) -> np.ndarray:
    """Per order n: [hyp n-grams, ref n-grams, common n-grams], flattened."""
    h, r = _char_stream(hypothesis, strip_whitespace), _char_stream(reference, strip_whitespace)
    stats = np.zeros(3 * max_n)
    for n in range(1, max_n + 1):
        hn = Counter(h[i:i + n] for i in range(len(h) - n + 1))
        rn = Counter(r[i:i + n] for i in range(len(r) - n + 1))
        stats[3 * (n - 1):3 * n] = sum(hn.values()), sum(rn.values()), sum((hn & rn).values())
    return stats


def chrf_from_stats(stats: np.ndarray, beta: float = 3.0) -> float:
    precision = recall = 0.0
    orders = 0
    for hyp_n, ref_n, common in stats.reshape(-1, 3):
        if hyp_n > 0 and ref_n > 0:
            precision += common / hyp_n
            recall += common / ref_n
            orders += 1
    if orders == 0:
        return 0.0
    precision, recall = precision / orders, recall / orders
    if precision + recall == 0:
        return 0.0
    b2 = beta ** 2
    return 100.0 * (1 + b2) * precision * recall / (b2 * precision + recall)


def chrf(
    hypothesis: TokensLike,
    reference: TokensLike,
    max_n: int = 6,
    beta: float = 3.0,
    strip_whitespace: bool = True,
) -> MetricScore:
    return MetricScore("chrf", chrf_from_stats(chrf_stats(hypothesis, reference, max_n, strip_whitespace), beta))


def corpus_chrf(hypotheses, references, max_n: int = 6, beta: float = 3.0, strip_whitespace: bool = True) -> MetricScore:
    hyps, refs = _paired(hypotheses, references)
    stats = sum(chrf_stats(h, r, max_n, strip_whitespace) for h, r in zip(hyps, refs))
    return MetricScore("chrf", chrf_from_stats(stats, beta))


def count_unks(hypotheses: Iterable[TokensLike], unk_token: str = "<unk>") -> int:
    return sum(_tokens(h).count(unk_token) for h in hypotheses)


# Paired bootstrap resampling

@dataclass(frozen=True)
class CorpusMetric:
    name: str
    sentence_stats: Callable[[TokensLike, TokensLike], np.ndarray]
    from_stats: Callable[[np.ndarray], float]
    higher_is_better: bool = True


def _ter_sentence_stats(h, r):
    return np.asarray(ter_stats(h, r), dtype=float)


def _ter_from_stats(stats):
    return stats[0] / stats[1] if stats[1] else 0.0


METRICS = {
    "bleu": CorpusMetric("bleu", bleu_stats, bleu_from_stats),
    "chrf": CorpusMetric("chrf", chrf_stats, chrf_from_stats),
    "ter": CorpusMetric("ter", _ter_sentence_stats, _ter_from_stats, higher_is_better=False),
}


@dataclass(frozen=True)
class SignificanceReport:
    metric: str
    win_fraction: float
    p_value: float
    significant: bool
    alpha: float
    score_a: float
    score_b: float
    iterations: int
    sample_size: int
    seed: int | None
    deltas: tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def verdict(self) -> str:
        return "significant" if self.significant else "not significant"

    def as_dict(self) -> dict:
        return {
            "metric": self.metric,
            "win_fraction": self.win_fraction,
            "p_value": self.p_value,
            "significant": self.significant,
            "verdict": self.verdict,
            "alpha": self.alpha,
            "score_a": self.score_a,
            "score_b": self.score_b,
            "iterations": self.iterations,
            "sample_size": self.sample_size,
            "seed": self.seed,
        }


def bootstrap_significance(
    hyps_a: Iterable[TokensLike],
    hyps_b: Iterable[TokensLike],
    references: Iterable[TokensLike],
    metric: str | CorpusMetric = "bleu",
    sample_size: int = 1000,
    iterations: int = 1000,
    alpha: float = 0.05,
    seed: int | None = 0,
) -> SignificanceReport:
    """Paired bootstrap: how often does system A beat system B on resamples?

    Each iteration draws ``sample_size`` sentence indices with replacement and
    scores both systems on that sample. Ties count as half a win.
    """
    m = METRICS[metric] if isinstance(metric, str) else metric
    a, b, refs = list(hyps_a), list(hyps_b), list(references)
    if not (len(a) == len(b) == len(refs)):
        raise LineCountMismatch(f"line counts differ: {len(a)}, {len(b)}, {len(refs)}")
    if not refs:
        raise EmptyCorpus("no sentences to resample")
    stats_a = np.array([m.sentence_stats(h, r) for h, r in zip(a, refs)])
    stats_b = np.array([m.sentence_stats(h, r) for h, r in zip(b, refs)])
    # one child seed per iteration, so iterations can run in any order
    children = np.random.SeedSequence(seed).spawn(iterations)
    wins = ties = 0
    deltas = []
    for child in children:
        idx = np.random.default_rng(child).integers(0, len(refs), size=sample_size)
        sa, sb = m.from_stats(stats_a[idx].sum(axis=0)), m.from_stats(stats_b[idx].sum(axis=0))
        diff = sa - sb if m.higher_is_better else sb - sa
        deltas.append(sa - sb)
        if diff > 0:
            wins += 1
        elif diff == 0:
            ties += 1
    win_fraction = (wins + 0.5 * ties) / iterations
    p_value = 1.0 - win_fraction
    return SignificanceReport(
        metric=m.name,
        win_fraction=win_fraction,
        p_value=p_value,
        significant=p_value < alpha,
        alpha=alpha,
        score_a=m.from_stats(stats_a.sum(axis=0)),
        score_b=m.from_stats(stats_b.sum(axis=0)),
        iterations=iterations,
        sample_size=sample_size,
        seed=seed,
        deltas=tuple(deltas),
    )
