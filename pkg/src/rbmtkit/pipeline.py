"""Orchestration helpers: focused test-set selection, back-translation through
an external command, vocabulary capping and ``key = value`` configuration."""

from __future__ import annotations

import hashlib
import shlex
import subprocess
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import AnnotatedToken, ParallelPair, Sentence, iter_lines
from .entity import EntitySpan
from .errors import TranslatorLineMismatch, TranslatorTimeout, ValidationError

SURFACE_SET, SPAN_PRESENCE = "surface-set", "span-presence"


def line_hash(text: str) -> str:
    """Canonical hash of a whitespace-normalized, lowercased line."""
    canon = " ".join(text.split()).lower()
    return hashlib.sha1(canon.encode("utf-8")).hexdigest()


def exclusion_set(lines: Iterable[str]) -> set[str]:
    return {line_hash(line) for line in lines}


@dataclass(frozen=True)
class FocusPredicate:
    kind: str
    surface_forms: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.kind not in (SURFACE_SET, SPAN_PRESENCE):
            raise ValueError(f"unknown focus kind {self.kind!r}")
        if self.kind == SURFACE_SET and not self.surface_forms:
            raise ValidationError("a surface-set focus needs at least one surface form")

    def matches(self, pair: ParallelPair, spans: Sequence[EntitySpan] | None = None) -> bool:
        if self.kind == SURFACE_SET:
            return any(s in self.surface_forms for s in pair.source.surfaces)
        return bool(spans)


def select_focused(
    corpus: Iterable[ParallelPair],
    predicate: FocusPredicate,
    exclusion: set[str] = frozenset(),
    spans_per_pair: Iterable[Sequence[EntitySpan]] | None = None,
) -> Iterator[ParallelPair]:
    """Yield matching pairs whose source is unseen in training/dev data.

    Exact source-line repeats (by canonical hash) are emitted once.
    """
    if predicate.kind == SPAN_PRESENCE and spans_per_pair is None:
        raise ValidationError("span-presence selection needs a span stream")
    spans_iter = iter(spans_per_pair) if spans_per_pair is not None else None
    seen: set[str] = set()
    for pair in corpus:
        spans = next(spans_iter, None) if spans_iter is not None else None
        key = line_hash(pair.source.text())
        if key in exclusion or key in seen:
            continue
        if predicate.matches(pair, spans):
            seen.add(key)
            yield pair


def take_random(pairs: Sequence, n: int, seed: int | None = 0) -> list:
    """Seeded subsample of ``n`` items, keeping their original order."""
    if n >= len(pairs):
        return list(pairs)
    rng = np.random.default_rng(seed)
    keep = sorted(rng.choice(len(pairs), size=n, replace=False).tolist())
    return [pairs[i] for i in keep]


@dataclass(frozen=True)
class TranslatorContract:
    """A file-in/file-out command. ``{input}`` and ``{output}`` are substituted."""

    command: str
    timeout: float | None = None

    def run(self, lines: Sequence[str]) -> list[str]:
        with tempfile.TemporaryDirectory(prefix="rbmtkit-bt-") as tmp:
            src, out = Path(tmp) / "input.txt", Path(tmp) / "output.txt"
            src.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
            argv = [a.format(input=src, output=out) for a in shlex.split(self.command)]
            try:
                subprocess.run(argv, check=True, timeout=self.timeout, stdin=subprocess.DEVNULL)
            except subprocess.TimeoutExpired as exc:
                raise TranslatorTimeout(f"translator exceeded {self.timeout}s") from exc
            except subprocess.CalledProcessError as exc:
                raise TranslatorLineMismatch(f"translator exited with status {exc.returncode}") from exc
            if not out.exists():
                raise TranslatorLineMismatch("translator produced no output file")
            result = list(iter_lines(out))
        if len(result) != len(lines):
            raise TranslatorLineMismatch(f"translator returned {len(result)} lines for {len(lines)}")
        return result


def backtranslate_round(mono_target: Sequence[Sentence], translator: TranslatorContract) -> list[ParallelPair]:
    """Translate target-side text into synthetic sources, one pair per line."""
    targets = list(mono_target)
    sources = translator.run([t.text() for t in targets])
    return [ParallelPair(i, Sentence.from_text(s), t) for i, (s, t) in enumerate(zip(sources, targets))]


def build_vocabulary(corpus: Iterable[Sentence], max_size: int, unk_token: str | None = None) -> list[tuple[str, int]]:
    """The ``max_size`` most frequent surfaces; ties go to lexicographic order.

    ``unk_token`` never competes for a slot, which keeps capping idempotent.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    freqs = Counter(tok.surface for sent in corpus for tok in sent if tok.surface != unk_token)
    return sorted(freqs.items(), key=lambda kv: (-kv[1], kv[0]))[:max_size]


def cap_vocabulary(
    corpus: Sequence[Sentence], max_size: int = 50000, unk_token: str = "<unk>"
) -> tuple[list[Sentence], list[tuple[str, int]]]:
    corpus = list(corpus)
    vocab = build_vocabulary(corpus, max_size, unk_token)
    keep = {w for w, _ in vocab} | {unk_token}
    capped = [
        Sentence(tuple(t if t.surface in keep else AnnotatedToken(unk_token, t.features) for t in sent))
        for sent in corpus
    ]
    return capped, vocab


@dataclass
class Config:
    """Line-oriented ``key = value`` settings; ``#`` starts a comment."""

    values: dict[str, str] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> Config:
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq or not key.strip():
                raise ValidationError(f"config line {lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = value.strip()
        return cls(values)

    @classmethod
    def load(cls, path) -> Config:
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in sorted(self.values.items()))
