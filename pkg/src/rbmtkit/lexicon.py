"""Monolingual lexicon entries, ambiguity classes and bilingual term dictionaries.

Lexicon files hold one parenthesized form per entry::

    ("snake" NST ALO "snake" CL (P-S S-01) KN CNT ON CO SX (N) TYN (ANI))

The quoted headword comes first, then the category, then alternating
key/value items. A parenthesized value is a list; nested groups (ARGS) are
kept as nested tuples and never interpreted.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import MissingCategory, MissingField, MissingSurface, UnbalancedParens, LexiconSyntaxError

log = logging.getLogger(__name__)

UNKNOWN = "NONE"

Value = Union[str, tuple]


class _Quoted(str):
    pass


def _tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            yield c, i
            i += 1
        elif c == '"':
            buf, j = [], i + 1
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                buf.append(text[j])
                j += 1
            if j >= n:
                raise UnbalancedParens(f"unterminated string starting at offset {i}")
            yield _Quoted("".join(buf)), i
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()"':
                j += 1
            yield text[i:j], i
            i = j


def _read_forms(text: str) -> list[tuple]:
    stack: list[list] = []
    forms = []
    for tok, offset in _tokenize(text):
        if tok == "(" and not isinstance(tok, _Quoted):
            stack.append([])
        elif tok == ")" and not isinstance(tok, _Quoted):
            if not stack:
                raise UnbalancedParens(f"unexpected ')' at offset {offset}")
            group = tuple(stack.pop())
            if stack:
                stack[-1].append(group)
            else:
                forms.append(group)
        elif stack:
            stack[-1].append(tok)
        else:
            raise LexiconSyntaxError(f"atom {tok!r} outside of any entry at offset {offset}")
    if stack:
        raise UnbalancedParens(f"{len(stack)} unclosed '(' at end of input")
    return forms


def _plain(v):
    if isinstance(v, tuple):
        return tuple(_plain(x) for x in v)
    return str(v)


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    category: str
    attributes: dict[str, list[Value]] = field(default_factory=dict, hash=False, compare=True)

    @property
    def cl(self) -> list[str]:
        return [render_value(v) for v in self.attributes.get("CL", [])]


def render_value(v: Value) -> str:
    if isinstance(v, tuple):
        return "(" + " ".join(render_value(x) for x in v) + ")"
    return v


def _entry_from_form(form: tuple) -> LexiconEntry:
    if not form or not isinstance(form[0], _Quoted) or not form[0]:
        raise MissingSurface(f"entry does not start with a quoted headword: {render_value(_plain(form))}")
    if len(form) < 2 or isinstance(form[1], (tuple, _Quoted)):
        raise MissingCategory(f"entry {form[0]!r} has no category atom")
    attributes: dict[str, list[Value]] = {}
    key = None
    expecting_key = True
    for item in form[2:]:
        if expecting_key and isinstance(item, str) and not isinstance(item, _Quoted):
            key = str(item)
            attributes.setdefault(key, [])
            expecting_key = False
            continue
        if key is None:
            raise LexiconSyntaxError(f"entry {form[0]!r}: value {item!r} before any key")
        if isinstance(item, tuple):
            attributes[key].extend(_plain(x) for x in item)
        else:
            attributes[key].append(str(item))
        expecting_key = True
    return LexiconEntry(str(form[0]), str(form[1]), attributes)


def parse_lexicon(text: str) -> list[LexiconEntry]:
    return [_entry_from_form(form) for form in _read_forms(text)]


@dataclass(frozen=True)
class FeatureBundle:
    cat_tag: str
    cl_tag: str


class AmbiguityIndex:
    """Case-folded surface -> entries, ordered by (category, file position)."""

    def __init__(self, entries_by_surface: dict[str, list[LexiconEntry]] | None = None):
        self.entries_by_surface = entries_by_surface or {}

    def __len__(self):
        return len(self.entries_by_surface)

    def __contains__(self, surface: str) -> bool:
        return surface.casefold() in self.entries_by_surface

    def lookup(self, surface: str) -> list[LexiconEntry]:
        return list(self.entries_by_surface.get(surface.casefold(), []))

    def categories(self, surface: str) -> set[str]:
        return {e.category for e in self.lookup(surface)}


def build_ambiguity_index(entries: Iterable[LexiconEntry]) -> AmbiguityIndex:
    grouped: dict[str, list[LexiconEntry]] = defaultdict(list)
    for entry in entries:
        grouped[entry.surface.casefold()].append(entry)
    # sorted() is stable, so file order survives within one category
    return AmbiguityIndex({k: sorted(v, key=lambda e: e.category) for k, v in grouped.items()})


def bundle_for(entries: list[LexiconEntry]) -> FeatureBundle:
    """Ambiguity-class tags for a set of analyses of one surface."""
    if not entries:
        return FeatureBundle(UNKNOWN, UNKNOWN)
    ordered = sorted(entries, key=lambda e: e.category)
    cat_tag = "_".join(sorted({e.category for e in ordered}))
    cl_tag = "_".join("+".join(e.cl) or UNKNOWN for e in ordered)
    return FeatureBundle(cat_tag, cl_tag)


def lookup_features(surface: str, index: AmbiguityIndex) -> FeatureBundle:
    return bundle_for(index.lookup(surface))


@dataclass
class TermDictionary:
    entries: dict[tuple[tuple[str, ...], str], tuple[str, ...]] = field(default_factory=dict)
    duplicates: int = 0

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key) -> bool:
        return self._key(*key) in self.entries

    @staticmethod
    def _key(phrase, label):
        if isinstance(phrase, str):
            phrase = phrase.split()
        return tuple(phrase), label

    def get(self, phrase, label, default=None):
        return self.entries.get(self._key(phrase, label), default)

    def add(self, phrase, label, target) -> None:
        if isinstance(target, str):
            target = target.split()
        key = self._key(phrase, label)
        if not key[0] or not target:
            raise MissingField("term dictionary phrases must be non-empty")
        if key in self.entries:
            self.duplicates += 1
            log.warning("duplicate term %r/%s: last entry wins", " ".join(key[0]), label)
        self.entries[key] = tuple(target)

    def items(self):
        return self.entries.items()


def parse_term_dictionary(text: str) -> TermDictionary:
    """Read ``source<TAB>target<TAB>label`` lines; blank lines are skipped."""
    terms = TermDictionary()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 3 or not all(c.strip() for c in cols[:3]):
            raise MissingField(f"line {lineno}: expected source<TAB>target<TAB>label")
        source, target, label = (c.strip() for c in cols[:3])
        terms.add(source, label, target)
    return terms
