"""Tokenization, instance matching, and adjacent-context extraction.

All operations here are pure over immutable inputs; per-document work can
run in parallel as long as results are concatenated in document-id order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

from . import tsv
from .corpus import CorpusManifest
from .seeds import LearningExample

LEFT = "left"
RIGHT = "right"

# Maximal runs of letters/digits, allowing internal apostrophes, periods
# and hyphens ("Bush's", "U.S", "far-right"). Underscore is a separator.
_WORD_RE = re.compile(r"[^\W_]+(?:['’.\-][^\W_]+)*")
_TERMINATORS = ".!?"

OCCURRENCES_HEADER = ["doc", "context_words", "side", "with_example", "example_surface"]


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class Tokenization:
    """Tokens of one document plus its sentence-boundary positions.

    `breaks` holds indices i such that a sentence ends between token i
    and token i+1 (or after the final token).
    """

    text: str
    tokens: tuple[Token, ...]
    breaks: frozenset[int]

    @cached_property
    def words(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def break_in(self, lo: int, hi: int) -> bool:
        """True if a sentence break follows any token j with lo <= j < hi."""
        return any(j in self.breaks for j in range(lo, hi))


def tokenize(text: str) -> Tokenization:
    """Split cleaned text into word tokens and find sentence breaks.

    A single letter immediately followed by a period keeps the period
    ("W."), which also stops that period from ending a sentence. A
    sentence ends only at '.', '!' or '?' followed by whitespace and a
    capitalized token, or at the end of the text; commas never end one.
    """
    tokens: list[Token] = []
    for m in _WORD_RE.finditer(text):
        start, end = m.span()
        if end - start == 1 and text[start].isalpha() and end < len(text) and text[end] == ".":
            end += 1
        tokens.append(Token(text[start:end], start, end))

    breaks = set()
    for i, tok in enumerate(tokens):
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        gap = text[tok.end : nxt.start if nxt else len(text)]
        for j, ch in enumerate(gap):
            if ch not in _TERMINATORS:
                continue
            rest = gap[j + 1 :]
            if nxt is None:
                if not rest or rest.isspace():
                    breaks.add(i)
                    break
            elif rest and rest.isspace() and nxt.text[0].isupper():
                breaks.add(i)
                break
    return Tokenization(text=text, tokens=tuple(tokens), breaks=frozenset(breaks))


@dataclass(frozen=True)
class InstanceOccurrence:
    """A learning-example match at tokens [first, last] of a document."""

    doc: str
    example: LearningExample
    first: int
    last: int


def find_instances(
    tok: Tokenization,
    examples: Iterable[LearningExample],
    doc: str = "",
) -> list[InstanceOccurrence]:
    """Locate example surfaces in a token sequence.

    Scans left to right, prefers the longest matching surface at each
    position, and consumes matched spans so occurrences never overlap.
    Matching is case-sensitive on exact token texts.
    """
    by_words: dict[tuple[str, ...], LearningExample] = {}
    for ex in examples:
        by_words.setdefault(tuple(ex.surface.split()), ex)
    lengths = sorted({len(w) for w in by_words}, reverse=True)
    words = tok.words
    out: list[InstanceOccurrence] = []
    i = 0
    n = len(words)
    while i < n:
        hit = None
        for length in lengths:
            if i + length <= n and words[i : i + length] in by_words:
                hit = (length, by_words[words[i : i + length]])
                break
        if hit is None:
            i += 1
            continue
        length, example = hit
        out.append(InstanceOccurrence(doc=doc, example=example, first=i, last=i + length - 1))
        i += length
    return out


@dataclass(frozen=True, order=True)
class ContextKey:
    """An n-word, case-sensitive sequence on one side of an entity."""

    words: tuple[str, ...]
    side: str = LEFT

    @property
    def length(self) -> int:
        return len(self.words)

    def phrase(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class ContextOccurrence:
    """One position where a context's word sequence appears in a document.

    `anchor` is the token index where the adjacent phrase begins; for
    right-side contexts without a matched example it points at the token
    just before the context. with_example=False occurrences are the ones
    counted against a context's pertinence.
    """

    context: ContextKey
    doc: str
    anchor: int
    with_example: bool
    example: Optional[LearningExample] = None


def extract_context(
    occurrence: InstanceOccurrence,
    tok: Tokenization,
    length: int = 2,
    side: str = LEFT,
) -> Optional[ContextKey]:
    """The `length` tokens adjacent to an instance, or None.

    Returns None when the window would run past the document edge or
    cross a sentence break (including the break between the window and
    the instance itself).
    """
    if length < 1:
        raise ValueError(f"context length must be >= 1, got {length}")
    words = tok.words
    if side == LEFT:
        lo = occurrence.first - length
        if lo < 0 or tok.break_in(lo, occurrence.first):
            return None
        return ContextKey(words[lo : occurrence.first], LEFT)
    if side == RIGHT:
        hi = occurrence.last + length
        if hi >= len(words) or tok.break_in(occurrence.last, hi):
            return None
        return ContextKey(words[occurrence.last + 1 : hi + 1], RIGHT)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def scan_tokenized(
    doc_id: str,
    tok: Tokenization,
    contexts: Iterable[ContextKey],
    instances: list[InstanceOccurrence],
) -> list[ContextOccurrence]:
    """All valid occurrences of the given contexts in one tokenized document.

    A position counts only when the context window plus its adjacency gap
    stays inside one sentence and an adjacent token exists, mirroring
    extract_context. with_example is True iff the adjacent span starts
    (left side) or ends (right side) a learning-example occurrence.
    """
    groups: dict[tuple[str, int], dict[tuple[str, ...], ContextKey]] = {}
    for key in contexts:
        groups.setdefault((key.side, key.length), {})[key.words] = key
    by_first = {occ.first: occ for occ in instances}
    by_last = {occ.last: occ for occ in instances}
    words = tok.words
    n = len(words)
    out: list[ContextOccurrence] = []
    for (side, length) in sorted(groups):
        keys = groups[(side, length)]
        for p in range(n - length + 1):
            key = keys.get(words[p : p + length])
            if key is None:
                continue
            if side == LEFT:
                adjacent = p + length
                if adjacent >= n or tok.break_in(p, adjacent):
                    continue
                occ = by_first.get(adjacent)
                out.append(
                    ContextOccurrence(
                        context=key,
                        doc=doc_id,
                        anchor=adjacent,
                        with_example=occ is not None,
                        example=occ.example if occ else None,
                    )
                )
            else:
                if p == 0 or tok.break_in(p - 1, p + length - 1):
                    continue
                occ = by_last.get(p - 1)
                out.append(
                    ContextOccurrence(
                        context=key,
                        doc=doc_id,
                        anchor=occ.first if occ else p - 1,
                        with_example=occ is not None,
                        example=occ.example if occ else None,
                    )
                )
    return out


def scan_context_occurrences(
    corpus: CorpusManifest,
    contexts: Iterable[ContextKey],
    examples: Iterable[LearningExample],
) -> list[ContextOccurrence]:
    """Scan every document of a corpus for the given contexts."""
    examples = list(examples)
    contexts = list(contexts)
    out: list[ContextOccurrence] = []
    for doc in corpus:
        tok = tokenize(doc.clean)
        instances = find_instances(tok, examples, doc=doc.id)
        out.extend(scan_tokenized(doc.id, tok, contexts, instances))
    return out


def write_occurrences(occurrences: list[ContextOccurrence], path: str | Path) -> None:
    rows = [
        [
            occ.doc,
            occ.context.phrase(),
            occ.context.side,
            "true" if occ.with_example else "false",
            occ.example.surface if occ.example else "",
        ]
        for occ in occurrences
    ]
    tsv.write_rows(path, OCCURRENCES_HEADER, rows)
