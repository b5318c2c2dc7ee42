"""Context pertinence weighting, plus a tf-idf baseline for comparison.

The composite weight of a context multiplies four factors:

* cf  -- share of all example-adjacent context occurrences this context owns
* lef -- fraction of the learning examples it appeared next to
* df  -- fraction of the corpus's sources it appeared in
* icf -- its example-adjacent count over its other-adjacent count

Each factor is exposed on its own so the parts can be inspected or
re-weighted; `context_weight` is their plain product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from . import tsv
from .corpus import CorpusManifest
from .errors import DataFormatError, EmptyResultError
from .extract import (
    LEFT,
    RIGHT,
    ContextKey,
    InstanceOccurrence,
    Tokenization,
    extract_context,
    find_instances,
    scan_tokenized,
    tokenize,
)
from .seeds import LearningExample, single_class

WEIGHT_HEADER = ["context", "cf", "df", "lef", "icf", "w"]


def context_frequency(count: int, total: int) -> float:
    """Occurrences of one context next to examples over all such occurrences."""
    if count < 0 or total <= 0 or count > total:
        raise ValueError(f"bad context frequency counts: {count}/{total}")
    return count / total


def learning_example_frequency(seen: int, total: int) -> float:
    """Distinct examples a context appeared next to over all examples."""
    if seen < 0 or total <= 0 or seen > total:
        raise ValueError(f"bad example counts: {seen}/{total}")
    return seen / total


def document_frequency(sources: int, docs: int) -> float:
    """Distinct sources a context occurred in over documents containing it."""
    if sources < 1 or docs < 1 or sources > docs:
        raise ValueError(f"bad document counts: {sources}/{docs}")
    return sources / docs


def inverse_context_frequency(with_examples: int, with_others: int) -> float:
    """Example-adjacent count over other-adjacent count, floored at 1.

    A context never seen next to anything other than examples keeps its
    full count rather than dividing by zero. Contexts are only stored
    when seen with at least one example, so with_examples must be >= 1.
    """
    if with_examples < 1:
        raise ValueError(
            f"need at least one example-adjacent occurrence, got {with_examples}"
        )
    if with_others < 0:
        raise ValueError(f"other-occurrence count must be non-negative: {with_others}")
    return with_examples / max(with_others, 1)


def context_weight(cf: float, lef: float, df: float, icf: float) -> float:
    """Composite pertinence: the product of the four factors."""
    for name, value in (("cf", cf), ("lef", lef), ("df", df), ("icf", icf)):
        if value < 0:
            raise ValueError(f"{name} must be non-negative, got {value}")
    return cf * lef * df * icf


def term_frequency(count: int, doc_total: int) -> float:
    if count < 0 or doc_total <= 0 or count > doc_total:
        raise ValueError(f"bad term frequency counts: {count}/{doc_total}")
    return count / doc_total


def inverse_document_frequency(n_docs: int, n_containing: int) -> float:
    """log10 of total documents over documents containing the term."""
    if n_containing < 1 or n_docs < n_containing:
        raise ValueError(f"bad idf counts: {n_docs}/{n_containing}")
    return math.log10(n_docs / n_containing)


def tf_idf(tf: float, idf: float) -> float:
    return tf * idf


@dataclass(frozen=True)
class ContextStats:
    """Raw counts for one context over a corpus."""

    context: ContextKey
    n_with_examples: int
    n_with_others: int
    n_examples_seen: int
    n_docs: int
    n_sources: int


@dataclass(frozen=True)
class GlobalStats:
    """Corpus-wide totals the per-context factors are normalized by."""

    total_with_examples: int
    n_examples: int
    class_label: str = ""


@dataclass(frozen=True)
class WeightedContext:
    stats: ContextStats
    cf: float
    lef: float
    df: float
    icf: float
    weight: float

    @property
    def context(self) -> ContextKey:
        return self.stats.context


@dataclass(frozen=True)
class TableConfig:
    context_len: int = 2
    side: str = LEFT
    min_count: int = 1

    def __post_init__(self) -> None:
        if self.context_len < 1:
            raise ValueError(f"context_len must be >= 1, got {self.context_len}")
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")


def collect_context_stats(
    corpus: CorpusManifest,
    examples: Iterable[LearningExample],
    config: TableConfig = TableConfig(),
) -> tuple[list[ContextStats], GlobalStats]:
    """Gather raw per-context counts from a corpus.

    First pass pulls the adjacent context of every example occurrence;
    second pass rescans all documents for those contexts to split
    example-adjacent from other-adjacent occurrences and collect the
    document / source / example coverage.
    """
    examples = list(examples)
    label = single_class(examples)
    contexts: set[ContextKey] = set()
    total_with_examples = 0
    tokenized: list[tuple[str, str, Tokenization]] = []
    per_doc_instances: dict[str, list[InstanceOccurrence]] = {}
    for doc in corpus:
        tok = tokenize(doc.clean)
        instances = find_instances(tok, examples, doc=doc.id)
        per_doc_instances[doc.id] = instances
        tokenized.append((doc.id, doc.source, tok))
        for occ in instances:
            key = extract_context(occ, tok, config.context_len, config.side)
            if key is not None:
                contexts.add(key)
                total_with_examples += 1

    with_examples: dict[ContextKey, int] = {}
    with_others: dict[ContextKey, int] = {}
    seen_examples: dict[ContextKey, set[str]] = {}
    docs_seen: dict[ContextKey, set[str]] = {}
    sources_seen: dict[ContextKey, set[str]] = {}
    for doc_id, source, tok in tokenized:
        occs = scan_tokenized(doc_id, tok, contexts, per_doc_instances[doc_id])
        for occ in occs:
            key = occ.context
            docs_seen.setdefault(key, set()).add(doc_id)
            sources_seen.setdefault(key, set()).add(source)
            if occ.with_example:
                with_examples[key] = with_examples.get(key, 0) + 1
                assert occ.example is not None
                seen_examples.setdefault(key, set()).add(occ.example.surface)
            else:
                with_others[key] = with_others.get(key, 0) + 1

    stats = [
        ContextStats(
            context=key,
            n_with_examples=with_examples.get(key, 0),
            n_with_others=with_others.get(key, 0),
            n_examples_seen=len(seen_examples.get(key, ())),
            n_docs=len(docs_seen.get(key, ())),
            n_sources=len(sources_seen.get(key, ())),
        )
        for key in sorted(contexts)
    ]
    totals = GlobalStats(
        total_with_examples=total_with_examples,
        n_examples=len({ex.surface for ex in examples}),
        class_label=label,
    )
    return stats, totals


@dataclass(frozen=True)
class WeightTable:
    rows: tuple[WeightedContext, ...]
    totals: GlobalStats

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def as_mapping(self) -> dict[ContextKey, float]:
        return {row.context: row.weight for row in self.rows}


def weigh_context(stats: ContextStats, totals: GlobalStats) -> WeightedContext:
    cf = context_frequency(stats.n_with_examples, totals.total_with_examples)
    lef = learning_example_frequency(stats.n_examples_seen, totals.n_examples)
    df = document_frequency(stats.n_sources, stats.n_docs)
    icf = inverse_context_frequency(stats.n_with_examples, stats.n_with_others)
    return WeightedContext(
        stats=stats,
        cf=cf,
        lef=lef,
        df=df,
        icf=icf,
        weight=context_weight(cf, lef, df, icf),
    )


def build_weight_table(
    corpus: CorpusManifest,
    examples: Iterable[LearningExample],
    config: TableConfig = TableConfig(),
) -> WeightTable:
    """Score every context of a corpus against a single class's examples."""
    stats, totals = collect_context_stats(corpus, examples, config)
    if not stats:
        raise EmptyResultError(
            "no contexts extracted; check that the examples occur in the corpus"
        )
    kept = [s for s in stats if s.n_with_examples >= config.min_count]
    if not kept:
        raise EmptyResultError(
            f"no context occurs with examples at least {config.min_count} times"
        )
    rows = [weigh_context(s, totals) for s in kept]
    rows.sort(key=lambda r: (-r.weight, -r.stats.n_with_examples, r.context.words))
    return WeightTable(rows=tuple(rows), totals=totals)


def format_weight_table(table: WeightTable) -> str:
    rows = [
        [
            row.context.phrase(),
            f"{row.cf:.7g}",
            f"{row.df:.7g}",
            f"{row.lef:.7g}",
            f"{row.icf:.7g}",
            f"{row.weight:.7g}",
        ]
        for row in table.rows
    ]
    return tsv.format_rows(WEIGHT_HEADER, rows)


def write_weight_table(table: WeightTable, path: str | Path) -> None:
    Path(path).write_text(format_weight_table(table), encoding="utf-8", newline="\n")


def read_weight_mapping(path: str | Path, side: str = LEFT) -> dict[ContextKey, float]:
    """Load context -> weight from a saved table, dropping non-positive rows."""
    mapping: dict[ContextKey, float] = {}
    for lineno, row in tsv.read_rows(path, WEIGHT_HEADER):
        phrase, _cf, _df, _lef, _icf, w = row
        words = tuple(phrase.split())
        if not words:
            raise DataFormatError(f"{path}:{lineno}: empty context phrase")
        try:
            weight = float(w)
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad weight {w!r}") from exc
        if weight <= 0 or not math.isfinite(weight):
            continue
        mapping[ContextKey(words, side)] = weight
    return mapping
