"""Entity recognition by weighted context voting.

A model holds one context->weight table per class. Candidate spans are
wherever a known context's words appear; each class whose table contains
an adjacent context of the span adds that context's weight to its vote,
and the winning class must clear a threshold and beat the runner-up by a
margin or the span stays `unknown`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from . import tsv
from .corpus import Document
from .errors import DataFormatError, InputError
from .extract import LEFT, RIGHT, ContextKey, Tokenization, tokenize
from .weighting import WeightTable, read_weight_mapping, write_weight_table

UNKNOWN = "unknown"

MODEL_FILE = "model.tsv"
MODEL_HEADER = ["class", "table_file", "threshold", "margin"]
ANNOTATIONS_HEADER = [
    "doc",
    "start_token",
    "end_token",
    "surface",
    "class",
    "score",
    "runner_up",
]

_LABEL_RE = re.compile(r"[A-Za-z0-9_.-]+\Z")


@dataclass(frozen=True)
class RecognitionModel:
    """Per-class context weights plus the decision parameters."""

    tables: dict[str, dict[ContextKey, float]]
    threshold: float = 0.0
    margin: float = 0.0
    max_entity_tokens: int = 4

    def __post_init__(self) -> None:
        if self.threshold < 0 or self.margin < 0:
            raise ValueError("threshold and margin must be non-negative")
        if self.max_entity_tokens < 1:
            raise ValueError(
                f"max_entity_tokens must be >= 1, got {self.max_entity_tokens}"
            )
        for label, table in self.tables.items():
            if not label or label == UNKNOWN:
                raise ValueError(f"invalid class label {label!r}")
            for key, weight in table.items():
                if weight <= 0:
                    raise ValueError(
                        f"non-positive weight {weight} for {key.phrase()!r} in {label}"
                    )


@dataclass
class VoteState:
    """Accumulated per-class votes with their contributing contexts."""

    votes: dict[str, float] = field(default_factory=dict)
    contributions: dict[str, list[tuple[Optional[ContextKey], float]]] = field(
        default_factory=dict
    )

    def top_two(self) -> tuple[str, float, float]:
        """(best label, best vote, runner-up vote); zeros when absent."""
        if not self.votes:
            return UNKNOWN, 0.0, 0.0
        ranked = sorted(self.votes.items(), key=lambda kv: (-kv[1], kv[0]))
        second = ranked[1][1] if len(ranked) > 1 else 0.0
        return ranked[0][0], ranked[0][1], second


def vote(
    state: VoteState,
    class_label: str,
    weight: float,
    context: Optional[ContextKey] = None,
) -> VoteState:
    """Add one context's weight to a class's vote. Mutates and returns state."""
    if weight <= 0:
        raise ValueError(f"vote weight must be positive, got {weight}")
    state.votes[class_label] = state.votes.get(class_label, 0.0) + weight
    state.contributions.setdefault(class_label, []).append((context, weight))
    return state


def classify(state: VoteState, threshold: float = 0.0, margin: float = 0.0) -> str:
    """Pick the winning class, or `unknown`.

    The best vote must reach `threshold` and exceed the runner-up by at
    least `margin`; an exact tie for first place is always unknown.
    """
    if not state.votes:
        return UNKNOWN
    ranked = sorted(state.votes.items(), key=lambda kv: (-kv[1], kv[0]))
    best_label, best = ranked[0]
    if len(ranked) > 1:
        second = ranked[1][1]
        if second == best:
            return UNKNOWN
        if best - second < margin:
            return UNKNOWN
    if best < threshold:
        return UNKNOWN
    return best_label


def _starts_lower(word: str) -> bool:
    return word[:1].islower()


def _context_index(
    model: RecognitionModel,
) -> dict[tuple[str, int], set[tuple[str, ...]]]:
    """All context word tuples across tables, grouped by (side, length)."""
    index: dict[tuple[str, int], set[tuple[str, ...]]] = {}
    for table in model.tables.values():
        for key in table:
            index.setdefault((key.side, key.length), set()).add(key.words)
    return index


def detect_candidates(tok: Tokenization, model: RecognitionModel) -> list[tuple[int, int]]:
    """Candidate entity spans, as (first, last) token index pairs.

    Wherever any table's context words occur, the adjacent tokens form a
    candidate of up to max_entity_tokens, truncated at a sentence break
    or at the first token after the initial one that starts lowercase.
    """
    spans: set[tuple[int, int]] = set()
    words = tok.words
    n = len(words)
    limit = model.max_entity_tokens
    for (side, length), keys in _context_index(model).items():
        for p in range(n - length + 1):
            if words[p : p + length] not in keys:
                continue
            if side == LEFT:
                start = p + length
                if start >= n:
                    continue
                end = start
                while (
                    end - start + 1 < limit
                    and end not in tok.breaks
                    and end + 1 < n
                    and not _starts_lower(words[end + 1])
                ):
                    end += 1
            else:
                end = p - 1
                if end < 0:
                    continue
                start = end
                while (
                    end - start + 1 < limit
                    and start - 1 >= 0
                    and (start - 1) not in tok.breaks
                    and not _starts_lower(words[start - 1])
                ):
                    start -= 1
            spans.add((start, end))
    return sorted(spans)


@dataclass(frozen=True)
class Annotation:
    """One recognized (or rejected) span of a document."""

    doc: str
    first: int
    last: int
    surface: str
    class_label: str
    score: float
    runner_up: float


def recognize_document(doc: Document, model: RecognitionModel) -> list[Annotation]:
    """Annotate one document's candidate spans with voted classes.

    Every class whose table holds a context adjacent to the span gets
    one vote per matching context, so a context shared across tables
    pulls each class up by its own class-specific weight.
    """
    if not model.tables:
        return []
    tok = tokenize(doc.clean)
    words = tok.words
    n = len(words)
    group_keys = sorted(_context_index(model))
    out: list[Annotation] = []
    for first, last in detect_candidates(tok, model):
        state = VoteState()
        for side, length in group_keys:
            if side == LEFT:
                if first - length < 0:
                    continue
                adjacent = ContextKey(words[first - length : first], LEFT)
            else:
                if last + 1 + length > n:
                    continue
                adjacent = ContextKey(words[last + 1 : last + 1 + length], RIGHT)
            for label, table in model.tables.items():
                weight = table.get(adjacent)
                if weight is not None:
                    vote(state, label, weight, adjacent)
        decided = classify(state, model.threshold, model.margin)
        _, best, second = state.top_two()
        out.append(
            Annotation(
                doc=doc.id,
                first=first,
                last=last,
                surface=tok.text[tok.tokens[first].start : tok.tokens[last].end],
                class_label=decided,
                score=best,
                runner_up=second,
            )
        )
    out.sort(key=lambda a: (a.first, a.last))
    return out


def recognize_corpus(
    documents: Iterable[Document], model: RecognitionModel
) -> list[Annotation]:
    out: list[Annotation] = []
    for doc in documents:
        out.extend(recognize_document(doc, model))
    return out


def format_annotations(annotations: Iterable[Annotation]) -> str:
    rows = [
        [
            a.doc,
            str(a.first),
            str(a.last),
            a.surface,
            a.class_label,
            f"{a.score:.7g}",
            f"{a.runner_up:.7g}",
        ]
        for a in annotations
    ]
    return tsv.format_rows(ANNOTATIONS_HEADER, rows)


def write_annotations(annotations: Iterable[Annotation], path: str | Path) -> None:
    Path(path).write_text(
        format_annotations(annotations), encoding="utf-8", newline="\n"
    )


def load_annotations(path: str | Path) -> list[Annotation]:
    out: list[Annotation] = []
    for lineno, row in tsv.read_rows(path, ANNOTATIONS_HEADER):
        doc, first, last, surface, label, score, runner_up = row
        try:
            out.append(
                Annotation(
                    doc=doc,
                    first=int(first),
                    last=int(last),
                    surface=surface,
                    class_label=label,
                    score=float(score),
                    runner_up=float(runner_up),
                )
            )
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def _table_file_name(label: str) -> str:
    if not _LABEL_RE.match(label):
        raise DataFormatError(
            f"class label {label!r} is not usable as a file name"
            " (letters, digits, '_', '-', '.' only)"
        )
    return f"table_{label}.tsv"


def save_model(
    directory: str | Path,
    tables: dict[str, WeightTable],
    threshold: float = 0.0,
    margin: float = 0.0,
) -> None:
    """Write one weight-table TSV per class plus the model index file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for label in sorted(tables):
        file_name = _table_file_name(label)
        write_weight_table(tables[label], directory / file_name)
        rows.append([label, file_name, f"{threshold:.7g}", f"{margin:.7g}"])
    tsv.write_rows(directory / MODEL_FILE, MODEL_HEADER, rows)


def update_model(
    directory: str | Path,
    label: str,
    table: WeightTable,
    threshold: Optional[float] = None,
    margin: Optional[float] = None,
) -> None:
    """Add or replace one class's table in a model directory.

    Other classes' entries are preserved. Threshold and margin are
    model-wide: explicit values overwrite the stored ones, otherwise
    the stored (or zero) values stay on every row.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries: dict[str, str] = {}
    stored = (0.0, 0.0)
    index_path = directory / MODEL_FILE
    if index_path.is_file():
        for lineno, (row_label, table_file, raw_theta, raw_delta) in tsv.read_rows(
            index_path, MODEL_HEADER
        ):
            try:
                stored = (float(raw_theta), float(raw_delta))
            except ValueError as exc:
                raise DataFormatError(f"{index_path}:{lineno}: {exc}") from exc
            entries[row_label] = table_file
    file_name = _table_file_name(label)
    write_weight_table(table, directory / file_name)
    entries[label] = file_name
    theta = stored[0] if threshold is None else threshold
    delta = stored[1] if margin is None else margin
    rows = [
        [name, entries[name], f"{theta:.7g}", f"{delta:.7g}"]
        for name in sorted(entries)
    ]
    tsv.write_rows(index_path, MODEL_HEADER, rows)


def load_model(
    directory: str | Path,
    side: str = LEFT,
    threshold: Optional[float] = None,
    margin: Optional[float] = None,
    max_entity_tokens: int = 4,
) -> RecognitionModel:
    """Read a saved model; explicit threshold/margin arguments win."""
    directory = Path(directory)
    index_path = directory / MODEL_FILE
    if not index_path.is_file():
        raise InputError(f"no {MODEL_FILE} in {directory}")
    tables: dict[str, dict[ContextKey, float]] = {}
    stored: Optional[tuple[float, float]] = None
    for lineno, (label, table_file, raw_theta, raw_delta) in tsv.read_rows(
        index_path, MODEL_HEADER
    ):
        if label in tables:
            raise DataFormatError(f"{index_path}:{lineno}: duplicate class {label!r}")
        try:
            theta, delta = float(raw_theta), float(raw_delta)
        except ValueError as exc:
            raise DataFormatError(f"{index_path}:{lineno}: {exc}") from exc
        if stored is None:
            stored = (theta, delta)
        elif stored != (theta, delta):
            raise DataFormatError(
                f"{index_path}:{lineno}: threshold/margin disagree across classes"
            )
        table_path = directory / table_file
        if not table_path.is_file():
            raise DataFormatError(
                f"{index_path}:{lineno}: table file not found: {table_path}"
            )
        tables[label] = read_weight_mapping(table_path, side)
    if not tables:
        raise DataFormatError(f"{index_path}: model lists no classes")
    assert stored is not None
    try:
        return RecognitionModel(
            tables=tables,
            threshold=stored[0] if threshold is None else threshold,
            margin=stored[1] if margin is None else margin,
            max_entity_tokens=max_entity_tokens,
        )
    except ValueError as exc:
        raise DataFormatError(f"{index_path}: {exc}") from exc
