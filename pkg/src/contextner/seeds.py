"""Learning examples: the seed surface forms of an entity class."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from . import tsv
from .errors import DataFormatError, InputError

EXAMPLES_HEADER = ["surface", "class"]


@dataclass(frozen=True)
class LearningExample:
    """A concrete surface form (e.g. "Paris") of an entity class.

    Surface forms may overlap or subsume each other ("Bush" and
    "George W. Bush"); both are kept and matching prefers the longest.
    """

    surface: str
    class_label: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "surface", self.surface.strip())
        object.__setattr__(self, "class_label", self.class_label.strip())
        if not self.surface:
            raise ValueError("learning example surface is empty")
        if not self.class_label:
            raise ValueError(f"learning example {self.surface!r} has an empty class label")


def load_examples(path: str | Path) -> list[LearningExample]:
    """Read a TSV of (surface, class) rows; exact duplicates collapse."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"examples file not found: {path}")
    out: list[LearningExample] = []
    seen = set()
    for lineno, (surface, class_label) in tsv.read_rows(path, EXAMPLES_HEADER):
        try:
            example = LearningExample(surface, class_label)
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: {exc}")
        if (example.surface, example.class_label) not in seen:
            seen.add((example.surface, example.class_label))
            out.append(example)
    return out


def single_class(examples: list[LearningExample]) -> str:
    """Return the one class label shared by all examples, or raise."""
    if not examples:
        raise InputError("no learning examples given")
    labels = {e.class_label for e in examples}
    if len(labels) > 1:
        raise InputError(
            "examples mix classes "
            f"({', '.join(sorted(labels))}); run once per class"
        )
    return examples[0].class_label
