"""Strict, byte-deterministic TSV reading and writing.

All on-disk tables in this package share one dialect: UTF-8, a required
header row, tab-separated columns, "\n" line endings, and no escaping
(fields must not contain tabs or newlines).
"""

from __future__ import annotations

from pathlib import Path

from .errors import DataFormatError

_FORBIDDEN = ("\t", "\n", "\r")


def format_rows(header: list[str], rows: list[list[str]]) -> str:
    """Render header + rows as TSV text, validating every field."""
    lines = ["\t".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise DataFormatError(
                f"row has {len(row)} fields, header has {len(header)}: {row!r}"
            )
        for field in row:
            if any(ch in field for ch in _FORBIDDEN):
                raise DataFormatError(f"field contains tab or newline: {field!r}")
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def write_rows(path: str | Path, header: list[str], rows: list[list[str]]) -> None:
    text = format_rows(header, rows)
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def read_rows(path: str | Path, header: list[str]) -> list[tuple[int, list[str]]]:
    """Read a TSV file, checking the header and per-row column counts.

    Returns (line_number, fields) pairs for the data rows; line numbers
    are 1-based file positions, so the first data row is line 2.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DataFormatError(f"{path}: empty file, expected header {header!r}")
    first = lines[0].lstrip("﻿")
    if first.split("\t") != header:
        raise DataFormatError(
            f"{path}:1: bad header {first!r}, expected {chr(9).join(header)!r}"
        )
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(header):
            raise DataFormatError(
                f"{path}:{lineno}: expected {len(header)} columns, got {len(fields)}"
            )
        out.append((lineno, fields))
    return out
