"""Corpus acquisition through a pluggable search-and-fetch client.

Real web search backends plug in by implementing `SearchClient`. The
shipped implementation is `FixtureClient`, which serves canned results
from a directory so the pipeline stays deterministic and offline.
"""

from __future__ import annotations

import hashlib
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from . import tsv
from .corpus import (
    MARKUP,
    PLAIN,
    CorpusManifest,
    Document,
    clean_text,
    normalize_source,
)
from .errors import DataFormatError, InputError, PipelineError
from .seeds import LearningExample

logger = logging.getLogger(__name__)

QUERIES_HEADER = ["query", "uri", "file"]
_MARKUP_SUFFIXES = {".html", ".htm", ".xml"}


class AcquisitionError(PipelineError):
    """Every search query failed; no corpus could be built."""


class ClientError(Exception):
    """A search or fetch call failed for one query or URI."""


@dataclass(frozen=True)
class SearchQuery:
    instance: str
    max_results: int
    suffix: str = ""

    def __post_init__(self) -> None:
        if not self.instance:
            raise ValueError("query instance must be non-empty")
        if self.max_results < 1:
            raise ValueError(f"max_results must be positive, got {self.max_results}")

    @property
    def text(self) -> str:
        """Query string sent to the backend; the optional suffix narrows it."""
        return f"{self.instance} {self.suffix}" if self.suffix else self.instance


@dataclass(frozen=True)
class LinkResult:
    uri: str
    rank: int


class SearchClient(ABC):
    """Search backend interface.

    Implementations must raise ClientError (or OSError) on failure.
    `search` returns at most `query.max_results` links with unique
    1-based ranks; `fetch` returns the raw payload plus its kind
    ("plain" or "markup").
    """

    @abstractmethod
    def search(self, query: SearchQuery) -> list[LinkResult]: ...

    @abstractmethod
    def fetch(self, uri: str) -> tuple[bytes, str]: ...


class FixtureClient(SearchClient):
    """Deterministic client backed by a fixture directory.

    The directory's queries.tsv maps query strings to URIs and local
    files (columns: query, uri, file). Results keep file order; a URI
    listed with two different files is rejected up front.
    """

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        index_path = self.directory / "queries.tsv"
        if not index_path.is_file():
            raise InputError(f"fixture directory has no queries.tsv: {self.directory}")
        self._results: dict[str, list[LinkResult]] = {}
        self._files: dict[str, Path] = {}
        for lineno, (query, uri, file_name) in tsv.read_rows(index_path, QUERIES_HEADER):
            if not query or not uri or not file_name:
                raise DataFormatError(f"{index_path}:{lineno}: empty field")
            path = self.directory / file_name
            if uri in self._files and self._files[uri] != path:
                raise DataFormatError(
                    f"{index_path}:{lineno}: uri {uri!r} mapped to conflicting files"
                )
            self._files[uri] = path
            links = self._results.setdefault(query, [])
            links.append(LinkResult(uri=uri, rank=len(links) + 1))

    def search(self, query: SearchQuery) -> list[LinkResult]:
        return self._results.get(query.text, [])[: query.max_results]

    def fetch(self, uri: str) -> tuple[bytes, str]:
        path = self._files.get(uri)
        if path is None:
            raise ClientError(f"unknown uri: {uri}")
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise ClientError(f"cannot read {path}: {exc}") from exc
        kind = MARKUP if path.suffix.lower() in _MARKUP_SUFFIXES else PLAIN
        return raw, kind


def build_queries(
    examples: Iterable[LearningExample],
    max_results: int,
    suffix: str = "",
) -> list[SearchQuery]:
    """One query per distinct surface form, in first-seen order."""
    seen: dict[str, None] = {}
    for ex in examples:
        seen.setdefault(ex.surface)
    if not seen:
        raise InputError("no learning examples to build queries from")
    return [SearchQuery(surface, max_results, suffix) for surface in seen]


@dataclass(frozen=True)
class FetchFailure:
    uri: str
    stage: str
    error: str


@dataclass(frozen=True)
class AcquireResult:
    """New manifest plus the per-URI failures that were skipped over."""

    manifest: CorpusManifest
    failures: tuple[FetchFailure, ...] = ()


def _doc_id(uri: str) -> str:
    return hashlib.sha1(uri.encode("utf-8")).hexdigest()[:12]


def acquire(
    client: SearchClient,
    queries: Iterable[SearchQuery],
    existing: Optional[CorpusManifest] = None,
    workers: int = 1,
) -> AcquireResult:
    """Grow a corpus with every new document the queries surface.

    Search results are deduplicated against the existing manifest and
    one another by URI. Fetches run on up to `workers` threads, but
    documents land in query-order-then-rank order no matter which fetch
    finishes first. A failed fetch is recorded and skipped; an error
    from every single search raises AcquisitionError.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    existing = existing if existing is not None else CorpusManifest([])
    queries = list(queries)
    known_uris = {doc.uri for doc in existing}
    failures: list[FetchFailure] = []
    targets: list[str] = []
    search_errors = 0
    for query in queries:
        try:
            links = client.search(query)
        except (ClientError, OSError) as exc:
            search_errors += 1
            failures.append(FetchFailure(uri=query.text, stage="search", error=str(exc)))
            logger.warning("search failed for %r: %s", query.text, exc)
            continue
        for link in sorted(links, key=lambda l: l.rank):
            if link.uri not in known_uris:
                known_uris.add(link.uri)
                targets.append(link.uri)
    if queries and search_errors == len(queries):
        raise AcquisitionError(f"all {len(queries)} search queries failed")

    new_docs: list[Document] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [(uri, pool.submit(client.fetch, uri)) for uri in targets]
        for uri, future in futures:
            try:
                raw, kind = future.result()
            except (ClientError, OSError) as exc:
                failures.append(FetchFailure(uri=uri, stage="fetch", error=str(exc)))
                logger.warning("fetch failed for %s: %s", uri, exc)
                continue
            try:
                clean = clean_text(raw, kind)
            except (DataFormatError, InputError) as exc:
                failures.append(FetchFailure(uri=uri, stage="clean", error=str(exc)))
                logger.warning("discarding %s: %s", uri, exc)
                continue
            new_docs.append(
                Document(
                    id=_doc_id(uri),
                    source=normalize_source(uri),
                    uri=uri,
                    kind=kind,
                    clean=clean,
                )
            )

    manifest = CorpusManifest(
        list(existing) + new_docs, class_label=existing.class_label
    )
    return AcquireResult(manifest=manifest, failures=tuple(failures))
