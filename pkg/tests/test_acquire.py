import logging

import pytest

from contextner.acquire import (
    AcquireResult,
    AcquisitionError,
    ClientError,
    FixtureClient,
    SearchClient,
    SearchQuery,
    acquire,
    build_queries,
)
from contextner.errors import DataFormatError, InputError
from contextner.seeds import LearningExample


def write_fixture(directory, rows, files):
    directory.mkdir(parents=True, exist_ok=True)
    lines = ["query\turi\tfile"] + ["\t".join(r) for r in rows]
    (directory / "queries.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for name, content in files.items():
        (directory / name).write_bytes(content)


@pytest.fixture
def fixture_dir(tmp_path):
    root = tmp_path / "fix"
    write_fixture(
        root,
        [
            ["Paris", "http://a.example/p1", "p1.txt"],
            ["Paris", "http://b.example/p2", "p2.html"],
            ["Tunis", "http://c.example/t1", "t1.txt"],
        ],
        {
            "p1.txt": b"Hotels in Paris are nice.",
            "p2.html": b"<html><body>Map of <b>Paris</b></body></html>",
            "t1.txt": b"Travel to Tunis today.",
        },
    )
    return root


def queries_for(*surfaces, max_results=10):
    examples = [LearningExample(s, "capital") for s in surfaces]
    return build_queries(examples, max_results)


def test_search_query_text():
    assert SearchQuery("Paris", 10).text == "Paris"
    assert SearchQuery("Paris", 10, suffix="hotel").text == "Paris hotel"
    with pytest.raises(ValueError):
        SearchQuery("Paris", 0)


def test_build_queries_one_per_distinct_surface():
    examples = [
        LearningExample("Paris", "capital"),
        LearningExample("Tunis", "capital"),
        LearningExample("Paris", "capital"),
    ]
    queries = build_queries(examples, 10)
    assert [q.instance for q in queries] == ["Paris", "Tunis"]
    assert build_queries([LearningExample(f"C{i}", "x") for i in range(13)], 5) != []
    assert len(build_queries([LearningExample(f"C{i}", "x") for i in range(13)], 5)) == 13
    with pytest.raises(InputError):
        build_queries([], 10)


def test_fixture_client_search_order_and_cap(fixture_dir):
    client = FixtureClient(fixture_dir)
    links = client.search(SearchQuery("Paris", 10))
    assert [(l.uri, l.rank) for l in links] == [
        ("http://a.example/p1", 1),
        ("http://b.example/p2", 2),
    ]
    assert len(client.search(SearchQuery("Paris", 1))) == 1
    assert client.search(SearchQuery("Nowhere", 10)) == []


def test_fixture_client_fetch_kinds(fixture_dir):
    client = FixtureClient(fixture_dir)
    raw, kind = client.fetch("http://a.example/p1")
    assert kind == "plain" and raw.startswith(b"Hotels")
    _, kind = client.fetch("http://b.example/p2")
    assert kind == "markup"
    with pytest.raises(ClientError):
        client.fetch("http://nowhere.example/")


def test_fixture_client_rejects_conflicting_uri(tmp_path):
    write_fixture(
        tmp_path / "bad",
        [
            ["Paris", "http://a.example/p", "one.txt"],
            ["Tunis", "http://a.example/p", "two.txt"],
        ],
        {"one.txt": b"x", "two.txt": b"y"},
    )
    with pytest.raises(DataFormatError, match="conflicting"):
        FixtureClient(tmp_path / "bad")


def test_fixture_client_requires_index(tmp_path):
    with pytest.raises(InputError, match="queries.tsv"):
        FixtureClient(tmp_path / "empty")


def test_acquire_builds_documents(fixture_dir):
    result = acquire(FixtureClient(fixture_dir), queries_for("Paris", "Tunis"))
    assert isinstance(result, AcquireResult)
    assert len(result.manifest) == 3
    assert result.failures == ()
    by_uri = {d.uri: d for d in result.manifest}
    assert by_uri["http://b.example/p2"].clean == "Map of Paris"
    assert by_uri["http://b.example/p2"].kind == "markup"
    assert by_uri["http://a.example/p1"].source == "a.example"


def test_acquire_is_idempotent(fixture_dir):
    client = FixtureClient(fixture_dir)
    queries = queries_for("Paris", "Tunis")
    first = acquire(client, queries)
    second = acquire(client, queries, existing=first.manifest)
    assert len(second.manifest) == len(first.manifest)
    assert [d.id for d in second.manifest] == [d.id for d in first.manifest]
    assert [d.clean for d in second.manifest] == [d.clean for d in first.manifest]


def test_acquire_records_dead_links(tmp_path, caplog):
    root = tmp_path / "fix"
    write_fixture(
        root,
        [
            ["Paris", "http://a.example/p1", "p1.txt"],
            ["Paris", "http://gone.example/x", "missing.txt"],
            ["Tunis", "http://c.example/t1", "t1.txt"],
        ],
        {"p1.txt": b"Hotels in Paris.", "t1.txt": b"Travel to Tunis."},
    )
    with caplog.at_level(logging.WARNING):
        result = acquire(FixtureClient(root), queries_for("Paris", "Tunis"))
    assert len(result.manifest) == 2
    assert len(result.failures) == 1
    assert result.failures[0].uri == "http://gone.example/x"
    assert result.failures[0].stage == "fetch"
    assert "gone.example" in caplog.text


class DownClient(SearchClient):
    def search(self, query):
        raise ClientError("backend unreachable")

    def fetch(self, uri):
        raise ClientError("backend unreachable")


def test_acquire_total_search_failure():
    with pytest.raises(AcquisitionError, match="all 2"):
        acquire(DownClient(), queries_for("Paris", "Tunis"))


def test_acquire_deduplicates_across_queries(tmp_path):
    root = tmp_path / "fix"
    write_fixture(
        root,
        [
            ["Paris", "http://shared.example/page", "s.txt"],
            ["Tunis", "http://shared.example/page", "s.txt"],
        ],
        {"s.txt": b"Paris and Tunis."},
    )
    result = acquire(FixtureClient(root), queries_for("Paris", "Tunis"))
    assert len(result.manifest) == 1


def test_acquire_worker_count_does_not_change_result(fixture_dir):
    queries = queries_for("Paris", "Tunis")
    serial = acquire(FixtureClient(fixture_dir), queries, workers=1)
    threaded = acquire(FixtureClient(fixture_dir), queries, workers=4)
    assert [d.id for d in threaded.manifest] == [d.id for d in serial.manifest]
    assert [d.clean for d in threaded.manifest] == [d.clean for d in serial.manifest]
    with pytest.raises(ValueError):
        acquire(FixtureClient(fixture_dir), queries, workers=0)


def test_acquire_narrower_queries_keep_existing(fixture_dir):
    """Document count never decreases across an acquire call."""
    client = FixtureClient(fixture_dir)
    full = acquire(client, queries_for("Paris", "Tunis")).manifest
    after = acquire(client, queries_for("Paris"), existing=full).manifest
    assert len(after) == len(full)
