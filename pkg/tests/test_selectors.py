from __future__ import annotations

import json
import time
from datetime import date

import pytest

from fixture_http import IndexFixtureServer
from fixture_media import build_zipped_video
from triage.config import ComponentSpec, RunConfig, WorkerPoolConfig
from triage.errors import EndpointUnreachable
from triage.orchestrator import run
from triage.selectors import IndexEntry, IndexQuery, IndexSelector, LocalSelector, filter_entries
from triage.store import MediaType, completed_ids, init_batch, list_elements

H = "d" * 64


class TestLocalSelect:
    def test_one_element_per_match(self, base_dir, ctx, tmp_path):
        media = tmp_path / "media"
        media.mkdir()
        (media / "a.mp4").write_bytes(b"A")
        (media / "b.mp4").write_bytes(b"B")
        (media / "notes.txt").write_text("skip me")
        selector = LocalSelector({"dir": str(media), "glob": "*.mp4"})
        out = init_batch(base_dir, "local", MediaType.VIDEO, H)
        tasks = selector.discover(ctx)
        for key, task in tasks:
            selector.retrieve(key, task, out, ctx)
        elements = list_elements(out)
        assert [e.id for e in elements] == ["a", "b"]
        assert elements[0].path("a.mp4").read_bytes() == b"A"

    def test_no_matches_warns_and_yields_empty(self, base_dir, ctx, tmp_path):
        media = tmp_path / "media"
        media.mkdir()
        selector = LocalSelector({"dir": str(media), "glob": "*.mp4"})
        assert selector.discover(ctx) == []
        log = (base_dir / "logs" / "test-run.log").read_text()
        assert "WARN" in log and "no files match" in log

    def test_weird_filename_sanitized(self, base_dir, ctx, tmp_path):
        media = tmp_path / "media"
        media.mkdir()
        (media / "weird name!.mp4").write_bytes(b"W")
        selector = LocalSelector({"dir": str(media), "glob": "*.mp4"})
        ((key, _),) = selector.discover(ctx)
        assert key == "weird_name_"


def _entries():
    return [
        {"id": "yt:001", "title": "Tank column near town", "published_at": "2014-08-10",
         "media_url": "http://x/1", "duration_s": 10.0},
        {"id": "yt:002", "title": "Street market", "published_at": "2014-08-12",
         "media_url": "http://x/2", "duration_s": 20.0},
        {"id": "yt:003", "title": "TANK firing range", "published_at": "2014-08-20",
         "media_url": "http://x/3", "duration_s": 30.0},
        {"id": "yt:004", "title": "tank museum tour", "published_at": "2014-09-20",
         "media_url": "http://x/4", "duration_s": 40.0},
        {"id": "yt:005", "title": "old tank, date boundary", "published_at": "2014-08-31",
         "media_url": "http://x/5", "duration_s": 50.0},
    ]


class TestFilterEntries:
    def test_brute_force_filter(self):
        entries = [IndexEntry.from_dict(e) for e in _entries()]
        query = IndexQuery(q="tank", from_date=date(2014, 8, 1), to_date=date(2014, 8, 31))
        kept = filter_entries(entries, query)
        # oracle: manual scan with inclusive bounds + case-insensitive substring
        want = [
            e for e in entries
            if date(2014, 8, 1) <= e.published_at <= date(2014, 8, 31)
            and "tank" in e.title.lower()
        ]
        assert kept == want
        assert [e.id for e in kept] == ["yt:001", "yt:003", "yt:005"]

    def test_inclusive_single_day(self):
        entries = [IndexEntry.from_dict(e) for e in _entries()]
        query = IndexQuery(q="tank", from_date=date(2014, 8, 10), to_date=date(2014, 8, 10))
        assert [e.id for e in filter_entries(entries, query)] == ["yt:001"]

    def test_from_after_to_rejected(self):
        with pytest.raises(Exception):
            IndexQuery(q="x", from_date=date(2020, 1, 2), to_date=date(2020, 1, 1))


def _index_config(server, q="tank", frm="2014-08-01", to="2014-08-31", **extra):
    return {
        "endpoint": server.endpoint,
        "query": {"q": q, "from_date": frm, "to_date": to},
        **extra,
    }


def _server_with_media(tmp_path, entries=None, latency_s=0.0):
    entries = entries if entries is not None else _entries()
    media = {}
    for e in entries:
        name = f"{e['id'].replace(':', '_')}.framedir.zip"
        e["media_url"] = None  # placeholder, fixed below
        media[name] = build_zipped_video(tmp_path, name, duration_s=2.0, fps=1.0)
    server = IndexFixtureServer(entries, media, latency_s=latency_s).start()
    for e in entries:
        e["media_url"] = server.media_url(f"{e['id'].replace(':', '_')}.framedir.zip")
    return server


class TestIndexSelect:
    def test_commits_filtered_entries_with_meta(self, base_dir, ctx, tmp_path):
        server = _server_with_media(tmp_path)
        try:
            selector = IndexSelector(_index_config(server))
            out = init_batch(base_dir, "index", MediaType.VIDEO, H)
            tasks = selector.discover(ctx)
            assert [k for k, _ in tasks] == ["yt_001", "yt_003", "yt_005"]
            for key, task in tasks:
                selector.retrieve(key, task, out, ctx)
            elements = list_elements(out)
            assert [e.id for e in elements] == ["yt_001", "yt_003", "yt_005"]
            meta = json.loads(elements[0].path("meta.json").read_text())
            assert meta["id"] == "yt:001"
            assert meta["published_at"] == "2014-08-10"
            assert elements[0].attrs["title"] == "Tank column near town"
            videos = elements[0].media_of_type(MediaType.VIDEO)
            assert len(videos) == 1 and videos[0].read_bytes()[:2] == b"PK"
        finally:
            server.stop()

    def test_unreachable_endpoint_is_fatal(self, base_dir, ctx):
        selector = IndexSelector(
            {"endpoint": "http://127.0.0.1:1", "query":
             {"q": "x", "from_date": "2020-01-01", "to_date": "2020-01-02"}}
        )
        with pytest.raises(EndpointUnreachable):
            selector.discover(ctx)

    def test_failed_download_fails_element_not_stage(self, base_dir, ctx, tmp_path):
        entries = _entries()[:3]
        server = _server_with_media(tmp_path, entries)
        entries[1]["media_url"] = server.media_url("missing.zip")  # will 404
        entries[1]["title"] = "tank broken"
        entries[1]["published_at"] = "2014-08-11"
        try:
            config = RunConfig(
                folder=base_dir,
                select=ComponentSpec("index", _index_config(server)),
            )
            report = run(config, WorkerPoolConfig(workers=2))
            stage = report.stage("index")
            assert stage.succeeded == 2
            assert stage.failed == 1
            assert stage.skipped == 0
        finally:
            server.stop()

    def test_rerun_downloads_only_missing(self, base_dir, tmp_path):
        server = _server_with_media(tmp_path)
        try:
            config = RunConfig(
                folder=base_dir, select=ComponentSpec("index", _index_config(server))
            )
            first = run(config, WorkerPoolConfig(workers=2))
            assert first.stage("index").succeeded == 3
            served_before = server.media_served

            second = run(config, WorkerPoolConfig(workers=2))
            assert second.stage("index").succeeded == 0
            assert second.stage("index").skipped == 3
            assert server.media_served == served_before  # zero new downloads
        finally:
            server.stop()

    def test_download_concurrency_wall_time(self, base_dir, ctx, tmp_path):
        # 8 fixed-latency downloads, workers=2 x K=4 in flight: wall time
        # approaches N*latency/(workers*K) = 1 x latency
        latency = 0.3
        entries = []
        for i in range(8):
            entries.append(
                {"id": f"c{i}", "title": "tank", "published_at": "2014-08-10",
                 "media_url": None, "duration_s": 1.0}
            )
        server = _server_with_media(tmp_path, entries, latency_s=latency)
        try:
            config = RunConfig(
                folder=base_dir,
                select=ComponentSpec(
                    "index", _index_config(server, download_concurrency=4)
                ),
            )
            started = time.monotonic()
            report = run(config, WorkerPoolConfig(workers=2))
            elapsed = time.monotonic() - started
            assert report.stage("index").succeeded == 8
            assert elapsed < 2 * latency  # 2x factor over the ideal
        finally:
            server.stop()
