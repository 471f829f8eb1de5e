"""Built-in selectors: local directory scan and the HTTP index protocol.

The index protocol is a minimal stand-in for platform search APIs:

    GET <endpoint>/index?q=<term>&from=<YYYY-MM-DD>&to=<YYYY-MM-DD>
    -> {"entries": [{"id","title","published_at","media_url","duration_s"}]}

Media is fetched by plain GET on each entry's media_url. The server may
pre-filter; the client re-filters anyway so results never depend on
server-side search semantics.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .components import Selector, StageContext
from .errors import ConfigError, DownloadFailure, EndpointUnreachable, IoFailure
from .registry import register_selector
from .store import BatchHandle, MediaType, sanitize_element_id, write_element

_HTTP_TIMEOUT_S = 30.0


@dataclass(frozen=True)
class IndexEntry:
    id: str
    title: str
    published_at: date
    media_url: str
    duration_s: float

    @classmethod
    def from_dict(cls, raw: dict) -> "IndexEntry":
        published = date.fromisoformat(str(raw["published_at"]))
        duration = float(raw["duration_s"])
        if duration < 0:
            raise ValueError(f"negative duration for entry {raw.get('id')!r}")
        return cls(
            id=str(raw["id"]),
            title=str(raw["title"]),
            published_at=published,
            media_url=str(raw["media_url"]),
            duration_s=duration,
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "published_at": self.published_at.isoformat(),
            "media_url": self.media_url,
            "duration_s": self.duration_s,
        }


@dataclass(frozen=True)
class IndexQuery:
    q: str
    from_date: date
    to_date: date

    def __post_init__(self):
        if self.from_date > self.to_date:
            raise ConfigError("query from_date must be <= to_date")

    @classmethod
    def from_config(cls, raw: dict) -> "IndexQuery":
        try:
            return cls(
                q=str(raw["q"]),
                from_date=date.fromisoformat(str(raw["from_date"])),
                to_date=date.fromisoformat(str(raw["to_date"])),
            )
        except KeyError as exc:
            raise ConfigError(f"index query is missing {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"bad index query date: {exc}") from exc


def filter_entries(entries: list[IndexEntry], query: IndexQuery) -> list[IndexEntry]:
    """Date bounds inclusive on both ends; term is a case-insensitive
    substring match on the title."""
    term = query.q.lower()
    return [
        e
        for e in entries
        if query.from_date <= e.published_at <= query.to_date and term in e.title.lower()
    ]


@register_selector
class LocalSelector(Selector):
    """One element per file matched by a glob under a local directory."""

    name = "local"

    def __init__(self, config: dict):
        super().__init__(config)
        if "dir" not in config:
            raise ConfigError("local selector needs a 'dir'")
        self.dir = Path(config["dir"])
        self.glob = config.get("glob", "*")
        self.media_type = MediaType(config.get("media_type", "video"))

    def discover(self, ctx: StageContext) -> list[tuple[str, Path]]:
        if not self.dir.is_dir():
            raise IoFailure(f"local selector dir does not exist: {self.dir}")
        matches = sorted(p for p in self.dir.glob(self.glob) if p.is_file())
        if not matches:
            ctx.logger.warn(f"local: no files match {self.glob!r} under {self.dir}")
            return []
        tasks: list[tuple[str, Path]] = []
        seen: set[str] = set()
        for path in matches:
            key = sanitize_element_id(path.stem)
            if key in seen:
                ctx.logger.warn(f"local: id collision for {path.name}, keeping first")
                continue
            seen.add(key)
            tasks.append((key, path))
        return tasks

    def retrieve(self, key: str, task: Path, out: BatchHandle, ctx: StageContext) -> None:
        data = task.read_bytes()
        write_element(out, key, [(task.name, data, self.media_type)], produced_by=self.name)


def _http_get(url: str, timeout_s: float = _HTTP_TIMEOUT_S) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout_s) as resp:
        return resp.read()


@register_selector
class IndexSelector(Selector):
    """Fetches an index of entries, filters by date range and search term,
    downloads each entry's media, and commits one video element per entry."""

    name = "index"

    def __init__(self, config: dict):
        super().__init__(config)
        if "endpoint" not in config:
            raise ConfigError("index selector needs an 'endpoint'")
        if "query" not in config:
            raise ConfigError("index selector needs a 'query'")
        self.endpoint = str(config["endpoint"]).rstrip("/")
        self.query = IndexQuery.from_config(config["query"])
        self.media_type = MediaType.VIDEO
        # Downloads are latency-bound: each worker keeps several in flight.
        self.concurrency_per_worker = int(config.get("download_concurrency", 4))

    def index_url(self) -> str:
        params = urllib.parse.urlencode(
            {
                "q": self.query.q,
                "from": self.query.from_date.isoformat(),
                "to": self.query.to_date.isoformat(),
            }
        )
        return f"{self.endpoint}/index?{params}"

    def discover(self, ctx: StageContext) -> list[tuple[str, IndexEntry]]:
        url = self.index_url()
        try:
            payload = json.loads(_http_get(url))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise EndpointUnreachable(f"cannot fetch index {url}: {exc}") from exc
        entries = [IndexEntry.from_dict(raw) for raw in payload.get("entries", [])]
        kept = filter_entries(entries, self.query)
        ctx.logger.info(f"index: {len(kept)} of {len(entries)} entries match the query")
        tasks: list[tuple[str, IndexEntry]] = []
        seen: set[str] = set()
        for entry in kept:
            key = sanitize_element_id(entry.id)
            if key in seen:
                ctx.logger.warn(f"index: id collision for entry {entry.id!r}, keeping first")
                continue
            seen.add(key)
            tasks.append((key, entry))
        return tasks

    def retrieve(
        self, key: str, task: IndexEntry, out: BatchHandle, ctx: StageContext
    ) -> None:
        try:
            data = _http_get(task.media_url)
        except (urllib.error.URLError, OSError) as exc:
            raise DownloadFailure(f"download failed for {task.media_url}: {exc}") from exc
        media_name = sanitize_element_id(
            Path(urllib.parse.urlparse(task.media_url).path).name or "video"
        )
        write_element(
            out,
            key,
            [
                (media_name, data, MediaType.VIDEO),
                ("meta.json", json.dumps(task.to_dict(), indent=2).encode(), MediaType.JSON),
            ],
            attrs={"title": task.title, "duration_s": task.duration_s,
                   "source_url": task.media_url},
            produced_by=self.name,
        )
