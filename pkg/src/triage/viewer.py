"""Read-only HTTP service over a completed scores batch.

The batch is loaded once at startup into an immutable snapshot; every
response is a pure function of (snapshot, query), so identical queries
return byte-identical bodies. Frames below the threshold are still returned:
the threshold only drives the ranking aggregates, display filtering is the
UI's job.

API:
    GET /api/timelines?threshold=<f>&sort=<key>&limit=<n>
        -> {"threshold": f, "sort": key, "videos": [TimelineView...]}
    GET /api/timelines/<video_id>?threshold=<f>  -> TimelineView
    GET /healthz  -> {"status": "ok", "videos": <count>}

Static UI assets, when a directory is configured, are served for every
non-/api path.
"""

from __future__ import annotations

import json
import mimetypes
import threading
import urllib.parse
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import BadQuery, BindFailure, IoFailure
from .store import open_batch_dir
from .timeline import RANK_METRICS, TIMELINE_FILE, Timeline, rank_videos, read_timeline


class Snapshot:
    """Immutable in-memory view of one scores batch."""

    def __init__(self, timelines: list[Timeline], source_urls: dict[str, str]):
        self.timelines = sorted(timelines, key=lambda t: t.video_id)
        self.by_id = {t.video_id: t for t in self.timelines}
        self.source_urls = source_urls

    @classmethod
    def load(cls, batch_dir: Path | str) -> "Snapshot":
        batch_dir = Path(batch_dir)
        timelines: list[Timeline] = []
        source_urls: dict[str, str] = {}
        try:
            batch = open_batch_dir(batch_dir)
        except IoFailure:
            batch = None
        if batch is not None:
            from .store import list_elements

            for element in list_elements(batch):
                path = element.path(TIMELINE_FILE)
                if not path.exists():
                    continue
                timelines.append(read_timeline(path))
                if "source_url" in element.attrs:
                    source_urls[element.id] = element.attrs["source_url"]
        else:
            # Bare directory of timeline files; fine for ad-hoc inspection.
            for path in sorted(batch_dir.glob(f"*/{TIMELINE_FILE}")):
                timelines.append(read_timeline(path))
        return cls(timelines, source_urls)

    def timeline_view(self, timeline: Timeline, threshold: float) -> dict:
        view = {
            "video_id": timeline.video_id,
            "title": timeline.title,
            "duration_s": timeline.duration_s,
            "frames": [
                {
                    "frame_index": r.frame_index,
                    "t_seconds": r.t_seconds,
                    "label": r.label,
                    "score": r.score,
                }
                for r in timeline.records
            ],
            "positive_fraction": timeline.positive_fraction(threshold),
            "positive_count": timeline.positive_count(threshold),
            "max_score": timeline.max_score(),
        }
        url = self.source_urls.get(timeline.video_id)
        if url:
            view["source_url"] = url
        return view


def get_timelines(
    snapshot: Snapshot,
    threshold: float = 0.0,
    sort: str = "positive_fraction",
    limit: int | None = None,
) -> list[dict]:
    """Ranked TimelineViews; ordering delegates to rank_videos so the service
    can never drift from the library ranking."""
    if not 0.0 <= threshold <= 1.0:
        raise BadQuery(f"threshold must be in [0,1], got {threshold}")
    if sort not in RANK_METRICS:
        raise BadQuery(f"unknown sort key: {sort!r}")
    if limit is not None and limit < 0:
        raise BadQuery(f"limit must be >= 0, got {limit}")
    order = rank_videos(snapshot.timelines, threshold, sort)
    if limit is not None:
        order = order[:limit]
    return [snapshot.timeline_view(snapshot.by_id[vid], threshold) for vid, _ in order]


def _parse_query(raw_query: str) -> tuple[float, str, int | None]:
    params = urllib.parse.parse_qs(raw_query, keep_blank_values=True)

    def single(name: str) -> str | None:
        values = params.get(name)
        if values is None:
            return None
        if len(values) != 1:
            raise BadQuery(f"repeated query parameter: {name}")
        return values[0]

    threshold_raw = single("threshold")
    sort = single("sort") or "positive_fraction"
    limit_raw = single("limit")
    try:
        threshold = float(threshold_raw) if threshold_raw is not None else 0.0
    except ValueError:
        raise BadQuery(f"threshold is not a number: {threshold_raw!r}") from None
    limit: int | None = None
    if limit_raw is not None:
        try:
            limit = int(limit_raw)
        except ValueError:
            raise BadQuery(f"limit is not an integer: {limit_raw!r}") from None
    return threshold, sort, limit


class _Handler(BaseHTTPRequestHandler):
    server: "ViewerServer"

    def log_message(self, fmt, *args):  # route access logs through the run logger
        logger = self.server.logger
        if logger is not None:
            logger.info(f"viewer: {fmt % args}")

    def _send_json(self, status: int, payload: dict | list) -> None:
        body = json.dumps(payload, separators=(",", ":")).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):  # noqa: N802 (http.server API)
        parsed = urllib.parse.urlsplit(self.path)
        path = parsed.path
        snapshot = self.server.snapshot
        try:
            if path == "/healthz":
                self._send_json(200, {"status": "ok", "videos": len(snapshot.timelines)})
            elif path == "/api/timelines":
                threshold, sort, limit = _parse_query(parsed.query)
                videos = get_timelines(snapshot, threshold, sort, limit)
                self._send_json(
                    200, {"threshold": threshold, "sort": sort, "videos": videos}
                )
            elif path.startswith("/api/timelines/"):
                video_id = urllib.parse.unquote(path[len("/api/timelines/") :])
                threshold, _, _ = _parse_query(parsed.query)
                timeline = snapshot.by_id.get(video_id)
                if timeline is None:
                    self._send_json(404, {"error": f"unknown video: {video_id}"})
                else:
                    self._send_json(200, snapshot.timeline_view(timeline, threshold))
            elif path.startswith("/api/"):
                self._send_json(404, {"error": f"unknown endpoint: {path}"})
            else:
                self._serve_static(path)
        except BadQuery as exc:
            self._send_json(422, {"error": str(exc)})

    def _serve_static(self, path: str) -> None:
        ui_dir = self.server.ui_dir
        if ui_dir is None:
            self._send_json(404, {"error": "no UI assets configured"})
            return
        rel = path.lstrip("/") or "index.html"
        target = (ui_dir / rel).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            self._send_json(404, {"error": f"not found: {path}"})
            return
        body = target.read_bytes()
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class ViewerServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bind: tuple[str, int], snapshot: Snapshot,
                 ui_dir: Path | None = None, logger=None):
        self.snapshot = snapshot
        self.ui_dir = ui_dir
        self.logger = logger
        try:
            super().__init__(bind, _Handler)
        except OSError as exc:
            raise BindFailure(f"cannot bind {bind[0]}:{bind[1]}: {exc}") from exc

    @property
    def port(self) -> int:
        return self.server_address[1]

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(
            target=self.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
        )
        thread.start()
        return thread


def serve(
    batch_dir: Path | str,
    bind: str = "127.0.0.1:8080",
    ui_dir: Path | str | None = None,
    logger=None,
) -> ViewerServer:
    """Load the batch snapshot and return a ready (not yet serving) server."""
    snapshot = Snapshot.load(batch_dir)
    if not snapshot.timelines and logger is not None:
        logger.warn(f"viewer: no timelines found under {batch_dir}")
    host, _, port_str = bind.rpartition(":")
    server = ViewerServer(
        (host or "127.0.0.1", int(port_str)),
        snapshot,
        ui_dir=Path(ui_dir) if ui_dir else None,
        logger=logger,
    )
    return server
