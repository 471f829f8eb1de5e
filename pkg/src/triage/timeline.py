"""Per-video prediction timelines and ranking.

The timeline file is the wire format between the scoring stage, the
evaluation tools, and the viewer:

    timeline.json = {"video_id", "title", "duration_s",
                     "records": [{"frame_index", "t_seconds", "label", "score"}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

RANK_METRICS = ("positive_fraction", "positive_count", "max_score")


@dataclass(frozen=True)
class PredictionRecord:
    frame_index: int
    t_seconds: float
    label: str
    score: float

    def __post_init__(self):
        if self.frame_index < 0 or self.t_seconds < 0:
            raise ValueError("frame_index and t_seconds must be non-negative")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")

    def to_dict(self) -> dict:
        return {
            "frame_index": self.frame_index,
            "t_seconds": self.t_seconds,
            "label": self.label,
            "score": self.score,
        }


@dataclass
class Timeline:
    video_id: str
    title: str
    duration_s: float
    records: list[PredictionRecord] = field(default_factory=list)

    def __post_init__(self):
        last_frame = -1
        last_t = -1.0
        for rec in self.records:
            if rec.frame_index < last_frame:
                raise ValueError(f"timeline {self.video_id}: records not sorted by frame_index")
            if rec.frame_index > last_frame and rec.t_seconds <= last_t and last_frame >= 0:
                raise ValueError(
                    f"timeline {self.video_id}: t_seconds must increase with frame_index"
                )
            last_frame, last_t = rec.frame_index, rec.t_seconds

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "title": self.title,
            "duration_s": self.duration_s,
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Timeline":
        return cls(
            video_id=raw["video_id"],
            title=raw["title"],
            duration_s=float(raw["duration_s"]),
            records=[
                PredictionRecord(
                    frame_index=int(r["frame_index"]),
                    t_seconds=float(r["t_seconds"]),
                    label=str(r["label"]),
                    score=float(r["score"]),
                )
                for r in raw["records"]
            ],
        )

    def max_score(self) -> float:
        return max((r.score for r in self.records), default=0.0)

    def positive_count(self, threshold: float) -> int:
        return sum(1 for r in self.records if r.score >= threshold)

    def positive_fraction(self, threshold: float) -> float:
        if not self.records:
            return 0.0
        return self.positive_count(threshold) / len(self.records)


TIMELINE_FILE = "timeline.json"


def write_timeline_bytes(timeline: Timeline) -> bytes:
    return json.dumps(timeline.to_dict(), indent=2).encode("utf-8")


def read_timeline(path: Path | str) -> Timeline:
    return Timeline.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_timelines(batch_dir: Path | str) -> list[Timeline]:
    """All timeline.json files under a batch directory, sorted by video id."""
    found = sorted(Path(batch_dir).glob(f"*/{TIMELINE_FILE}"))
    return sorted((read_timeline(p) for p in found), key=lambda t: t.video_id)


def metric_value(timeline: Timeline, threshold: float, metric: str) -> float:
    if metric == "positive_fraction":
        return timeline.positive_fraction(threshold)
    if metric == "positive_count":
        return float(timeline.positive_count(threshold))
    if metric == "max_score":
        return timeline.max_score()
    raise ValueError(f"unknown ranking metric: {metric!r}")


def rank_videos(
    timelines: list[Timeline],
    threshold: float,
    metric: str = "positive_fraction",
) -> list[tuple[str, float]]:
    """Order videos by how much of their timeline scores at or above the
    threshold (or by the chosen aggregate), best first, ties by id."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0,1], got {threshold}")
    if metric not in RANK_METRICS:
        raise ValueError(f"unknown ranking metric: {metric!r}")
    scored = [(t.video_id, metric_value(t, threshold, metric)) for t in timelines]
    return sorted(scored, key=lambda pair: (-pair[1], pair[0]))
