#!/usr/bin/env python3
"""Build a small scores batch for UI tests: three videos whose rankings
differ across every sort key, including one frame at exactly 0.873."""

import sys
from pathlib import Path

from triage.store import MediaType, init_batch, write_element
from triage.timeline import PredictionRecord, Timeline, write_timeline_bytes

VIDEOS = {
    # id -> (scores, source_url); at threshold 0.25 each sort key ranks these
    # differently: fraction gamma>beta>alpha, count beta>gamma>alpha,
    # max alpha>gamma>beta
    "v_alpha": ([0.873, 0.1, 0.1, 0.1], "http://example.test/alpha"),
    "v_beta": ([0.3, 0.3, 0.3, 0.1], None),
    "v_gamma": ([0.5, 0.45], None),
}


def main(base_dir: str) -> None:
    base = Path(base_dir)
    base.mkdir(parents=True, exist_ok=True)
    batch = init_batch(base, "score", MediaType.JSON, "5" * 64)
    for vid, (scores, source_url) in VIDEOS.items():
        timeline = Timeline(
            video_id=vid,
            title=f"Video {vid}",
            duration_s=float(len(scores)),
            records=[
                PredictionRecord(frame_index=i, t_seconds=float(i), label="target", score=s)
                for i, s in enumerate(scores)
            ],
        )
        attrs = {"kind": "timeline", "title": timeline.title}
        if source_url:
            attrs["source_url"] = source_url
        write_element(
            batch,
            vid,
            [("timeline.json", write_timeline_bytes(timeline), MediaType.JSON)],
            attrs=attrs,
        )
    print(batch.root)


if __name__ == "__main__":
    main(sys.argv[1])
