from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from fixture_media import build_frame_dir
from triage.errors import ConfigError, MissingSidecar
from triage.frames import FrameSampler
from triage.scoring import ScoreFrames, SidecarScorer, make_scorer
from triage.store import MediaType, init_batch, list_elements, load_element, write_element
from triage.timeline import read_timeline

BIN = Path(__file__).parent / "bin"
H = "c" * 64


def _sampled_batch(base_dir, ctx, vid="v1", duration=3.0, scores=(0.9, 0.1, 0.8)):
    src_batch = init_batch(base_dir, "source", MediaType.VIDEO, H)
    fixture = base_dir / "_fx"
    build_frame_dir(fixture, duration, 1.0, scores=list(scores) if scores else None)
    files = [
        (p.name, p.read_bytes(),
         MediaType.VIDEO if p.name == "video.json" else
         (MediaType.JSON if p.name.endswith(".json") else MediaType.IMAGE))
        for p in sorted(fixture.iterdir())
    ]
    write_element(src_batch, vid, files, attrs={"title": f"Title {vid}"})
    frames = init_batch(base_dir, "frames", MediaType.IMAGE, H)
    sampler = FrameSampler({"rate_fps": 1.0})
    for key, inputs in sampler.group(list_elements(src_batch)):
        sampler.analyse(key, inputs, frames, ctx)
    return frames


def _run_score(frames, base_dir, ctx, scorer_config):
    out = init_batch(base_dir, "score", MediaType.JSON, H)
    analyser = ScoreFrames({"scorer": scorer_config})
    for key, inputs in analyser.group(list_elements(frames)):
        analyser.analyse(key, inputs, out, ctx)
    return out


class TestSidecarScoring:
    def test_pass_through(self, base_dir, ctx):
        frames = _sampled_batch(base_dir, ctx, scores=(0.9, 0.1, 0.8))
        out = _run_score(frames, base_dir, ctx, {"backend": "sidecar"})
        timeline = read_timeline(base_dir / "score" / "v1" / "timeline.json")
        assert [r.score for r in timeline.records] == [0.9, 0.1, 0.8]
        assert [r.frame_index for r in timeline.records] == [0, 1, 2]
        assert [r.t_seconds for r in timeline.records] == [0.0, 1.0, 2.0]
        assert timeline.title == "Title v1"
        assert timeline.duration_s == 3.0

    def test_missing_sidecar_frame_omitted(self, base_dir, ctx):
        frames = _sampled_batch(base_dir, ctx, scores=None)
        # add a sidecar to exactly one frame after the fact is not possible
        # (elements are immutable), so all frames lack sidecars here
        out = _run_score(frames, base_dir, ctx, {"backend": "sidecar"})
        timeline = read_timeline(base_dir / "score" / "v1" / "timeline.json")
        assert timeline.records == []
        log = (base_dir / "logs" / "test-run.log").read_text()
        assert "omitted" in log and "MissingSidecar" not in log  # message, not repr

    def test_scorer_errors_are_missing_sidecar(self, base_dir, ctx):
        frames = _sampled_batch(base_dir, ctx, scores=None)
        frame = next(e for e in list_elements(frames) if "__f" in e.id)
        with pytest.raises(MissingSidecar):
            SidecarScorer().score(frame, ctx)


class TestConstantScoring:
    def test_fixed_score(self, base_dir, ctx):
        frames = _sampled_batch(base_dir, ctx, duration=5.0, scores=None)
        out = _run_score(
            frames, base_dir, ctx, {"backend": "constant", "score": 0.25, "label": "target"}
        )
        timeline = read_timeline(base_dir / "score" / "v1" / "timeline.json")
        assert [r.score for r in timeline.records] == [0.25] * 5

    def test_bad_constant_rejected(self):
        with pytest.raises(ConfigError):
            make_scorer({"backend": "constant", "score": 2.0})

    def test_unknown_backend_rejected(self):
        with pytest.raises(ConfigError):
            make_scorer({"backend": "nope"})


class TestExternalScoring:
    def test_mean_pixel_matches_oracle(self, base_dir, ctx):
        frames = _sampled_batch(base_dir, ctx, duration=4.0, scores=None)
        out = _run_score(
            frames,
            base_dir,
            ctx,
            {"backend": "external", "command": [sys.executable, str(BIN / "mean_scorer.py")]},
        )
        timeline = read_timeline(base_dir / "score" / "v1" / "timeline.json")
        # oracle: read each sampled frame image directly
        for record in timeline.records:
            frame = load_element(frames, f"v1__f{record.frame_index}")
            png = frame.media_of_type(MediaType.IMAGE)[0]
            pixels = np.asarray(Image.open(png).convert("L"), dtype=np.float64)
            assert record.score == pytest.approx(pixels.mean() / 255.0, abs=1e-6)

    def test_failing_scorer_omits_frame_only(self, base_dir, ctx):
        frames = _sampled_batch(base_dir, ctx, duration=2.0, scores=None)
        out = _run_score(
            frames,
            base_dir,
            ctx,
            {"backend": "external",
             "command": [sys.executable, "-c", "import sys; sys.exit(1)"]},
        )
        timeline = read_timeline(base_dir / "score" / "v1" / "timeline.json")
        assert timeline.records == []  # all frames failed, timeline still committed


class TestGrouping:
    def test_one_timeline_per_video(self, base_dir, ctx):
        src_batch = init_batch(base_dir, "source", MediaType.VIDEO, H)
        for vid, duration in (("a", 2.0), ("b", 3.0)):
            fixture = base_dir / f"_fx_{vid}"
            build_frame_dir(fixture, duration, 1.0, scores=[0.5] * int(duration))
            files = [
                (p.name, p.read_bytes(),
                 MediaType.VIDEO if p.name == "video.json" else
                 (MediaType.JSON if p.name.endswith(".json") else MediaType.IMAGE))
                for p in sorted(fixture.iterdir())
            ]
            write_element(src_batch, vid, files)
        frames = init_batch(base_dir, "frames", MediaType.IMAGE, H)
        sampler = FrameSampler({"rate_fps": 1.0})
        for key, inputs in sampler.group(list_elements(src_batch)):
            sampler.analyse(key, inputs, frames, ctx)

        out = _run_score(frames, base_dir, ctx, {"backend": "sidecar"})
        ids = {e.id for e in list_elements(out)}
        assert ids == {"a", "b"}
        assert len(read_timeline(base_dir / "score" / "a" / "timeline.json").records) == 2
        assert len(read_timeline(base_dir / "score" / "b" / "timeline.json").records) == 3

    def test_frames_without_index_group_by_attr(self, base_dir, ctx):
        frames = init_batch(base_dir, "frames", MediaType.IMAGE, H)
        for k in range(3):
            write_element(
                frames,
                f"loose__f{k}",
                [(f"f{k}.png", b"\x89PNG", MediaType.IMAGE),
                 (f"f{k}.png.score.json",
                  json.dumps({"labels": {"target": 0.5}}).encode(), MediaType.JSON)],
                attrs={"t_seconds": float(k), "frame_index": k, "source_video": "loose"},
            )
        analyser = ScoreFrames({"scorer": {"backend": "sidecar"}})
        groups = analyser.group(list_elements(frames))
        assert [key for key, _ in groups] == ["loose"]
        assert len(groups[0][1]) == 3

    def test_requires_scorer_config(self):
        with pytest.raises(ConfigError):
            ScoreFrames({})
