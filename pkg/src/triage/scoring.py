"""Frame scoring: turn sampled frames into per-video prediction timelines.

Three scorer backends:

  - sidecar: read `<frame>.score.json` committed next to the frame image
    (how fixture corpora carry ground-truth scores);
  - external: run a command per frame under the external-process contract
    and read `scores.json` from its output directory;
  - constant: a fixed score, for pipeline plumbing tests.

Both sidecar and external use the same payload: {"labels": {"<label>": score}}.
A frame whose scorer fails is logged and omitted from the timeline; one bad
frame never sinks its video.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from .components import Analyser, StageContext
from .errors import ConfigError, MissingSidecar, TriageError
from .external import invoke_external
from .frames import SIDECAR_SUFFIX
from .registry import register_analyser
from .store import BatchHandle, Element, MediaType, write_element
from .timeline import TIMELINE_FILE, PredictionRecord, Timeline, write_timeline_bytes


def parse_scores_payload(data: bytes, where: str) -> dict[str, float]:
    try:
        payload = json.loads(data)
        labels = payload["labels"]
    except (ValueError, KeyError, TypeError) as exc:
        raise TriageError(f"bad scores payload in {where}: {exc}") from exc
    out: dict[str, float] = {}
    for label, score in labels.items():
        score = float(score)
        if not 0.0 <= score <= 1.0:
            raise TriageError(f"score out of [0,1] in {where}: {label}={score}")
        out[str(label)] = score
    return out


class SidecarScorer:
    def score(self, frame: Element, ctx: StageContext) -> dict[str, float]:
        images = frame.media_of_type(MediaType.IMAGE)
        if not images:
            raise TriageError(f"element {frame.id} has no image medium to score")
        sidecar = images[0].with_name(images[0].name + SIDECAR_SUFFIX)
        if not sidecar.exists():
            raise MissingSidecar(f"no {sidecar.name} next to frame in element {frame.id}")
        return parse_scores_payload(sidecar.read_bytes(), sidecar.name)


class ConstantScorer:
    def __init__(self, score: float, label: str):
        if not 0.0 <= score <= 1.0:
            raise ConfigError(f"constant score must be in [0,1], got {score}")
        self.value = score
        self.label = label

    def score(self, frame: Element, ctx: StageContext) -> dict[str, float]:
        return {self.label: self.value}


class ExternalScorer:
    def __init__(self, command: list[str], timeout_s: float):
        self.command = command
        self.timeout_s = timeout_s

    def score(self, frame: Element, ctx: StageContext) -> dict[str, float]:
        with tempfile.TemporaryDirectory(prefix="score-") as tmp:
            result = invoke_external(
                self.command,
                frame.root,
                tmp,
                config_json=json.dumps({"element_id": frame.id}),
                timeout_s=self.timeout_s,
                logger=ctx.logger,
            )
            if not result.ok:
                raise TriageError(
                    f"scorer exited {result.exit_code} on {frame.id}: "
                    f"{result.stderr.decode('utf-8', 'replace')[:500]}"
                )
            scores_path = Path(tmp) / "scores.json"
            if not scores_path.exists():
                raise TriageError(f"scorer wrote no scores.json for {frame.id}")
            return parse_scores_payload(scores_path.read_bytes(), f"scores.json ({frame.id})")


def make_scorer(spec: dict):
    backend = spec.get("backend")
    if backend == "sidecar":
        return SidecarScorer()
    if backend == "constant":
        return ConstantScorer(float(spec.get("score", 0.0)), str(spec.get("label", "target")))
    if backend == "external":
        command = spec.get("command")
        if not command:
            raise ConfigError("external scorer needs a 'command'")
        return ExternalScorer([str(p) for p in command], float(spec.get("timeout_s", 600.0)))
    raise ConfigError(f"unknown scorer backend: {backend!r}")


@register_analyser
class ScoreFrames(Analyser):
    """Groups frame elements by source video and commits one timeline element
    per video (element id = video id)."""

    name = "score"
    media_type = MediaType.JSON

    def __init__(self, config: dict):
        super().__init__(config)
        if "scorer" not in config:
            raise ConfigError("score analyser needs a 'scorer' config")
        self.scorer = make_scorer(config["scorer"])

    def group(self, elements: list[Element]) -> list[tuple[str, list[Element]]]:
        by_id = {e.id: e for e in elements}
        groups: dict[str, list[Element]] = {}
        indexed_keys: set[str] = set()
        covered: set[str] = set()
        for e in elements:
            if e.attrs.get("kind") != "frame_index":
                continue
            listing = json.loads(e.path("frames.json").read_text(encoding="utf-8"))
            members = [
                by_id[row["element_id"]]
                for row in listing["frames"]
                if row["element_id"] in by_id
            ]
            groups[e.id] = [e] + members
            indexed_keys.add(e.id)
            covered.add(e.id)
            covered.update(m.id for m in members)
        # Frames that arrived without an index element still group by the
        # source video recorded in their manifest.
        for e in elements:
            if e.id in covered or "source_video" not in e.attrs:
                continue
            vid = e.attrs["source_video"]
            if vid in indexed_keys:
                continue
            groups.setdefault(vid, []).append(e)
        return sorted(groups.items())

    def analyse(
        self, key: str, inputs: list[Element], out: BatchHandle, ctx: StageContext
    ) -> None:
        index = next((e for e in inputs if e.attrs.get("kind") == "frame_index"), None)
        frames = [e for e in inputs if e is not index]
        frames.sort(key=lambda e: int(e.attrs.get("frame_index", 0)))

        records: list[PredictionRecord] = []
        for frame in frames:
            try:
                labels = self.scorer.score(frame, ctx)
            except TriageError as exc:
                ctx.logger.error(f"score: frame {frame.id} failed, omitted: {exc}")
                continue
            frame_index = int(frame.attrs.get("frame_index", 0))
            t_seconds = float(frame.attrs.get("t_seconds", 0.0))
            for label in sorted(labels):
                records.append(
                    PredictionRecord(
                        frame_index=frame_index,
                        t_seconds=t_seconds,
                        label=label,
                        score=labels[label],
                    )
                )

        if index is not None:
            title = index.attrs.get("title", key)
            duration = float(index.attrs.get("duration_s", 0.0))
        else:
            title = key
            duration = max((r.t_seconds for r in records), default=0.0)
        timeline = Timeline(video_id=key, title=title, duration_s=duration, records=records)

        attrs = {"kind": "timeline", "title": title, "duration_s": duration}
        if index is not None and "source_url" in index.attrs:
            attrs["source_url"] = index.attrs["source_url"]
        write_element(
            out,
            key,
            [(TIMELINE_FILE, write_timeline_bytes(timeline), MediaType.JSON)],
            attrs=attrs,
            produced_by=self.name,
        )
