"""Frame sampling: decode a video element and emit one image element per
sampled frame at a fixed rate.

Two containers are decoded natively so the whole pipeline is testable without
codec dependencies:

  - frame-dir: the element holds `video.json` ({"duration_s", "fps"}) with
    numbered `frame_NNNNNN.png` (or .pgm) files beside it;
  - frame-dir zip: the same layout packed into a single `*.framedir.zip`,
    which is what an index endpoint serves as "the video file".

Anything else is handed to a configurable external decoder command that must
write a frame-dir into MTRIAGE_OUTPUT_DIR (external-process contract).

Sampling picks timestamps t = k / rate_fps for k = 0, 1, ... while
t < duration, so a 10 s video at 1 fps yields exactly the 10 frames
t = 0..9. Frame images are copied through untouched, together with any
`<frame>.score.json` sidecar, so ground-truth scores can ride along with
fixture corpora.
"""

from __future__ import annotations

import io
import json
import re
import tempfile
import zipfile
from pathlib import Path

from .components import Analyser, StageContext
from .errors import DecodeFailure, UnsupportedContainer
from .external import invoke_external
from .registry import register_analyser
from .store import BatchHandle, Element, MediaType, write_element

VIDEO_JSON = "video.json"
_FRAME_RE = re.compile(r"frame_(\d+)\.(png|pgm)$")
SIDECAR_SUFFIX = ".score.json"


def sample_timestamps(duration_s: float, rate_fps: float) -> list[float]:
    """All t = k / rate_fps with t < duration_s, in order."""
    if rate_fps <= 0:
        raise ValueError(f"rate_fps must be positive, got {rate_fps}")
    if duration_s < 0:
        raise ValueError(f"duration_s must be non-negative, got {duration_s}")
    ts: list[float] = []
    k = 0
    while k / rate_fps < duration_s:
        ts.append(k / rate_fps)
        k += 1
    return ts


class FrameDirVideo:
    """Reader over a frame-dir, either as a directory or inside a zip."""

    def __init__(self, duration_s: float, fps: float, frame_names: list[str], reader):
        if duration_s < 0 or fps <= 0:
            raise DecodeFailure(f"bad video.json: duration_s={duration_s}, fps={fps}")
        self.duration_s = duration_s
        self.fps = fps
        self.frame_names = frame_names
        self._read = reader

    @property
    def frame_count(self) -> int:
        return len(self.frame_names)

    def frame_name_at(self, t_seconds: float) -> str:
        if not self.frame_names:
            raise DecodeFailure("frame-dir video has no frames")
        idx = int(t_seconds * self.fps + 1e-9)
        idx = min(idx, len(self.frame_names) - 1)
        return self.frame_names[idx]

    def read(self, name: str) -> bytes:
        return self._read(name)

    def has(self, name: str) -> bool:
        try:
            self._read(name)
            return True
        except (KeyError, OSError):
            return False


def _parse_video_json(data: bytes) -> tuple[float, float]:
    try:
        meta = json.loads(data)
        return float(meta["duration_s"]), float(meta["fps"])
    except (ValueError, KeyError, TypeError) as exc:
        raise DecodeFailure(f"unreadable {VIDEO_JSON}: {exc}") from exc


def _sorted_frames(names: list[str]) -> list[str]:
    frames = [(int(m.group(1)), n) for n in names if (m := _FRAME_RE.fullmatch(n))]
    return [n for _, n in sorted(frames)]


def open_frame_dir(root: Path) -> FrameDirVideo:
    meta_path = root / VIDEO_JSON
    if not meta_path.exists():
        raise DecodeFailure(f"no {VIDEO_JSON} in {root}")
    duration, fps = _parse_video_json(meta_path.read_bytes())
    names = _sorted_frames([p.name for p in root.iterdir() if p.is_file()])
    return FrameDirVideo(duration, fps, names, lambda n: (root / n).read_bytes())


def open_frame_zip(path: Path) -> FrameDirVideo:
    try:
        zf = zipfile.ZipFile(io.BytesIO(path.read_bytes()))
        duration, fps = _parse_video_json(zf.read(VIDEO_JSON))
    except (zipfile.BadZipFile, KeyError, OSError) as exc:
        raise DecodeFailure(f"unreadable frame-dir zip {path.name}: {exc}") from exc
    names = _sorted_frames(zf.namelist())
    return FrameDirVideo(duration, fps, names, zf.read)


def open_video(element: Element, decoder: list[str] | None = None,
               decoder_timeout_s: float = 600.0) -> FrameDirVideo:
    """Open the video medium of an element, whatever its container."""
    videos = element.media_of_type(MediaType.VIDEO)
    if not videos:
        raise DecodeFailure(f"element {element.id} contains no video medium")
    primary = videos[0]
    if primary.name == VIDEO_JSON:
        return open_frame_dir(element.root)
    if primary.name.endswith(".zip"):
        return open_frame_zip(primary)
    if decoder:
        workdir = Path(tempfile.mkdtemp(prefix="decode-"))
        result = invoke_external(
            decoder, element.root, workdir,
            config_json=json.dumps({"video": primary.name}),
            timeout_s=decoder_timeout_s,
        )
        if not result.ok:
            raise DecodeFailure(
                f"decoder exited {result.exit_code} on element {element.id}: "
                f"{result.stderr.decode('utf-8', 'replace')[:500]}"
            )
        return open_frame_dir(workdir)
    raise UnsupportedContainer(
        f"element {element.id}: no native decoder for {primary.name!r} "
        "and no external decoder configured"
    )


@register_analyser
class FrameSampler(Analyser):
    """Per input video, commits one image element per sampled frame named
    `<video_id>__f<k>`, then a frame-index element (id = video id) whose
    presence in the ledger marks the whole video done."""

    name = "frames"
    media_type = MediaType.IMAGE

    def __init__(self, config: dict):
        super().__init__(config)
        self.rate_fps = float(config.get("rate_fps", 1.0))
        if self.rate_fps <= 0:
            raise ValueError("rate_fps must be positive")
        self.decoder = config.get("decoder")
        if self.decoder is not None:
            self.decoder = [str(part) for part in self.decoder]

    def analyse(
        self, key: str, inputs: list[Element], out: BatchHandle, ctx: StageContext
    ) -> None:
        (element,) = inputs
        video = open_video(element, decoder=self.decoder)
        timestamps = sample_timestamps(video.duration_s, self.rate_fps)
        index_rows = []
        for k, t in enumerate(timestamps):
            frame_name = video.frame_name_at(t)
            files = [(frame_name, video.read(frame_name), MediaType.IMAGE)]
            sidecar = frame_name + SIDECAR_SUFFIX
            if video.has(sidecar):
                files.append((sidecar, video.read(sidecar), MediaType.JSON))
            frame_id = f"{key}__f{k}"
            write_element(
                out,
                frame_id,
                files,
                attrs={
                    "t_seconds": t,
                    "frame_index": k,
                    "source_video": key,
                    "frame_file": frame_name,
                },
                produced_by=self.name,
                exist_ok=True,  # deterministic re-emit after a partial run
            )
            index_rows.append({"element_id": frame_id, "frame_index": k, "t_seconds": t})

        title = element.attrs.get("title", key)
        index = {
            "video_id": key,
            "title": title,
            "duration_s": video.duration_s,
            "rate_fps": self.rate_fps,
            "frame_count": len(index_rows),
            "frames": index_rows,
        }
        attrs = {
            "kind": "frame_index",
            "title": title,
            "duration_s": video.duration_s,
        }
        if "source_url" in element.attrs:
            attrs["source_url"] = element.attrs["source_url"]
        write_element(
            out,
            key,
            [("frames.json", json.dumps(index, indent=2).encode(), MediaType.JSON)],
            attrs=attrs,
            produced_by=self.name,
        )
