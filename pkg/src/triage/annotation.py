"""Annotation tools for synthetic datasets.

A mask is an integer grid the same size as its rendered image: 0 is
background, k > 0 marks the pixels of instance k. From a mask we derive, per
instance, the tightest half-open bounding box, a run-length-encoded bitmap,
and the pixel count.

RLE is row-major with alternating run counts starting from the count of
0-pixels (an uncompressed COCO-style counts list).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .components import Analyser, StageContext
from .errors import MissingMask, UnknownInstanceId
from .kernels import Box
from .registry import register_analyser
from .store import BatchHandle, Element, MediaType, write_element

ANNOTATIONS_FILE = "annotations.json"
MASK_SUFFIXES = (".mask.png", ".mask.pgm")


def rle_encode(binary) -> list[int]:
    """Row-major run lengths, starting with the 0-run (possibly empty)."""
    flat = np.asarray(binary, dtype=bool).ravel()
    if flat.size == 0:
        return [0]
    changes = np.nonzero(np.diff(flat))[0] + 1
    boundaries = np.concatenate(([0], changes, [flat.size]))
    counts = np.diff(boundaries).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return [int(c) for c in counts]


def rle_decode(counts: list[int], width: int, height: int) -> np.ndarray:
    total = sum(counts)
    if total != width * height:
        raise ValueError(f"RLE covers {total} pixels, expected {width * height}")
    flat = np.zeros(total, dtype=bool)
    pos = 0
    value = False
    for run in counts:
        if run < 0:
            raise ValueError("negative run length")
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    return flat.reshape(height, width)


@dataclass(frozen=True)
class InstanceAnnotation:
    instance_id: int
    bbox: Box
    rle: tuple[int, ...]
    pixel_count: int

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "label": self.bbox.label,
            "bbox": [self.bbox.x_min, self.bbox.y_min, self.bbox.x_max, self.bbox.y_max],
            "rle": list(self.rle),
            "pixel_count": self.pixel_count,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "InstanceAnnotation":
        x0, y0, x1, y1 = raw["bbox"]
        return cls(
            instance_id=int(raw["instance_id"]),
            bbox=Box(x0, y0, x1, y1, score=1.0, label=raw["label"]),
            rle=tuple(int(c) for c in raw["rle"]),
            pixel_count=int(raw["pixel_count"]),
        )


def mask_to_annotations(mask, class_map: dict[int, str]) -> list[InstanceAnnotation]:
    """One annotation per distinct nonzero instance id, smallest id first."""
    grid = np.asarray(mask)
    if grid.ndim != 2:
        raise ValueError(f"mask must be a 2D grid, got shape {grid.shape}")
    if grid.size and grid.min() < 0:
        raise ValueError("mask ids must be non-negative")
    out: list[InstanceAnnotation] = []
    for instance_id in [int(v) for v in np.unique(grid) if v > 0]:
        if instance_id not in class_map:
            raise UnknownInstanceId(f"instance id {instance_id} missing from class map")
        binary = grid == instance_id
        ys, xs = np.nonzero(binary)
        bbox = Box(
            x_min=float(xs.min()),
            y_min=float(ys.min()),
            x_max=float(xs.max() + 1),
            y_max=float(ys.max() + 1),
            score=1.0,
            label=class_map[instance_id],
        )
        out.append(
            InstanceAnnotation(
                instance_id=instance_id,
                bbox=bbox,
                rle=tuple(rle_encode(binary)),
                pixel_count=int(binary.sum()),
            )
        )
    return out


def export_annotations(
    pairs: list[tuple[str, np.ndarray]], class_map: dict[int, str]
) -> dict:
    """Aggregate annotations for (file name, mask grid) pairs into the
    annotations.json payload."""
    images = []
    for file_name, mask in pairs:
        grid = np.asarray(mask)
        height, width = grid.shape
        images.append(
            {
                "file": file_name,
                "width": int(width),
                "height": int(height),
                "annotations": [a.to_dict() for a in mask_to_annotations(grid, class_map)],
            }
        )
    return {"images": images}


def parse_annotations(payload: dict) -> list[tuple[str, int, int, list[InstanceAnnotation]]]:
    return [
        (
            img["file"],
            int(img["width"]),
            int(img["height"]),
            [InstanceAnnotation.from_dict(a) for a in img["annotations"]],
        )
        for img in payload["images"]
    ]


def load_mask(path: Path | str, palette: dict[tuple[int, ...], int] | None = None) -> np.ndarray:
    """Read a mask image into an id grid.

    Grayscale masks carry ids directly; color-coded masks (as game engines
    render them) need a palette mapping RGB tuples to instance ids.
    """
    from PIL import Image

    img = Image.open(path)
    arr = np.asarray(img)
    if arr.ndim == 2:
        return arr.astype(np.int64)
    if palette is None:
        raise ValueError(f"color mask {path} needs a palette map")
    grid = np.zeros(arr.shape[:2], dtype=np.int64)
    for color, instance_id in palette.items():
        match = np.all(arr[:, :, : len(color)] == np.array(color), axis=-1)
        grid[match] = instance_id
    return grid


def balanced_interleave(
    sources: list[tuple[str, int]], n: int, seed: int
) -> list[tuple[str, int]]:
    """Round-robin draws over sources in declared order; n draws total.

    Within a source, items come from a seeded permutation that reshuffles
    each time it is exhausted, so small sources are revisited evenly (at most
    one appearance-count difference per item within a source) and per-source
    draw counts differ by at most one overall.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not sources:
        raise ValueError("at least one source required")
    for name, size in sources:
        if size <= 0:
            raise ValueError(f"source {name!r} must have positive size")

    children = np.random.SeedSequence(seed).spawn(len(sources))
    rngs = [np.random.default_rng(ss) for ss in children]
    queues: list[list[int]] = [[] for _ in sources]

    out: list[tuple[str, int]] = []
    for draw in range(n):
        si = draw % len(sources)
        if not queues[si]:
            queues[si] = list(rngs[si].permutation(sources[si][1]))
        out.append((sources[si][0], int(queues[si].pop(0))))
    return out


@register_analyser
class Annotate(Analyser):
    """Exports one annotations element covering every image+mask pair in the
    input batch. A pair without a mask is logged and left out."""

    name = "annotate"
    media_type = MediaType.JSON
    output_id = "annotations"

    def __init__(self, config: dict):
        super().__init__(config)
        raw_map = config.get("class_map", {})
        self.class_map = {int(k): str(v) for k, v in raw_map.items()}

    def group(self, elements: list[Element]) -> list[tuple[str, list[Element]]]:
        if not elements:
            return []
        return [(self.output_id, elements)]

    def _find_mask(self, element: Element) -> Path | None:
        for rel, _ in element.media:
            if rel.endswith(MASK_SUFFIXES) or rel in ("mask.png", "mask.pgm"):
                return element.path(rel)
        return None

    def analyse(
        self, key: str, inputs: list[Element], out: BatchHandle, ctx: StageContext
    ) -> None:
        pairs: list[tuple[str, np.ndarray]] = []
        for element in inputs:
            images = [rel for rel, t in element.media if t is MediaType.IMAGE
                      and not rel.endswith(MASK_SUFFIXES) and rel not in ("mask.png", "mask.pgm")]
            if not images:
                continue
            mask_path = self._find_mask(element)
            if mask_path is None:
                ctx.logger.error(
                    f"annotate: element {element.id} failed: "
                    f"{MissingMask(f'no mask file for {images[0]}')}"
                )
                continue
            pairs.append((f"{element.id}/{images[0]}", load_mask(mask_path)))
        payload = export_annotations(pairs, self.class_map)
        write_element(
            out,
            key,
            [(ANNOTATIONS_FILE, json.dumps(payload, indent=2).encode(), MediaType.JSON)],
            attrs={"kind": "annotations", "image_count": len(pairs)},
            produced_by=self.name,
        )
