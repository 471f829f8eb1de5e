"""Media triage pipeline.

Selectors retrieve media from a source and commit them as typed filesystem
elements; analysers map elements to new elements in resumable, parallel
stages; the viewer serves ranked per-video prediction timelines for human
review.
"""

from .config import ComponentSpec, RunConfig, WorkerPoolConfig, config_hash, parse_config
from .kernels import Box, image_score_from_detections, iou, nms, softmax, top_fraction_mean
from .orchestrator import RunReport, StageReport, run, run_chain
from .store import (
    BatchHandle,
    Element,
    MediaType,
    completed_ids,
    init_batch,
    list_elements,
    open_batch,
    write_element,
)
from .timeline import PredictionRecord, Timeline, load_timelines, rank_videos

__version__ = "0.1.0"

__all__ = [
    "BatchHandle",
    "Box",
    "ComponentSpec",
    "Element",
    "MediaType",
    "PredictionRecord",
    "RunConfig",
    "RunReport",
    "StageReport",
    "Timeline",
    "WorkerPoolConfig",
    "completed_ids",
    "config_hash",
    "image_score_from_detections",
    "init_batch",
    "iou",
    "list_elements",
    "load_timelines",
    "nms",
    "open_batch",
    "parse_config",
    "rank_videos",
    "run",
    "run_chain",
    "softmax",
    "top_fraction_mean",
    "write_element",
]
