"""Base classes for the two component kinds.

Selectors generate elements from an external source; analysers consume the
previous batch's elements and commit new ones. Both are scheduled by the
orchestrator in work-item units: an item is skipped when its key is already
in the output ledger, so the element whose id equals the item key must be
the last thing a component commits.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .logs import RunLogger
from .store import BatchHandle, Element, MediaType


@dataclass
class StageContext:
    base_dir: Path
    run_id: str
    logger: RunLogger
    workers: int


class Selector:
    """Retrieves media and commits them as elements.

    discover() lists the work (cheap, runs once); retrieve() downloads and
    commits one element and may run many times concurrently. A selector can
    raise its effective download parallelism via concurrency_per_worker.
    """

    name: str = ""
    media_type: MediaType = MediaType.VIDEO
    concurrency_per_worker: int = 1

    def __init__(self, config: dict):
        self.config = config

    def discover(self, ctx: StageContext) -> list[tuple[str, Any]]:
        """Return (element_id, task) pairs; ids must already be sanitized."""
        raise NotImplementedError

    def retrieve(self, key: str, task: Any, out: BatchHandle, ctx: StageContext) -> None:
        raise NotImplementedError


class Analyser:
    """Maps input elements to output elements.

    The default grouping is one work item per input element keyed by its id,
    which covers one-to-one analysers. Components that fan out (frame
    sampling) or aggregate (per-video scoring) override group().
    """

    name: str = ""
    media_type: MediaType = MediaType.JSON

    def __init__(self, config: dict):
        self.config = config

    def group(self, elements: list[Element]) -> list[tuple[str, list[Element]]]:
        return [(e.id, [e]) for e in elements]

    def analyse(
        self, key: str, inputs: list[Element], out: BatchHandle, ctx: StageContext
    ) -> None:
        raise NotImplementedError
