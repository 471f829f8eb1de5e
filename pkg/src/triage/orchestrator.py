"""Run scheduling: selector stage, analyser chain, bounded worker pool.

Each stage consumes the batch produced by the previous one. Work items whose
key is already in the output ledger are skipped, which is the whole of the
resumption logic: a rerun with the same config only touches unfinished work.
A failing element is logged and counted; it never aborts its stage. Only
store-level failures (unreadable batch, config mismatch, unreachable index)
abort the run.
"""

from __future__ import annotations

import time
import uuid
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import registry
from .components import StageContext
from .config import ComponentSpec, RunConfig, WorkerPoolConfig
from .errors import MissingField
from .logs import RunLogger
from .store import BatchHandle, completed_ids, init_batch, list_elements, open_batch


@dataclass(frozen=True)
class StageReport:
    component: str
    succeeded: int
    failed: int
    skipped: int

    @property
    def total(self) -> int:
        return self.succeeded + self.failed + self.skipped


@dataclass
class RunReport:
    run_id: str
    stages: list[StageReport] = field(default_factory=list)
    wall_time_s: float = 0.0

    def stage(self, component: str) -> StageReport:
        for s in self.stages:
            if s.component == component:
                return s
        raise KeyError(component)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "wall_time_s": self.wall_time_s,
            "stages": [
                {
                    "component": s.component,
                    "succeeded": s.succeeded,
                    "failed": s.failed,
                    "skipped": s.skipped,
                }
                for s in self.stages
            ],
        }


def new_run_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
    return f"{stamp}-{uuid.uuid4().hex[:6]}"


def _stage_dir_names(config: RunConfig) -> list[str]:
    """Output directory per analyser stage; deterministic across reruns.

    A repeated analyser name gets `-<stage-index>` appended so chains like
    frames -> score -> frames don't collide.
    """
    used: set[str] = set()
    if config.select is not None:
        used.add(config.select.name)
    names: list[str] = []
    for i, spec in enumerate(config.analyse):
        name = spec.name if spec.name not in used else f"{spec.name}-{i}"
        while name in used:
            name = f"{name}-{i}"
        used.add(name)
        names.append(name)
    return names


def _run_selector_stage(
    spec: ComponentSpec, ctx: StageContext
) -> tuple[BatchHandle, StageReport]:
    selector = registry.create_selector(spec.name, spec.config)
    out = init_batch(ctx.base_dir, spec.name, selector.media_type, spec.hash())
    tasks = selector.discover(ctx)
    done = completed_ids(out)
    pending = [(key, task) for key, task in tasks if key not in done]
    skipped = len(tasks) - len(pending)

    succeeded = failed = 0
    pool_size = max(1, ctx.workers * max(1, selector.concurrency_per_worker))
    if pending:
        with ThreadPoolExecutor(max_workers=pool_size) as pool:
            futures = {
                pool.submit(selector.retrieve, key, task, out, ctx): key
                for key, task in pending
            }
            for fut in as_completed(futures):
                key = futures[fut]
                try:
                    fut.result()
                    succeeded += 1
                except Exception as exc:
                    failed += 1
                    ctx.logger.error(f"{spec.name}: element {key} failed: {exc}")
    report = StageReport(spec.name, succeeded, failed, skipped)
    ctx.logger.info(
        f"{spec.name}: succeeded={succeeded} failed={failed} skipped={skipped}"
    )
    return out, report


def _run_analyser_stage(
    spec: ComponentSpec,
    dir_name: str,
    input_batch: BatchHandle,
    ctx: StageContext,
) -> tuple[BatchHandle, StageReport]:
    analyser = registry.create_analyser(spec.name, spec.config)
    out = init_batch(ctx.base_dir, dir_name, analyser.media_type, spec.hash())
    groups = analyser.group(list_elements(input_batch))
    done = completed_ids(out)
    pending = [(key, inputs) for key, inputs in groups if key not in done]
    skipped = len(groups) - len(pending)

    succeeded = failed = 0
    if pending:
        with ThreadPoolExecutor(max_workers=max(1, ctx.workers)) as pool:
            futures = {
                pool.submit(analyser.analyse, key, inputs, out, ctx): key
                for key, inputs in pending
            }
            for fut in as_completed(futures):
                key = futures[fut]
                try:
                    fut.result()
                    succeeded += 1
                except Exception as exc:
                    failed += 1
                    ctx.logger.error(f"{dir_name}: element {key} failed: {exc}")
    report = StageReport(dir_name, succeeded, failed, skipped)
    ctx.logger.info(
        f"{dir_name}: succeeded={succeeded} failed={failed} skipped={skipped}"
    )
    return out, report


def _resolve_first_input(config: RunConfig) -> BatchHandle:
    """Analyse-only runs name their input batch via the first analyser's
    `input` config key."""
    first = config.analyse[0]
    input_name = first.config.get("input")
    if not input_name:
        raise MissingField(
            "a run without a selector needs analyse[0].config.input naming "
            "an existing batch"
        )
    return open_batch(config.folder, input_name)


def run(config: RunConfig, pool: WorkerPoolConfig | None = None) -> RunReport:
    """Execute a full run: selector (if any), then each analyser in order."""
    pool = pool or WorkerPoolConfig()
    run_id = new_run_id()
    config.folder.mkdir(parents=True, exist_ok=True)
    logger = RunLogger(config.folder, run_id)
    ctx = StageContext(
        base_dir=config.folder,
        run_id=run_id,
        logger=logger,
        workers=pool.effective_workers(),
    )
    report = RunReport(run_id=run_id)
    started = time.monotonic()
    logger.info(f"run started (workers={ctx.workers})")

    batch: BatchHandle | None = None
    if config.select is not None:
        batch, stage_report = _run_selector_stage(config.select, ctx)
        report.stages.append(stage_report)
    if config.analyse:
        if batch is None:
            batch = _resolve_first_input(config)
        dir_names = _stage_dir_names(config)
        for spec, dir_name in zip(config.analyse, dir_names):
            batch, stage_report = _run_analyser_stage(spec, dir_name, batch, ctx)
            report.stages.append(stage_report)

    report.wall_time_s = time.monotonic() - started
    logger.info(f"run finished in {report.wall_time_s:.2f}s")
    return report


def run_chain(
    specs: list[ComponentSpec],
    input_batch: BatchHandle,
    workers: int | None = None,
    run_id: str | None = None,
) -> BatchHandle:
    """Sequentially run a chain of analysers over an input batch.

    Equivalent to invoking run() per analyser: every intermediate batch is
    materialized on disk and independently resumable.
    """
    if not specs:
        raise ValueError("run_chain needs at least one analyser spec")
    base_dir = input_batch.root.parent
    run_id = run_id or new_run_id()
    ctx = StageContext(
        base_dir=base_dir,
        run_id=run_id,
        logger=RunLogger(base_dir, run_id),
        workers=workers or WorkerPoolConfig().effective_workers(),
    )
    used = {input_batch.component}
    batch = input_batch
    for i, spec in enumerate(specs):
        dir_name = spec.name if spec.name not in used else f"{spec.name}-{i}"
        while dir_name in used:
            dir_name = f"{dir_name}-{i}"
        used.add(dir_name)
        batch, _ = _run_analyser_stage(spec, dir_name, batch, ctx)
    return batch
