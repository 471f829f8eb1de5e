"""Run configuration: YAML parsing, validation, and config hashing.

One YAML file drives a run. Exact schema:

    folder: <base dir for all batches>
    select:
      name: <selector>
      config: {...}
    analyse:
      - name: <analyser>
        config: {...}

At least one of select/analyse must be present. Component names are checked
against the registry at parse time so typos fail before any work starts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import registry
from .errors import ConfigSyntaxError, MissingField, UnknownComponent

_TOP_LEVEL_KEYS = {"folder", "select", "analyse"}
_COMPONENT_KEYS = {"name", "config"}


@dataclass(frozen=True)
class ComponentSpec:
    name: str
    config: dict = field(default_factory=dict)

    def hash(self) -> str:
        return config_hash({"name": self.name, "config": self.config})


@dataclass(frozen=True)
class RunConfig:
    folder: Path
    select: ComponentSpec | None = None
    analyse: tuple[ComponentSpec, ...] = ()


@dataclass(frozen=True)
class WorkerPoolConfig:
    workers: int = 0  # 0 means "use host CPU count"

    def __post_init__(self):
        if self.workers < 0:
            raise ValueError("workers must be >= 0")

    def effective_workers(self) -> int:
        import os

        if self.workers >= 1:
            return self.workers
        return os.cpu_count() or 1


def config_hash(payload: dict) -> str:
    """Content hash of a component configuration.

    Canonical JSON (sorted keys, no whitespace) hashed with SHA-256, so the
    same logical config always resumes the same batch.
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _parse_component(raw: object, where: str) -> ComponentSpec:
    if not isinstance(raw, dict):
        raise MissingField(f"{where} must be a mapping with a 'name' key")
    unknown = set(raw) - _COMPONENT_KEYS
    if unknown:
        raise ConfigSyntaxError(f"unknown keys in {where}: {sorted(unknown)}")
    name = raw.get("name")
    if not name or not isinstance(name, str):
        raise MissingField(f"{where} is missing a non-empty 'name'")
    cfg = raw.get("config") or {}
    if not isinstance(cfg, dict):
        raise ConfigSyntaxError(f"{where}.config must be a mapping")
    json.dumps(cfg, default=str)  # must be serializable for hashing
    return ComponentSpec(name=name, config=cfg)


def parse_config(path: Path | str) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigSyntaxError(f"invalid YAML in {path}{line}: {exc}") from exc

    if not isinstance(raw, dict):
        raise ConfigSyntaxError(f"config root must be a mapping, got {type(raw).__name__}")
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigSyntaxError(f"unknown top-level keys: {sorted(unknown)}")
    if "folder" not in raw or not raw["folder"]:
        raise MissingField("config requires a 'folder' key")
    if "select" not in raw and "analyse" not in raw:
        raise MissingField("config needs at least one of 'select' or 'analyse'")

    select = None
    if raw.get("select") is not None:
        select = _parse_component(raw["select"], "select")
        if select.name not in registry.selector_names():
            raise UnknownComponent(f"unknown selector: {select.name!r}")

    analyse: list[ComponentSpec] = []
    if raw.get("analyse") is not None:
        if not isinstance(raw["analyse"], list) or not raw["analyse"]:
            raise ConfigSyntaxError("'analyse' must be a non-empty list")
        for i, item in enumerate(raw["analyse"]):
            spec = _parse_component(item, f"analyse[{i}]")
            if spec.name not in registry.analyser_names():
                raise UnknownComponent(f"unknown analyser: {spec.name!r}")
            analyse.append(spec)

    return RunConfig(folder=Path(raw["folder"]), select=select, analyse=tuple(analyse))
