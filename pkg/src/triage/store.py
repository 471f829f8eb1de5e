"""Filesystem-backed element and batch storage.

A batch is one directory per component run:

    <base_dir>/<component>/meta.json
    <base_dir>/<component>/ledger.txt
    <base_dir>/<component>/<element_id>/manifest.json
    <base_dir>/<component>/<element_id>/<media files>

Elements are committed atomically: files are written to a staging directory,
renamed into place, and only then recorded in the ledger. An id appears in
the ledger only when its directory is complete, which is what makes
interrupted runs resumable.
"""

from __future__ import annotations

import fcntl
import json
import os
import re
import shutil
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .errors import ConfigMismatch, DuplicateElement, InvalidElementId, IoFailure

_ID_RE = re.compile(r"[A-Za-z0-9._-]{1,128}")
# Names that live at the batch root next to element directories.
_RESERVED_IDS = {"meta.json", "ledger.txt", ".staging", ".ledger.lock"}

META_FILE = "meta.json"
LEDGER_FILE = "ledger.txt"
MANIFEST_FILE = "manifest.json"
_STAGING_DIR = ".staging"
_LOCK_FILE = ".ledger.lock"


class MediaType(str, Enum):
    VIDEO = "video"
    IMAGE = "image"
    JSON = "json"


def validate_element_id(value: str) -> str:
    """Return `value` if it is a safe element id, else raise InvalidElementId."""
    if not isinstance(value, str) or not _ID_RE.fullmatch(value):
        raise InvalidElementId(
            f"element id must be 1-128 chars of [A-Za-z0-9._-], got {value!r}"
        )
    if ".." in value or value.startswith("."):
        raise InvalidElementId(f"element id must not contain '..' or start with '.': {value!r}")
    if value in _RESERVED_IDS:
        raise InvalidElementId(f"element id {value!r} is reserved")
    return value


def sanitize_element_id(raw: str) -> str:
    """Map an arbitrary string onto the element id alphabet.

    Disallowed characters become `_`; the result is clipped to 128 chars.
    Used by selectors to derive ids from filenames and platform ids.
    """
    cleaned = re.sub(r"[^A-Za-z0-9._-]", "_", raw)[:128]
    if not cleaned:
        cleaned = "_"
    if cleaned.startswith("."):
        cleaned = "_" + cleaned[1:]
    while ".." in cleaned:
        cleaned = cleaned.replace("..", "._")
    if cleaned in _RESERVED_IDS:
        cleaned = "_" + cleaned[1:]
    return cleaned


@dataclass(frozen=True)
class BatchMeta:
    component: str
    element_media_type: MediaType
    config_hash: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "element_media_type": self.element_media_type.value,
            "config_hash": self.config_hash,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BatchMeta":
        return cls(
            component=data["component"],
            element_media_type=MediaType(data["element_media_type"]),
            config_hash=data["config_hash"],
            created_at=data["created_at"],
        )


@dataclass(frozen=True)
class Element:
    """A committed, typed bundle of media files: the unit of pipeline work."""

    id: str
    media: tuple[tuple[str, MediaType], ...]
    produced_by: str
    root: Path
    attrs: dict = field(default_factory=dict, compare=False)

    def path(self, rel: str) -> Path:
        return self.root / rel

    def media_of_type(self, media_type: MediaType) -> list[Path]:
        return [self.root / rel for rel, t in self.media if t is media_type]


@dataclass(frozen=True)
class ElementRef:
    id: str
    root: Path


@dataclass
class BatchHandle:
    root: Path
    meta: BatchMeta

    @property
    def component(self) -> str:
        return self.meta.component

    @property
    def ledger_path(self) -> Path:
        return self.root / LEDGER_FILE


def _write_json_atomic(path: Path, payload: dict) -> None:
    tmp = path.with_name(path.name + f".tmp.{uuid.uuid4().hex[:8]}")
    tmp.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def init_batch(
    base_dir: Path | str,
    component: str,
    media_type: MediaType,
    config_hash: str,
) -> BatchHandle:
    """Create `<base_dir>/<component>/` or open it for resumption.

    An existing batch is reopened only when its recorded config hash matches;
    a differing hash raises ConfigMismatch so a silently changed configuration
    can never resume over stale elements.
    """
    base = Path(base_dir)
    if not base.is_dir():
        raise IoFailure(f"base_dir does not exist or is not a directory: {base}")
    if not os.access(base, os.W_OK):
        raise IoFailure(f"base_dir is not writable: {base}")
    if not re.fullmatch(r"[0-9a-f]{64}", config_hash):
        raise ValueError(f"config_hash must be 64 lowercase hex chars, got {config_hash!r}")
    validate_element_id(component)  # component doubles as a directory name

    root = base / component
    meta_path = root / META_FILE
    if meta_path.exists():
        try:
            existing = BatchMeta.from_dict(json.loads(meta_path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise IoFailure(f"unreadable batch meta at {meta_path}: {exc}") from exc
        if existing.config_hash != config_hash:
            raise ConfigMismatch(
                f"batch {root} was created with config hash {existing.config_hash}, "
                f"refusing to resume with {config_hash}"
            )
        (root / LEDGER_FILE).touch(exist_ok=True)
        return BatchHandle(root=root, meta=existing)

    meta = BatchMeta(
        component=component,
        element_media_type=media_type,
        config_hash=config_hash,
        created_at=datetime.now(timezone.utc).isoformat(),
    )
    try:
        root.mkdir(parents=True, exist_ok=True)
        (root / _STAGING_DIR).mkdir(exist_ok=True)
        (root / LEDGER_FILE).touch(exist_ok=True)
        _write_json_atomic(meta_path, meta.to_dict())
    except OSError as exc:
        raise IoFailure(f"cannot initialize batch at {root}: {exc}") from exc
    return BatchHandle(root=root, meta=meta)


def open_batch_dir(root: Path | str) -> BatchHandle:
    """Open an existing batch directory without a config hash check
    (read-only use)."""
    root = Path(root)
    meta_path = root / META_FILE
    if not meta_path.exists():
        raise IoFailure(f"no batch at {root}")
    meta = BatchMeta.from_dict(json.loads(meta_path.read_text(encoding="utf-8")))
    return BatchHandle(root=root, meta=meta)


def open_batch(base_dir: Path | str, component: str) -> BatchHandle:
    return open_batch_dir(Path(base_dir) / component)


def _validate_media_name(name: str) -> str:
    p = Path(name)
    if p.is_absolute() or ".." in p.parts or not p.parts:
        raise InvalidElementId(f"media path must stay inside the element directory: {name!r}")
    if p.parts[0] == MANIFEST_FILE:
        raise InvalidElementId(f"media file may not shadow {MANIFEST_FILE}")
    return name


def _append_ledger(batch: BatchHandle, ids: list[str]) -> None:
    """Append ids to the ledger under an advisory lock, one write syscall."""
    if not ids:
        return
    payload = "".join(f"{i}\n" for i in ids).encode("ascii")
    lock_path = batch.root / _LOCK_FILE
    try:
        lock_fd = os.open(lock_path, os.O_WRONLY | os.O_CREAT, 0o644)
        try:
            fcntl.flock(lock_fd, fcntl.LOCK_EX)
            fd = os.open(batch.ledger_path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
            try:
                os.write(fd, payload)
                os.fsync(fd)
            finally:
                os.close(fd)
        finally:
            os.close(lock_fd)
    except OSError as exc:
        raise IoFailure(f"ledger append failed: {exc}") from exc


def write_element(
    batch: BatchHandle,
    element_id: str,
    files: list[tuple[str, bytes, MediaType]],
    attrs: dict | None = None,
    produced_by: str | None = None,
    exist_ok: bool = False,
) -> ElementRef:
    """Atomically commit an element: stage, rename into place, record in ledger.

    With exist_ok=True an id already in the ledger is returned untouched,
    which lets deterministic analysers re-emit outputs after a partial run.
    """
    validate_element_id(element_id)
    if not files:
        raise ValueError("a committed element needs at least one media file")
    for name, _, _ in files:
        _validate_media_name(name)

    if element_id in completed_ids(batch):
        if exist_ok:
            return ElementRef(id=element_id, root=batch.root / element_id)
        raise DuplicateElement(f"element {element_id!r} already committed in {batch.root}")

    staging_root = batch.root / _STAGING_DIR
    staging = staging_root / f"{element_id}.{uuid.uuid4().hex[:12]}"
    target = batch.root / element_id
    manifest = {
        "id": element_id,
        "produced_by": produced_by or batch.component,
        "media": [{"path": name, "type": mt.value} for name, _, mt in files],
        "attrs": attrs or {},
    }
    try:
        staging_root.mkdir(exist_ok=True)
        staging.mkdir(parents=True)
        for name, data, _ in files:
            dest = staging / name
            dest.parent.mkdir(parents=True, exist_ok=True)
            dest.write_bytes(data)
        _write_json_atomic(staging / MANIFEST_FILE, manifest)
        if target.exists():
            # Leftover from a crash between rename and ledger append; it was
            # never visible (not in the ledger), so replace it.
            shutil.rmtree(target)
        os.rename(staging, target)
    except OSError as exc:
        shutil.rmtree(staging, ignore_errors=True)
        raise IoFailure(f"element write failed for {element_id!r}: {exc}") from exc

    _append_ledger(batch, [element_id])
    return ElementRef(id=element_id, root=target)


def completed_ids(batch: BatchHandle) -> set[str]:
    """The set of committed element ids, read straight from the ledger."""
    try:
        text = batch.ledger_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        return set()
    except OSError as exc:
        raise IoFailure(f"cannot read ledger {batch.ledger_path}: {exc}") from exc
    ids: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        try:
            validate_element_id(line)
        except InvalidElementId as exc:
            raise IoFailure(
                f"corrupted ledger {batch.ledger_path} at line {lineno}: {line!r}"
            ) from exc
        ids.add(line)
    return ids


def load_element(batch: BatchHandle, element_id: str) -> Element:
    root = batch.root / element_id
    manifest_path = root / MANIFEST_FILE
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise IoFailure(f"unreadable manifest for element {element_id!r}: {exc}") from exc
    media = tuple((m["path"], MediaType(m["type"])) for m in manifest["media"])
    return Element(
        id=element_id,
        media=media,
        produced_by=manifest.get("produced_by", batch.component),
        root=root,
        attrs=manifest.get("attrs", {}),
    )


def list_elements(batch: BatchHandle) -> list[Element]:
    """All committed elements, sorted by id. Staged or orphaned directories
    (present on disk but absent from the ledger) are never listed."""
    return [load_element(batch, eid) for eid in sorted(completed_ids(batch))]
