"""Run logging: every line goes to the console and to a per-run log file.

Lines are written with a single append syscall so concurrent writers never
interleave mid-line. A failure to write the log file must not suppress the
console line.
"""

from __future__ import annotations

import os
import sys
import threading
from datetime import datetime, timezone
from pathlib import Path

from .errors import IoFailure

LEVELS = ("INFO", "WARN", "ERROR")


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class RunLogger:
    """Appends `<ISO8601-UTC> <LEVEL> <run_id> <message>` to stdout and
    `<base_dir>/logs/<run_id>.log`."""

    def __init__(self, base_dir: Path | str, run_id: str):
        self.base_dir = Path(base_dir)
        self.run_id = run_id
        self.path = self.base_dir / "logs" / f"{run_id}.log"
        self._lock = threading.Lock()

    def log(self, level: str, message: str) -> None:
        if level not in LEVELS:
            raise ValueError(f"unknown log level: {level}")
        # Embedded newlines would break the one-record-per-line format.
        message = message.replace("\r", "\\r").replace("\n", "\\n")
        line = f"{_timestamp()} {level} {self.run_id} {message}\n"
        encoded = line.encode("utf-8")
        with self._lock:
            sys.stdout.write(line)
            sys.stdout.flush()
        file_error: OSError | None = None
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd = os.open(self.path, os.O_WRONLY | os.O_CREAT | os.O_APPEND, 0o644)
            try:
                os.write(fd, encoded)
            finally:
                os.close(fd)
        except OSError as exc:
            file_error = exc
        if file_error is not None:
            raise IoFailure(f"log file write failed: {file_error}") from file_error

    def info(self, message: str) -> None:
        self.log("INFO", message)

    def warn(self, message: str) -> None:
        self.log("WARN", message)

    def error(self, message: str) -> None:
        self.log("ERROR", message)


def log(base_dir: Path | str, run_id: str, level: str, message: str) -> None:
    """One-shot form of RunLogger for callers without a long-lived logger."""
    RunLogger(base_dir, run_id).log(level, message)
