"""External-process execution contract.

An external analyser is any program that reads an element directory and
writes result files to an output directory. The pipeline passes context
through three environment variables:

    MTRIAGE_ELEMENT_DIR  - committed input element directory (read-only use)
    MTRIAGE_OUTPUT_DIR   - directory the process must write results into
    MTRIAGE_CONFIG       - JSON-serialized component config

Success is exit code 0 plus at least one file in the output directory;
an exit-0 run that wrote nothing is an error of its own kind so silent
no-ops cannot masquerade as results.
"""

from __future__ import annotations

import json
import os
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .components import Analyser, StageContext
from .errors import ConfigError, EmptyOutput, ExternalTimeout, SpawnFailure, TriageError
from .logs import RunLogger
from .registry import register_analyser
from .store import BatchHandle, Element, MediaType, write_element

DEFAULT_TIMEOUT_S = 600.0

ENV_ELEMENT_DIR = "MTRIAGE_ELEMENT_DIR"
ENV_OUTPUT_DIR = "MTRIAGE_OUTPUT_DIR"
ENV_CONFIG = "MTRIAGE_CONFIG"


@dataclass(frozen=True)
class ExternalResult:
    exit_code: int
    stdout: bytes
    stderr: bytes

    @property
    def ok(self) -> bool:
        return self.exit_code == 0


def _output_files(out_dir: Path) -> list[Path]:
    return [p for p in out_dir.rglob("*") if p.is_file()]


def invoke_external(
    command: list[str],
    element_dir: Path | str,
    out_dir: Path | str,
    config_json: str = "{}",
    timeout_s: float = DEFAULT_TIMEOUT_S,
    logger: RunLogger | None = None,
) -> ExternalResult:
    """Run one external process against one element.

    Raises SpawnFailure when the process cannot start, ExternalTimeout when it
    outlives timeout_s (the process is killed), and EmptyOutput when it exits 0
    without writing any file. A nonzero exit is returned, not raised: the
    caller decides how element failure is recorded.
    """
    if not command:
        raise SpawnFailure("empty command")
    element_dir = Path(element_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    env = dict(os.environ)
    env[ENV_ELEMENT_DIR] = str(element_dir)
    env[ENV_OUTPUT_DIR] = str(out_dir)
    env[ENV_CONFIG] = config_json

    try:
        proc = subprocess.run(
            command,
            capture_output=True,
            timeout=timeout_s,
            env=env,
        )
    except subprocess.TimeoutExpired as exc:
        raise ExternalTimeout(
            f"{command[0]} exceeded {timeout_s}s on element {element_dir.name}"
        ) from exc
    except (FileNotFoundError, PermissionError, OSError) as exc:
        raise SpawnFailure(f"cannot spawn {command[0]}: {exc}") from exc

    if logger is not None:
        for stream_name, data in (("stdout", proc.stdout), ("stderr", proc.stderr)):
            text = data.decode("utf-8", "replace").strip()
            if text:
                logger.info(f"[{command[0]} {stream_name}] {text}")

    result = ExternalResult(exit_code=proc.returncode, stdout=proc.stdout, stderr=proc.stderr)
    if result.ok and not _output_files(out_dir):
        raise EmptyOutput(
            f"{command[0]} exited 0 but wrote nothing to {out_dir} "
            f"for element {element_dir.name}"
        )
    return result


_EXT_TYPES = {
    ".json": MediaType.JSON,
    ".png": MediaType.IMAGE,
    ".jpg": MediaType.IMAGE,
    ".jpeg": MediaType.IMAGE,
    ".pgm": MediaType.IMAGE,
    ".bmp": MediaType.IMAGE,
}


@register_analyser
class ExternalAnalyser(Analyser):
    """Runs one process per element under the environment contract and
    commits whatever the process wrote as the output element."""

    name = "external"
    media_type = MediaType.JSON

    def __init__(self, config: dict):
        super().__init__(config)
        command = config.get("command")
        if not command:
            raise ConfigError("external analyser needs a 'command'")
        self.command = [str(part) for part in command]
        self.timeout_s = float(config.get("timeout_s", DEFAULT_TIMEOUT_S))
        self.default_type = MediaType(config.get("output_type", "json"))

    def analyse(
        self, key: str, inputs: list[Element], out: BatchHandle, ctx: StageContext
    ) -> None:
        (element,) = inputs
        with tempfile.TemporaryDirectory(prefix="ext-") as tmp:
            result = invoke_external(
                self.command,
                element.root,
                tmp,
                config_json=json.dumps(self.config),
                timeout_s=self.timeout_s,
                logger=ctx.logger,
            )
            if not result.ok:
                raise TriageError(
                    f"external analyser exited {result.exit_code} on {key}: "
                    f"{result.stderr.decode('utf-8', 'replace')[:500]}"
                )
            files = []
            tmp_path = Path(tmp)
            for path in sorted(_output_files(tmp_path)):
                rel = str(path.relative_to(tmp_path))
                files.append(
                    (rel, path.read_bytes(), _EXT_TYPES.get(path.suffix.lower(), self.default_type))
                )
            write_element(out, key, files, produced_by=self.name)
