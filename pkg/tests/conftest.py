from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from triage.components import StageContext
from triage.logs import RunLogger


@pytest.fixture
def base_dir(tmp_path: Path) -> Path:
    base = tmp_path / "base"
    base.mkdir()
    return base


@pytest.fixture
def ctx(base_dir: Path) -> StageContext:
    return StageContext(
        base_dir=base_dir,
        run_id="test-run",
        logger=RunLogger(base_dir, "test-run"),
        workers=2,
    )
