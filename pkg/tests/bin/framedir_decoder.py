#!/usr/bin/env python3
"""Fixture decoder: expand a frame-dir zip from the element into the output
directory, standing in for a real ffmpeg-style decoder."""
import os
import zipfile
from pathlib import Path

element_dir = Path(os.environ["MTRIAGE_ELEMENT_DIR"])
out_dir = Path(os.environ["MTRIAGE_OUTPUT_DIR"])

archives = sorted(element_dir.glob("*.zip")) + sorted(element_dir.glob("*.mp4"))
with zipfile.ZipFile(archives[0]) as zf:
    zf.extractall(out_dir)
