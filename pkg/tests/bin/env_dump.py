#!/usr/bin/env python3
"""Fixture: dump the contract environment variables to env.json."""
import json
import os
from pathlib import Path

out_dir = Path(os.environ["MTRIAGE_OUTPUT_DIR"])
(out_dir / "env.json").write_text(
    json.dumps(
        {
            "element_dir": os.environ["MTRIAGE_ELEMENT_DIR"],
            "output_dir": os.environ["MTRIAGE_OUTPUT_DIR"],
            "config": os.environ["MTRIAGE_CONFIG"],
        }
    )
)
print("dumped environment")
