#!/usr/bin/env python3
"""Regenerate the bundled fixture JSON files from the instance builders."""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from mosipcert.instances import write_fixtures  # noqa: E402

if __name__ == "__main__":
    target = pathlib.Path(__file__).resolve().parents[1] / "src" / "mosipcert" / "fixtures"
    for path in write_fixtures(target):
        print(f"wrote {path}")
