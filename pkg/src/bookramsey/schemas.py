"""JSON schemas for every CLI output, shipped as package data."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

NAMES = ("colouring", "oracle", "lower_bound", "certificate", "monitor_reports", "trace_line", "corpus")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in NAMES:
        raise ValueError(f"unknown schema {name!r}")
    return json.loads(resources.files("bookramsey").joinpath(f"schemas/{name}.json").read_text())
