"""Versioned JSON report envelopes.

Everything under ``result`` and ``config`` is a deterministic function of
the run configuration.  Wall-clock data goes in ``metadata`` only, so two
reports compare byte-for-byte after :func:`strip_metadata`.
"""

from __future__ import annotations

import json
import math
import platform
from datetime import datetime, timezone
from importlib import resources

import numpy as np

SCHEMA_VERSION = "v1"
SCHEMA_FILE = "report_v1.json"


def plain(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats to JSON values.

    ``inf`` becomes the string ``"inf"`` (``"-inf"``), NaN becomes ``None``.
    """
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def envelope(command, config, result, started=None):
    from . import __version__

    meta = {"generated_at": (started or datetime.now(timezone.utc)).isoformat(timespec="seconds"),
            "gendiff_version": __version__, "python": platform.python_version()}
    return {"schema_version": SCHEMA_VERSION, "command": command, "config": plain(config),
            "result": plain(result), "metadata": meta}


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def strip_metadata(report):
    return {k: v for k, v in report.items() if k != "metadata"}


def load_schema():
    return json.loads(resources.files("gendiff").joinpath("schema", SCHEMA_FILE).read_text())
