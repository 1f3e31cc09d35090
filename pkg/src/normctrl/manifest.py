"""Run manifests and canonical JSON serialization.

Every report embeds a manifest: the command, all configuration values, the
seed, the library version, a wall-clock stamp and sha256 digests of input
and output files.  Reports are byte-identical across reruns except for the
``generated_at`` field.

Floats are serialized with Python's shortest round-trip repr, so parsing a
report reproduces every double bit-exactly.  Non-finite values are encoded
as the strings "inf", "-inf", "nan" (strict JSON has no literals for them).
"""

from __future__ import annotations

import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path

from . import __version__


def json_float(x: float) -> float | str:
    if math.isfinite(x):
        return float(x)
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def sanitize(obj):
    """Recursively convert a report object to strict-JSON-safe values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return json_float(obj)
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return sanitize(obj.item())
    if hasattr(obj, "tolist"):  # numpy array
        return sanitize(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def canonical_json(obj) -> str:
    """Compact deterministic JSON with a trailing newline."""
    return json.dumps(sanitize(obj), separators=(",", ":"), ensure_ascii=False) + "\n"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def build_manifest(
    command: str,
    config: dict,
    seed: int | None = None,
    inputs: dict[str, str] | None = None,
    outputs: dict[str, str] | None = None,
) -> dict:
    """inputs/outputs map a label to a file path; digests are computed here."""
    return {
        "command": command,
        "config": sanitize(config),
        "seed": seed,
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "inputs": {
            label: {"path": str(p), "sha256": sha256_file(p)}
            for label, p in (inputs or {}).items()
        },
        "outputs": {
            label: {"path": str(p), "sha256": sha256_file(p)}
            for label, p in (outputs or {}).items()
        },
    }


def wrap_report(manifest: dict, result) -> dict:
    return {"manifest": manifest, "result": sanitize(result)}
