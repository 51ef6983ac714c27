"""Bit-stable emission: 17-significant-digit floats, LF-only CSV/JSON, run records.

Identical inputs must produce byte-identical files, so all float formatting
goes through one function and all structures are written with fixed field
order and no environment-dependent content.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path


def fmt_float(value: float) -> str:
    """17 significant digits: enough to round-trip any IEEE double exactly."""
    return f"{value:.17g}"


def _to_json(value, indent: int) -> str:
    pad = " " * indent
    child_pad = " " * (indent + 2)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(child_pad + _to_json(v, indent + 2) for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{child_pad}{json.dumps(str(k))}: {_to_json(v, indent + 2)}"
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def json_text(value) -> str:
    """Deterministic JSON document, insertion-ordered keys, LF line endings."""
    return _to_json(value, 0) + "\n"


def csv_text(header: list[str], rows: list[list[str]]) -> str:
    """CSV with a mandatory header row; cells are pre-formatted strings."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_outputs(out_dir: Path, files: dict[str, str]) -> None:
    """Single-writer emission of pre-rendered texts, LF regardless of platform."""
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(out_dir / name, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def run_record(scenario_text: str, version: str, files: dict[str, str]) -> dict:
    """Manifest tying outputs to the scenario digest and tool version."""
    return {
        "scenario_sha256": sha256_hex(scenario_text),
        "version": version,
        "outputs": [
            {"name": name, "sha256": sha256_hex(text), "bytes": len(text.encode("utf-8"))}
            for name, text in files.items()
        ],
    }
