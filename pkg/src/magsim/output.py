"""CSV and metadata writers. Output is byte-stable for identical inputs."""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from . import __version__


@dataclass
class Table:
    name: str
    header: Sequence[str]
    rows: list = field(default_factory=list)


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(table: Table, path: Path) -> Path:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(table.header)
            for row in table.rows:
                if len(row) != len(table.header):
                    raise ValueError(f"{table.name}: row width {len(row)} != header width {len(table.header)}")
                w.writerow([format_value(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_outputs(tables: Sequence[Table], metadata: dict, directory) -> list[Path]:
    """Write every table as ``<name>.csv`` plus ``metadata.json`` into ``directory``."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {d}: {exc.strerror or exc}") from exc
    paths = [write_csv(t, d / f"{t.name}.csv") for t in tables]
    meta = d / "metadata.json"
    try:
        meta.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {meta}: {exc.strerror or exc}") from exc
    paths.append(meta)
    return paths


def run_metadata(command: str, config_hash: str, seed: int, wall_time_s: float, **extra) -> dict:
    return {
        "command": command,
        "config_hash": config_hash,
        "artifact_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": seed,
        "wall_time_s": wall_time_s,
        "python": platform.python_version(),
        **extra,
    }
