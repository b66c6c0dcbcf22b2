"""Writing run summaries and CSV tables into an output directory."""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Mapping

import pandas as pd

from ..models.experiment import RunSummary

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def summary_text(summary: RunSummary) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(summary.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except OSError as e:
        logger.error(f"could not write {path}: {e}")
        Path(tmp).unlink(missing_ok=True)
        raise


def write_artifacts(
    out_dir: Path,
    command: str,
    summary: RunSummary,
    tables: Mapping[str, pd.DataFrame]
) -> Dict[str, Path]:
    """
    Write ``<command>.json`` and one ``<command>_<name>.csv`` per table.

    Everything is rendered in memory first; files are then replaced
    atomically, so a failure while rendering leaves no output behind.

    Args:
        out_dir: Output directory (created if missing)
        command: Command name used as file prefix
        summary: Run summary
        tables: Named data frames

    Returns:
        Mapping from artifact name to written path
    """
    rendered = {f"{command}.json": summary_text(summary)}
    for name, frame in tables.items():
        rendered[f"{command}_{name}.csv"] = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for filename, text in rendered.items():
        path = out_dir / filename
        _atomic_write(path, text)
        written[filename] = path
    logger.info(f"wrote {len(written)} artifacts to {out_dir}")
    return written
