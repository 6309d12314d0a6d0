"""
Artifact Store for experiment outputs.
Writes NDJSON records, CSV tables, long-format plot tables and the run manifest
into one output directory per run.
"""

import hashlib
import json
import platform
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from src import __version__
from src.core_tools.logger import LabLogger

logger = LabLogger("ArtifactStore")


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class ArtifactStore:
    """Owns the output directory of a single run."""

    def __init__(self, out_dir: Path, run_id: str):
        """
        Args:
            out_dir: Directory receiving the artifacts (created if missing)
            run_id: Identifier recorded in the manifest
        """
        self.out_dir = Path(out_dir)
        self.run_id = run_id
        self.written: List[Path] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        logger.debug("Artifact written", data={"path": path.name})
        return path

    def write_ndjson(self, name: str, records: Iterable[Dict[str, Any]]) -> Path:
        path = self.path(name)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            for record in records:
                f.write(json.dumps(_jsonable(record), sort_keys=True))
                f.write("\n")
        return self._record(path)

    def write_csv(self, name: str, frame: pd.DataFrame, header: Optional[Dict[str, Any]] = None) -> Path:
        """Write a table, optionally preceded by '# key=value' comment lines."""
        path = self.path(name)
        with path.open("w", encoding="utf-8", newline="") as f:
            for key, value in (header or {}).items():
                f.write(f"# {key}={value}\n")
            frame.to_csv(f, index=False, lineterminator="\n", float_format="%.12g")
        return self._record(path)

    def write_plot_table(self, name: str, series: Dict[str, tuple]) -> Path:
        """Write a long-format (x, y, series) table from {label: (xs, ys)}."""
        rows = []
        for label, (xs, ys) in series.items():
            for x, y in zip(xs, ys):
                rows.append({"x": float(x), "y": float(y), "series": label})
        return self.write_csv(name, pd.DataFrame(rows, columns=["x", "y", "series"]))

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.path(name)
        path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return self._record(path)

    def write_manifest(self, command: str, config: Dict[str, Any], seed: int, wall_time_s: float) -> Path:
        manifest = {
            "run_id": self.run_id,
            "command": command,
            "config": config,
            "code_version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "seed": seed,
            "wall_time_s": round(float(wall_time_s), 3),
            "artifacts": {p.name: sha256_file(p) for p in self.written if p.exists()},
        }
        return self.write_json("manifest.json", manifest)
