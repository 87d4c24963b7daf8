"""Run directories: runs/<hash>/{manifest.json, tables/, fields/}.

Tables are UTF-8 CSV with a header row. Floats are written with repr, so every value parses
back to the identical float; cells that do not apply are left blank.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from ..config.settings import settings
from ..models.run import RunManifest
from ..spectral.lattice import FourierField
from ..spectral.snapshot import SnapshotFormat, write_snapshot

logger = logging.getLogger(__name__)

Cell = Union[float, int, str, bool, None]

MANIFEST_NAME = "manifest.json"


def format_cell(value: Cell) -> str:
    """CSV text of one cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_cell(text: str) -> Cell:
    """Inverse of format_cell for numbers, booleans and blanks; other text is kept."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class RunStore:
    """Artifact writer for one run directory."""

    def __init__(self, run_hash: str, root: Optional[Path] = None):
        """Initialize the store.

        Args:
            run_hash: Content hash naming the run directory
            root: Output root, settings.output_root if unset
        """
        self.run_hash = run_hash
        self.root = Path(settings.output_root if root is None else root)
        self.path = self.root / run_hash
        self.artifacts: list[str] = []

    @property
    def tables_dir(self) -> Path:
        return self.path / "tables"

    @property
    def fields_dir(self) -> Path:
        return self.path / "fields"

    @property
    def manifest_path(self) -> Path:
        return self.path / MANIFEST_NAME

    def _track(self, path: Path) -> Path:
        relative = path.relative_to(self.path).as_posix()
        if relative not in self.artifacts:
            self.artifacts.append(relative)
        return path

    def write_table(
        self, name: str, rows: Sequence[Mapping[str, Cell]], columns: Sequence[str]
    ) -> Path:
        """Write tables/<name>.csv with the given column order."""
        self.tables_dir.mkdir(parents=True, exist_ok=True)
        path = self.tables_dir / f"{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(row.get(c)) for c in columns])
        logger.debug(f"Wrote {len(rows)} rows to {path}")
        return self._track(path)

    def read_table(self, name: str) -> list[dict[str, Cell]]:
        """Rows of tables/<name>.csv with parsed cells."""
        path = self.tables_dir / f"{name}.csv"
        with open(path, encoding="utf-8", newline="") as f:
            return [{k: parse_cell(v) for k, v in row.items()} for row in csv.DictReader(f)]

    def write_field(self, name: str, f: FourierField, fmt: SnapshotFormat = "text") -> Path:
        suffix = "bin" if fmt == "binary" else "txt"
        return self._track(write_snapshot(self.fields_dir / f"{name}.{suffix}", f, fmt))

    def write_array(self, name: str, values: NDArray[Any]) -> Path:
        """Write fields/<name>.npy."""
        self.fields_dir.mkdir(parents=True, exist_ok=True)
        path = self.fields_dir / f"{name}.npy"
        np.save(path, values)
        return self._track(path)

    def write_manifest(self, manifest: RunManifest) -> Path:
        self.path.mkdir(parents=True, exist_ok=True)
        manifest.artifacts = sorted(set(manifest.artifacts) | set(self.artifacts))
        self.manifest_path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
        return self.manifest_path

    def read_manifest(self) -> RunManifest:
        return RunManifest.model_validate_json(self.manifest_path.read_text(encoding="utf-8"))

    def is_complete(self) -> bool:
        """Manifest present and every listed artifact on disk."""
        if not self.manifest_path.exists():
            return False
        manifest = self.read_manifest()
        return all((self.path / a).exists() for a in manifest.artifacts)


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """None for missing or non-finite values, which CSV cells leave blank."""
    if value is None or not math.isfinite(value):
        return None
    return value
