"""
Serialization of fields, tables and overlap matrices.

CSV field files have one row per grid point: ``q_x[,q_y],value,masked``.
Masked points keep their stored value and carry ``masked = 1``. Floats are
written with ``repr``, which round-trips exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .approx import OverlapMatrix
from .grid import ProductGrid

AXIS_NAMES = ("q_x", "q_y")


def _jsonable(obj):
    """Convert numpy containers and non-finite floats (to null) for JSON."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dump_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=1, allow_nan=False) + "\n")


def export_field(values: np.ndarray, grid: ProductGrid, path, fmt: str = "csv", mask: np.ndarray | None = None) -> Path:
    """
    Write a scalar field.

    ``mask`` marks points where the field is undefined (True = masked).
    Non-finite values are always flagged as masked.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValueError(f"field shape {values.shape} does not match grid {grid.shape}")
    masked = ~np.isfinite(values)
    if mask is not None:
        masked |= np.asarray(mask, dtype=bool)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    coords = grid.coordinates()
    names = list(AXIS_NAMES[: grid.ndim])
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names + ["value", "masked"])
            for q, v, m in zip(coords, values.ravel(), masked.ravel()):
                w.writerow([repr(float(c)) for c in q] + [repr(float(v)), int(m)])
    elif fmt == "json":
        dump_json(
            {
                "axes": names,
                "shape": list(grid.shape),
                "points": [grid.axes[a].points for a in range(grid.ndim)],
                "values": [float(v) if math.isfinite(v) else None for v in values.ravel()],
                "masked": masked.ravel().astype(int),
            },
            path,
        )
    else:
        raise ValueError(f"unknown field format {fmt!r}")
    return path


def read_field(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a field file written by :func:`export_field`; returns ``(coordinates, values, masked)`` flat."""
    path = Path(path)
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        pts = [np.asarray(p) for p in data["points"]]
        mesh = np.meshgrid(*pts, indexing="ij")
        coords = np.stack([m.ravel() for m in mesh], axis=1)
        values = np.array([np.nan if v is None else v for v in data["values"]], dtype=float)
        return coords, values, np.asarray(data["masked"], dtype=bool)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    nd = len(header) - 2
    arr = np.array([[float(x) for x in r] for r in body]) if body else np.empty((0, nd + 2))
    return arr[:, :nd], arr[:, nd], arr[:, nd + 1].astype(bool)


@dataclass
class EnergyColumn:
    """One column of an energy table with its provenance."""

    label: str
    values: np.ndarray
    module: str
    operation: str
    rows: list[int] | None = None  # state indices of the entries; default 0..len-1

    def to_dict(self) -> dict:
        rows = self.rows if self.rows is not None else list(range(len(self.values)))
        return {"label": self.label, "module": self.module, "operation": self.operation,
                "rows": rows, "values": self.values}


@dataclass
class RunReport:
    """
    Results of one pipeline run.

    ``data`` holds in-memory objects (states, factorizations, spectra) that
    are not serialized.
    """

    config_source: str
    energy_table: dict[str, EnergyColumn] = field(default_factory=dict)
    overlap_tables: dict[str, OverlapMatrix] = field(default_factory=dict)
    overlap_provenance: dict[str, dict] = field(default_factory=dict)
    factorization: list[dict] = field(default_factory=list)
    convergence: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    converged: bool = True
    data: dict = field(default_factory=dict)

    def add_energies(self, label, values, module, operation, rows=None) -> None:
        self.energy_table[label] = EnergyColumn(label, np.asarray(values, dtype=float), module, operation, rows)

    def add_overlaps(self, name: str, om: OverlapMatrix, module: str, operation: str) -> None:
        self.overlap_tables[name] = om
        self.overlap_provenance[name] = {"module": module, "operation": operation, "rows": om.row_label,
                                         "cols": om.col_label}

    def energy_json(self) -> dict:
        return {"config": self.config_source, "columns": {k: c.to_dict() for k, c in self.energy_table.items()}}

    def energy_text(self) -> str:
        """Human-readable energy table, 6 significant digits."""
        cols = list(self.energy_table.values())
        nrows = max((max(c.rows) + 1 if c.rows else len(c.values)) for c in cols) if cols else 0
        width = 12
        lines = ["n".rjust(4) + "".join(c.label.rjust(width) for c in cols)]
        for n in range(nrows):
            cells = []
            for c in cols:
                rows = c.rows if c.rows is not None else list(range(len(c.values)))
                cells.append(f"{c.values[rows.index(n)]:.6g}".rjust(width) if n in rows else "--".rjust(width))
            lines.append(str(n).rjust(4) + "".join(cells))
        return "\n".join(lines) + "\n"

    def summary_json(self) -> dict:
        return {
            "config": self.config_source,
            "converged": self.converged,
            "energies": {k: c.to_dict() for k, c in self.energy_table.items()},
            "overlaps": {k: {**self.overlap_provenance[k], "diagonal": om.diagonal(), "summary": om.summary()}
                         for k, om in self.overlap_tables.items()},
            "factorization": self.factorization,
            "convergence": self.convergence,
            "checks": self.checks,
        }

    def write(self, directory: Path, formats=("csv", "json")) -> list[Path]:
        """Write tables and overlap matrices; field files are written by the pipeline."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        p = directory / "energy_table.json"
        dump_json(self.energy_json(), p)
        written.append(p)
        p = directory / "energy_table.txt"
        p.write_text(self.energy_text())
        written.append(p)
        for name, om in self.overlap_tables.items():
            if "csv" in formats:
                p = directory / f"overlaps_{name}.csv"
                p.write_text(om.to_csv())
                written.append(p)
            if "json" in formats:
                p = directory / f"overlaps_{name}.json"
                p.write_text(om.to_json() + "\n")
                written.append(p)
        p = directory / "report.json"
        dump_json(self.summary_json(), p)
        written.append(p)
        return written
