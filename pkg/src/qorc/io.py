"""Surface CSV files, reports and plain-text config files.

CSV contract: a header row, then one row per trading day in strictly
increasing date order. The first column is an ISO date (``YYYY-MM-DD``);
the remaining columns are prices. For the 14 x 16 grid the price columns
are named ``T01_M01, T01_M02, ..., T14_M16``: tenor-major (row-major) order.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SurfacePanel",
    "CSVFormatError",
    "grid_columns",
    "business_days",
    "read_surfaces_csv",
    "write_surfaces_csv",
    "write_json",
    "format_table",
    "export_report",
    "parse_config_file",
]


class CSVFormatError(ValueError):
    pass


@dataclass
class SurfacePanel:
    values: np.ndarray
    dates: list[str]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("surface panel must be a 2-D array")
        if len(self.dates) != self.values.shape[0]:
            raise ValueError(f"{len(self.dates)} dates for {self.values.shape[0]} surfaces")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("surface panel contains missing or non-finite values")

    def __len__(self) -> int:
        return self.values.shape[0]

    def head(self, n: int) -> "SurfacePanel":
        return SurfacePanel(self.values[:n], self.dates[:n])


def grid_columns(n_tenors: int = 14, n_maturities: int = 16) -> list[str]:
    return [f"T{i:02d}_M{j:02d}" for i in range(1, n_tenors + 1)
            for j in range(1, n_maturities + 1)]


def business_days(start: str, n: int) -> list[str]:
    days = np.busday_offset(np.datetime64(start, "D"), np.arange(n), roll="forward")
    return [str(d) for d in days]


def _column_names(width: int) -> list[str]:
    if width == 224:
        return grid_columns()
    return [f"P{j:03d}" for j in range(1, width + 1)]


def write_surfaces_csv(panel: SurfacePanel, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *_column_names(panel.values.shape[1])])
        for date, row in zip(panel.dates, panel.values):
            writer.writerow([date, *(repr(float(v)) for v in row)])


def read_surfaces_csv(path, expected_width: int | None = 224) -> SurfacePanel:
    """Read and validate a surface CSV; errors name the offending line."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CSVFormatError(f"{path}: empty file")
    header = rows[0]
    width = len(header) - 1
    if width < 1:
        raise CSVFormatError(f"{path}: header needs a date column and price columns")
    if expected_width is not None and width != expected_width:
        raise CSVFormatError(f"{path}: expected {expected_width} price columns, found {width}")

    dates, values = [], []
    prev = None
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CSVFormatError(f"{path}:{lineno}: {len(row)} cells, header has {len(header)}")
        try:
            day = dt.date.fromisoformat(row[0].strip())
        except ValueError:
            raise CSVFormatError(f"{path}:{lineno}: bad date {row[0]!r}") from None
        if prev is not None and day <= prev:
            raise CSVFormatError(f"{path}:{lineno}: date {day} is not after {prev}")
        prev = day
        parsed = []
        for col, cell in enumerate(row[1:], start=2):
            text = cell.strip()
            if not text:
                raise CSVFormatError(f"{path}:{lineno}: missing value in column {col}")
            try:
                val = float(text)
            except ValueError:
                raise CSVFormatError(
                    f"{path}:{lineno}: non-numeric value {text!r} in column {col}"
                ) from None
            if not math.isfinite(val):
                raise CSVFormatError(f"{path}:{lineno}: non-finite value in column {col}")
            parsed.append(val)
        dates.append(day.isoformat())
        values.append(parsed)
    if not values:
        raise CSVFormatError(f"{path}: no data rows")
    return SurfacePanel(np.array(values), dates)


def write_json(obj, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def format_table(rows: list[dict], columns: list[str] | None = None) -> str:
    """Left-aligned text table; floats printed with 6 significant digits."""
    if not rows:
        return ""
    columns = columns or list(rows[0])

    def fmt(v):
        if isinstance(v, float):
            return f"{v:.6g}"
        return str(v)

    cells = [[fmt(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def export_report(report: dict, out_dir, stem: str = "report") -> tuple[Path, Path]:
    """Write ``<stem>.json`` and a ``<stem>.txt`` summary table."""
    out_dir = Path(out_dir)
    json_path = out_dir / f"{stem}.json"
    txt_path = out_dir / f"{stem}.txt"
    write_json(report, json_path)
    rows = []
    for split_name in ("validation", "test"):
        block = report.get(split_name)
        if isinstance(block, dict):
            rows.append({
                "split": split_name,
                "latent_mse": block["latent_mse"],
                "surface_rmse": block["surface_rmse"],
                "r2": block["r2"],
                "n": block["n_samples"],
            })
    for name, block in sorted(report.get("baselines", {}).items()):
        rows.append({"split": name, "surface_rmse": block})
    header = f"variant: {report.get('variant', '?')}  seed: {report.get('seed', '?')}\n\n"
    txt_path.write_text(header + format_table(rows, ["split", "latent_mse", "surface_rmse", "r2", "n"]))
    return json_path, txt_path


def parse_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Values are read as Python literals where possible (numbers, booleans
    written ``True``/``False``, tuples, quoted strings); anything else is
    kept as a bare string.
    """
    import ast

    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"{path}:{lineno}: empty key")
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            out[key] = value
    return out
