"""CSV and JSON plumbing shared by the command-line tools."""
import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .core import PointCloud
from .errors import InputFormatError

PathLike = Union[str, Path]


def _parse_rows(path: PathLike, width: Optional[int] = None) -> np.ndarray:
    """Numeric rows of a CSV file; a non-numeric first row is a header."""
    rows: List[List[float]] = []
    header_allowed = True
    with open(path, "r", encoding="utf-8", newline="") as csv_file:
        for line_number, row in enumerate(csv.reader(csv_file), start=1):
            cells = [cell.strip() for cell in row]
            if not any(cells):
                continue

            try:
                values = [float(cell) for cell in cells]
            except ValueError as err:
                if header_allowed:
                    header_allowed = False
                    continue

                raise InputFormatError(f"not a number ({err})", line_number) from err

            if not all(math.isfinite(value) for value in values):
                raise InputFormatError("non-finite value", line_number)

            header_allowed = False
            expected = width
            if expected is None and rows:
                expected = len(rows[0])

            if expected is not None and len(values) != expected:
                raise InputFormatError(
                    f"expected {expected} column(s), got {len(values)}", line_number
                )

            rows.append(values)

    if not rows:
        raise InputFormatError(f"No data rows in {path}")

    return np.array(rows, dtype=np.float64)


def read_points(path: PathLike) -> PointCloud:
    """One point per row, one coordinate per column."""
    return PointCloud.from_points(_parse_rows(path))


def read_labels(path: PathLike) -> np.ndarray:
    """Single-column integer labels."""
    values = _parse_rows(path, width=1)[:, 0]
    if not np.all(values == np.round(values)):
        raise InputFormatError(f"Labels in {path} must be integers")

    return values.astype(np.int64)


def write_points(path: PathLike, points: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        for point in np.atleast_2d(points):
            writer.writerow([repr(float(value)) for value in point])


def write_labels(path: PathLike, labels: Sequence[int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        for label in labels:
            writer.writerow([int(label)])


def dataset_digest(cloud: PointCloud) -> Dict[str, Any]:
    """Shape and SHA-256 of the points (row-major float64)."""
    points = np.ascontiguousarray(cloud.points, dtype="<f8")
    return {
        "n": cloud.n,
        "d": cloud.d,
        "sha256": hashlib.sha256(points.tobytes()).hexdigest(),
    }


def to_jsonable(value: Any) -> Any:
    """Convert numpy values and non-finite floats for strict JSON."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}

    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]

    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())

    if isinstance(value, np.generic):
        value = value.item()

    if isinstance(value, float) and not math.isfinite(value):
        return None

    return value


def write_json(path: PathLike, document: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as json_file:
        json.dump(to_jsonable(document), json_file, indent=2, allow_nan=False)
        json_file.write("\n")
