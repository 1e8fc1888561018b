"""Reading and writing profile CSVs and result files."""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import NonFiniteValue, NonUniformSpacing, ParseError
from .profile_core import TimeSeriesProfile

PROFILE_HEADER = ("timestamp", "power_kw")


def _parse_time(text: str, line: int) -> datetime:
    try:
        return datetime.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(f"bad timestamp {text!r}", line) from None


def _parse_value(text: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"bad power value {text!r}", line) from None
    if not math.isfinite(value):
        raise NonFiniteValue(f"non-finite power value {text!r}", line)
    return value


def load_profile(path: str | Path) -> TimeSeriesProfile:
    """Read a ``timestamp,power_kw`` CSV into a profile.

    Timestamps must be ISO-8601 and strictly increasing by a constant step.
    Errors carry the 1-based file line that caused them.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != PROFILE_HEADER:
            raise ParseError(f"expected header {','.join(PROFILE_HEADER)!r}, got {header!r}", 1)
        times: list[datetime] = []
        values: list[float] = []
        step: timedelta | None = None
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", line)
            t = _parse_time(row[0], line)
            values.append(_parse_value(row[1], line))
            if times:
                gap = t - times[-1]
                if step is None:
                    if gap <= timedelta(0):
                        raise NonUniformSpacing(f"timestamp {t} does not increase", line)
                    step = gap
                elif gap != step:
                    raise NonUniformSpacing(
                        f"timestamp {t} is {gap} after the previous row, expected {step}", line
                    )
            times.append(t)
    if len(values) < 2:
        raise ParseError(f"{path}: need at least two data rows to infer the interval", None)
    return TimeSeriesProfile(values, step.total_seconds() / 3600.0, times[0])


def write_profile(profile: TimeSeriesProfile, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_HEADER)
        for t, v in zip(profile.timestamps(), profile.values):
            w.writerow((t.isoformat(), repr(float(v))))


def dumps_json(data: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, no NaN/inf."""
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(data: Any, path: str | Path) -> None:
    Path(path).write_text(dumps_json(data))


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def write_rows(rows: Sequence[dict[str, Any]], path: str | Path, columns: Iterable[str] | None = None) -> None:
    """Flat CSV; ``None`` becomes an empty cell, floats use round-trip repr."""
    rows = list(rows)
    if columns is None:
        columns = []
        for r in rows:
            columns.extend(k for k in r if k not in columns)
    columns = list(columns)

    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return v

    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(r.get(c)) for c in columns])
