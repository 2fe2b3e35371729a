"""Text formats read and written by the command line tool.

Observations are header-bearing CSV with columns ``x,y`` and an optional
``noise_sd`` column.  A dense error covariance can be supplied separately as
whitespace-separated rows.  Tables are written with 17 significant digits so
that values survive a round trip exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Malformed input file; the message names the file and line."""


def fmt(value: float) -> str:
    return format(float(value), ".17g")


@dataclass
class Observations:
    xs: np.ndarray
    ys: np.ndarray
    noise_sd: np.ndarray | None
    order: np.ndarray

    @property
    def reordered(self) -> bool:
        return bool(np.any(self.order != np.arange(self.order.size)))


def _parse_float(token: str, where: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise InputError(f"{where}: {token.strip()!r} is not a number") from None
    if not np.isfinite(value):
        raise InputError(f"{where}: non-finite value {token.strip()!r}")
    return value


def read_csv_table(path, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict[str, np.ndarray]:
    """Read a CSV with a header row into a dict of float columns."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError(f"{path}:1: missing header")
    header = [h.strip() for h in rows[0]]
    allowed = set(required) | set(optional)
    missing = [c for c in required if c not in header]
    if missing:
        raise InputError(f"{path}:1: header lacks column(s) {', '.join(missing)}")
    extra = [c for c in header if c not in allowed]
    if extra:
        raise InputError(f"{path}:1: unexpected column(s) {', '.join(extra)}")
    cols: dict[str, list[float]] = {h: [] for h in header}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} fields, found {len(row)}")
        for h, cell in zip(header, row):
            cols[h].append(_parse_float(cell, f"{path}:{lineno}"))
    return {h: np.asarray(v, dtype=float) for h, v in cols.items()}


def read_observations(path) -> Observations:
    """Read observations, stably sorting them by ``x`` if needed."""
    cols = read_csv_table(path, ("x", "y"), ("noise_sd",))
    xs, ys, sd = cols["x"], cols["y"], cols.get("noise_sd")
    if xs.size == 0:
        raise InputError(f"{path}: no observations")
    if np.any(xs < 0):
        raise InputError(f"{path}: x must be >= 0")
    if sd is not None and np.any(sd < 0):
        raise InputError(f"{path}: noise_sd must be >= 0")
    order = np.argsort(xs, kind="stable")
    return Observations(xs[order], ys[order], None if sd is None else sd[order], order)


def read_matrix(path, n: int) -> np.ndarray:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        row = [_parse_float(t, f"{path}:{lineno}") for t in line.split()]
        if len(row) != n:
            raise InputError(f"{path}:{lineno}: expected {n} entries, found {len(row)}")
        rows.append(row)
    if len(rows) != n:
        raise InputError(f"{path}: expected {n} rows, found {len(rows)}")
    return np.asarray(rows)


def write_csv(path_or_file, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        Path(path_or_file).write_text(text)


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``START:STOP:STEP`` into an inclusive grid (empty if STOP < START)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid {spec!r}: expected START:STOP:STEP")
    start, stop, step = (_parse_float(p, f"grid {spec!r}") for p in parts)
    if step <= 0:
        raise InputError(f"grid {spec!r}: STEP must be positive")
    if stop < start:
        return np.empty(0)
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)
