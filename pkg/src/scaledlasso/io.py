"""CSV ingestion and atomic report writing."""

from __future__ import annotations

import contextlib
import csv
import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .exceptions import ParseError


@dataclass(frozen=True, eq=False)
class DataFile:
    """A rectangular numeric table with a designated response column."""

    columns: tuple
    values: np.ndarray
    response: str

    @property
    def feature_names(self) -> list:
        return [c for c in self.columns if c != self.response]

    @property
    def y(self) -> np.ndarray:
        return self.values[:, self.columns.index(self.response)]

    @property
    def X(self) -> np.ndarray:
        keep = [i for i, c in enumerate(self.columns) if c != self.response]
        return self.values[:, keep]


def read_data_csv(path, response: str | None = None) -> DataFile:
    """Read a comma-separated file with a mandatory header row.

    ``response`` defaults to the last column.

    Raises
    ------
    ParseError
        Empty file, ragged rows, a non-finite or non-numeric cell, duplicate
        column names or a missing response column.
    """
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header")
    body = rows[1:]
    if not body:
        raise ParseError(f"{path} has a header but no data rows")
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"line {i}: expected {len(header)} cells, got {len(row)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"line {i}, column {header[j]!r}: cannot parse {cell!r}") from None
            if not np.isfinite(v):
                raise ParseError(f"line {i}, column {header[j]!r}: non-finite value")
            values[i - 2, j] = v
    response = header[-1] if response is None else response
    if response not in header:
        raise ParseError(f"response column {response!r} not in header")
    if len(header) < 2:
        raise ParseError("need at least one feature column besides the response")
    return DataFile(columns=tuple(header), values=values, response=response)


@contextlib.contextmanager
def atomic_write(path):
    """Text file handle whose content replaces ``path`` only on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with io.open(fd, "w", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def fmt_float(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
