"""Reading and writing datasets as CSV.

Format: a header row ``x1,...,xp,y`` (any column names; the last column is
the output), then one observation per line. Decimal point, no thousands
separators, UTF-8. Values must be finite and nonnegative.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import TextIO, Union

from .core import Dataset
from .errors import CsvParseError


def _cell(text: str, line: int, col: int) -> float:
    t = text.strip()
    if not t:
        raise CsvParseError("empty cell", line, col)
    try:
        v = float(t)
    except ValueError:
        raise CsvParseError(f"not a number: {text!r}", line, col) from None
    if not math.isfinite(v):
        raise CsvParseError(f"non-finite value {text!r}", line, col)
    if v < 0:
        raise CsvParseError(f"negative value {text!r}", line, col)
    return v


def read_dataset(stream: TextIO) -> tuple[Dataset, list[str]]:
    """Parse a dataset; returns it with the header names."""
    reader = csv.reader(stream)
    header = None
    xs, ys = [], []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = [c.strip() for c in row]
            if len(header) < 2:
                raise CsvParseError("header needs at least one input column and one output column", line)
            if any(not h for h in header):
                raise CsvParseError("empty column name in header", line)
            continue
        if len(row) != len(header):
            raise CsvParseError(f"expected {len(header)} fields, found {len(row)}", line)
        vals = [_cell(c, line, j + 1) for j, c in enumerate(row)]
        xs.append(vals[:-1])
        ys.append(vals[-1])
    if header is None:
        raise CsvParseError("empty file: no header row", 1)
    if not ys:
        raise CsvParseError("no data rows", reader.line_num + 1)
    return Dataset(xs, ys), header


def parse_csv(path: Union[str, Path]) -> Dataset:
    return load_csv(path)[0]


def load_csv(path: Union[str, Path]) -> tuple[Dataset, list[str]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        return read_dataset(fh)


def parse_csv_text(text: str) -> Dataset:
    return read_dataset(io.StringIO(text))[0]


def default_header(p: int) -> list[str]:
    return [f"x{j}" for j in range(1, p + 1)] + ["y"]


def write_dataset(ds: Dataset, stream: TextIO, header=None) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header or default_header(ds.input_dim))
    for xi, yi in zip(ds.x, ds.y):
        w.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])
