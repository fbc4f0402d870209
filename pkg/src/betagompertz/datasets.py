"""Reading lifetime data files and the bundled Aarset sample."""

from __future__ import annotations

import csv
import io
from importlib.resources import files

import numpy as np

from .errors import DomainError


def parse_values(text):
    """Positive reals from text: one value per line, ``#`` comments and blank
    lines ignored. A single-column CSV with a non-numeric header row is also
    accepted."""
    values = []
    header_seen = False
    rows = csv.reader(io.StringIO(text))
    for lineno, row in enumerate(rows, 1):
        cells = [c.strip() for c in row]
        if not cells or not cells[0] or cells[0].startswith("#"):
            continue
        if len([c for c in cells if c]) != 1:
            raise DomainError(f"line {lineno}: expected a single column, got {len(cells)}")
        try:
            v = float(cells[0])
        except ValueError:
            if values or header_seen:
                raise DomainError(f"line {lineno}: not a number: {cells[0]!r}") from None
            header_seen = True
            continue
        if not np.isfinite(v) or v <= 0:
            raise DomainError(f"line {lineno}: lifetimes must be positive, got {cells[0]}")
        values.append(v)
    if not values:
        raise DomainError("no data values found")
    return np.array(values)


def read_values(path):
    """Parse a data file; ``OSError`` propagates for unreadable paths."""
    with open(path, encoding="utf-8") as fh:
        return parse_values(fh.read())


def aarset():
    """The 50 Aarset (1987) device failure times, in test order."""
    return parse_values(files("betagompertz").joinpath("data/aarset.txt").read_text())
