"""Self-describing result tables and their CSV form."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from . import __version__

FLOAT_FORMAT = "{:.12g}"


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return FLOAT_FORMAT.format(value)
    return str(value)


@dataclass
class SweepResult:
    """Rows of one grid experiment.

    Every row carries all swept and fixed parameters.  ``axes`` maps axis
    names to their grids, ``provenance`` holds what is needed to rerun the
    experiment and ``summary`` any derived scalars (extremum positions etc.).
    """

    kind: str
    columns: tuple
    rows: list = field(default_factory=list)
    axes: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def column(self, name, where=None):
        """Values of one column; ``where`` is a record predicate or a dict of required values."""
        i = self.columns.index(name)
        if where is None:
            return [r[i] for r in self.rows]
        if isinstance(where, dict):
            wanted = where
            where = lambda rec: all(rec[k] == v for k, v in wanted.items())  # noqa: E731
        return [r[i] for r in self.rows if where(dict(zip(self.columns, r)))]

    def records(self):
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# kind: {self.kind}\n")
        buf.write(f"# version: {__version__}\n")
        for key, value in self.provenance.items():
            buf.write(f"# {key}: {format_value(value)}\n")
        for key, value in self.summary.items():
            buf.write(f"# summary.{key}: {format_value(value)}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(format_value(v) for v in row) + "\n")
        return buf.getvalue()


def read_csv_rows(text: str):
    """Parse a CSV written by :meth:`SweepResult.to_csv` into (comments, header, rows)."""
    comments, header, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            comments[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return comments, header, rows
