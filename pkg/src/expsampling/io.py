"""CSV and key = value output with 12 significant digits."""

from __future__ import annotations

import csv
import io
import math

import numpy as np


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def rows_to_csv(rows, columns=None):
    """Render dict rows as CSV text with a header line."""
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c, "")) for c in columns])
    return buf.getvalue()


def read_csv(text):
    """Parse CSV text produced by :func:`rows_to_csv` back into dict rows of strings."""
    return list(csv.DictReader(io.StringIO(text)))
