"""Deterministic CSV and JSON writers.

Floats are written with 17 significant digits, which round-trips every
64-bit value, so two runs of the same configuration give identical bytes.
"""

import csv
import json
import math
import numbers

import numpy as np

from ..lyapunov import SeparationSeries

__all__ = ["emit_series", "emit_table", "format_value", "write_summary"]


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def emit_table(path, columns, rows):
    """Write ``rows`` (an iterable of sequences) under a header of ``columns``."""
    columns = list(columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
            w.writerow([format_value(v) for v in row])
    return path


def emit_series(series, path, extra=None):
    """Write a separation series as ``t,delta,...,ln_delta`` CSV.

    ``extra`` maps further column names to arrays of the same length; they
    go between ``delta`` and ``ln_delta`` in insertion order. A plain
    mapping of column name to array is accepted in place of a series.
    """
    if isinstance(series, SeparationSeries):
        cols = {"t": series.times, "delta": series.deltas}
        cols.update(extra or {})
        cols["ln_delta"] = series.log_deltas
    else:
        cols = dict(series)
        cols.update(extra or {})
    n = {len(v) for v in cols.values()}
    if len(n) != 1:
        raise ValueError("all columns must have the same length")
    arrays = [np.asarray(v).tolist() for v in cols.values()]
    return emit_table(path, cols.keys(), zip(*arrays))


def write_summary(path, summary):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=False, allow_nan=True)
        fh.write("\n")
    return path
