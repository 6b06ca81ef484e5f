"""CSV point tables, mask files and report emission."""

import csv
import json
import math
import os

import numpy as np


class ParseError(ValueError):
    """Malformed point table; ``row`` and ``col`` are 1-based when known."""

    def __init__(self, message, row=None, col=None):
        self.row, self.col = row, col
        where = ""
        if row is not None:
            where = f"row {row}" + (f" col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


def fmt(x):
    """Float with 17 significant digits, enough to round-trip exactly."""
    return format(float(x), ".17g")


def _parse_cell(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("non-finite")
    return value


def _is_header(cells):
    # a header has no numeric cell at all; a partly numeric row is malformed data
    for c in cells:
        try:
            float(c.strip())
        except ValueError:
            continue
        return False
    return True


def ingest_csv(path):
    """Read a comma-separated point table into an ``(n, d)`` array.

    A first row in which no cell parses as a number is taken as a header. Rows
    are kept in file order; blank lines are skipped.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("file contains no data rows")
    if _is_header(rows[0][1]):
        rows = rows[1:]
        if not rows:
            raise ParseError("file has a header but no data rows")
    dim = len(rows[0][1])
    out = np.empty((len(rows), dim))
    for r, (lineno, cells) in enumerate(rows):
        if len(cells) != dim:
            raise ParseError(f"expected {dim} columns, found {len(cells)}", lineno)
        for c, cell in enumerate(cells):
            try:
                out[r, c] = _parse_cell(cell.strip())
            except ValueError:
                raise ParseError(f"cannot parse {cell!r} as a finite number", lineno, c + 1) from None
    return out


def write_points_csv(path, points, header=True):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"coord_{j + 1}" for j in range(points.shape[1])])
        for row in points:
            w.writerow([fmt(v) for v in row])


def write_mask_csv(path, nodes, mask):
    """Write ``coord_1,...,coord_d,member`` rows, one per grid node."""
    nodes = np.asarray(nodes)
    mask = np.asarray(mask, dtype=bool)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"coord_{j + 1}" for j in range(nodes.shape[1])] + ["member"])
        for node, m in zip(nodes, mask):
            w.writerow([fmt(v) for v in node] + [int(m)])


def write_balls_csv(path, centers, radii):
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim == 1:
        centers = centers.reshape(len(radii), -1)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"center_{j + 1}" for j in range(centers.shape[1])] + ["radius"])
        for c, r in zip(centers, radii):
            w.writerow([fmt(v) for v in c] + [fmt(r)])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def report_json(report):
    return json.dumps(_jsonable(report), indent=2, sort_keys=False)


def write_report(out_dir, report, stem="report"):
    """Write ``<stem>.json`` and the flat ``<stem>_series.csv``; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    text = report_json(report)
    series = report.get("series", [])
    json_path = os.path.join(out_dir, f"{stem}.json")
    csv_path = os.path.join(out_dir, f"{stem}_series.csv")
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["experiment", "alpha", "n", "metric", "value", "se", "trials"])
        for row in series:
            w.writerow([
                report["experiment"],
                "" if row["alpha"] is None else fmt(row["alpha"]),
                row["n"],
                row["metric"],
                "" if row["value"] is None else fmt(row["value"]),
                "" if row["se"] is None else fmt(row["se"]),
                "" if row["trials"] is None else row["trials"],
            ])
    return json_path, csv_path
