"""CSV/JSON file formats and atomic output.

Point files have a header ``x1,...,xd`` with an optional final ``f``
column of sample values. Grid sample files start with a header ``n=<rows>,m=<cols>``
followed by ``n`` rows of ``m`` values. Floats are written as shortest
round-trip decimals (``repr``), so re-parsing reproduces them bit for bit.
"""

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from .linalg import find_duplicates

__all__ = [
    "ParseError",
    "format_float",
    "read_point_file",
    "write_point_file",
    "read_grid_samples",
    "write_grid_samples",
    "matrix_to_csv",
    "read_matrix_csv",
    "write_outputs",
]


class ParseError(ValueError):
    """An input file is malformed."""


def format_float(x):
    return repr(float(x))


def _parse_float(text, path, line):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{path}:{line}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{path}:{line}: non-finite value {text!r}")
    return value


def _read_rows(path):
    try:
        with open(path, newline="") as fh:
            return [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def read_point_file(path, require_f=None):
    """Read a point file.

    Parameters
    ----------
    path : str
    require_f : bool or None
        ``True`` demands an ``f`` column, ``False`` forbids it, ``None`` accepts either.

    Returns
    -------
    coords : ndarray, shape (n, d)
    f : ndarray of shape (n,) or None
    """
    rows = _read_rows(path)
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    has_f = header[-1] == "f"
    d = len(header) - has_f
    if d < 1 or header[:d] != [f"x{i}" for i in range(1, d + 1)]:
        raise ParseError(f"{path}:1: header must be x1,...,xd[,f], got {','.join(header)}")
    if require_f is True and not has_f:
        raise ParseError(f"{path}: an 'f' column with sample values is required")
    if require_f is False and has_f:
        raise ParseError(f"{path}: unexpected 'f' column")
    if len(rows) < 2:
        raise ParseError(f"{path}: no data rows")
    values = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}:{line}: expected {len(header)} columns, got {len(row)}")
        values.append([_parse_float(cell.strip(), path, line) for cell in row])
    data = np.array(values, dtype=np.float64)
    coords = data[:, :d]
    dups = find_duplicates(coords)
    if dups:
        i, j = dups[0]
        raise ParseError(f"{path}: duplicate points on rows {i + 2} and {j + 2}")
    return coords, (data[:, d] if has_f else None)


def write_point_file(coords, f=None):
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"x{i}" for i in range(1, coords.shape[1] + 1)]
    writer.writerow(header + (["f"] if f is not None else []))
    for i, row in enumerate(coords):
        cells = [format_float(v) for v in row]
        if f is not None:
            cells.append(format_float(f[i]))
        writer.writerow(cells)
    return buf.getvalue()


def read_grid_samples(path):
    """Read an ``n x m`` sample matrix with header ``n=<n>,m=<m>``."""
    rows = _read_rows(path)
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip().replace(" ", "") for h in rows[0]]
    try:
        if len(header) != 2 or not header[0].startswith("n=") or not header[1].startswith("m="):
            raise ValueError
        n, m = int(header[0][2:]), int(header[1][2:])
    except ValueError:
        raise ParseError(f"{path}:1: header must be 'n=<rows>,m=<cols>'") from None
    if len(rows) - 1 != n:
        raise ParseError(f"{path}: header announces {n} rows, found {len(rows) - 1}")
    F = np.empty((n, m))
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != m:
            raise ParseError(f"{path}:{line}: expected {m} columns, got {len(row)}")
        F[line - 2] = [_parse_float(c.strip(), path, line) for c in row]
    return F


def write_grid_samples(F):
    F = np.asarray(F, dtype=np.float64)
    lines = [f"n={F.shape[0]},m={F.shape[1]}"]
    lines += [",".join(format_float(v) for v in row) for row in F]
    return "\n".join(lines) + "\n"


def matrix_to_csv(A):
    """Full row-major storage, no header."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    return "".join(",".join(format_float(v) for v in row) + "\n" for row in A)


def read_matrix_csv(path):
    rows = _read_rows(path)
    return np.array([[_parse_float(c, path, i + 1) for c in row] for i, row in enumerate(rows)])


def to_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_outputs(out_dir, files):
    """Write ``{name: text}`` into ``out_dir`` atomically, all or nothing.

    Every file is first written to a temporary file in ``out_dir``; only when
    all have been written are they renamed into place.
    """
    os.makedirs(out_dir, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
            staged.append((tmp, os.path.join(out_dir, name)))
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
