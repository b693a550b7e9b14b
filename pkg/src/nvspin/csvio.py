"""CSV emission and parsing.

All files are UTF-8 with LF line endings, a single header line naming the
columns, and '.' as the decimal separator. Floats are written with repr so
they parse back losslessly.
"""

import numpy as np


def write_columns(path, header, columns) -> None:
    """Write named columns of equal length as CSV."""
    cols = [np.asarray(c) for c in columns]
    if len(header) != len(cols):
        raise ValueError("header and column counts differ")
    n = cols[0].shape[0]
    if any(c.shape != (n,) for c in cols):
        raise ValueError("columns must share one length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(_format(c[i]) for c in cols))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _format(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def read_columns(path, expected_header=None):
    """Read a CSV written by write_columns; returns (header, list of arrays).

    When expected_header is given, the file's header must match it exactly.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path} is empty")
    header = lines[0].split(",")
    if expected_header is not None and header != list(expected_header):
        raise ValueError(
            f"{path}: expected header {','.join(expected_header)!r}, got {lines[0]!r}"
        )
    rows = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != len(header) for r in rows):
        raise ValueError(f"{path}: ragged rows")
    columns = [np.array([float(r[j]) for r in rows]) for j in range(len(header))]
    return header, columns
