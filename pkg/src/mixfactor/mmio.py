"""Matrix Market array-format I/O (dense real general only).

Values are written in column-major order with 17 significant digits, which
round-trips every float64 exactly.
"""

import numpy as np

_BANNER_FIELDS = ("matrix", "array", "real", "general")


class FormatError(Exception):
    """The file is not a dense real general Matrix Market array file."""


def write_matrix(path_or_stream, a, comments=()):
    """Write a matrix (or a vector, stored as one column).

    Accepts a filesystem path or any object with a ``write`` method.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"expected a vector or matrix, got ndim={a.ndim}")
    if hasattr(path_or_stream, "write"):
        _write_body(path_or_stream, a, comments)
    else:
        with open(path_or_stream, "w") as fh:
            _write_body(fh, a, comments)


def _write_body(fh, a, comments):
    m, n = a.shape
    fh.write("%%MatrixMarket matrix array real general\n")
    for line in comments:
        fh.write(f"%{line}\n")
    fh.write(f"{m} {n}\n")
    for value in a.ravel(order="F"):
        fh.write(f"{value:.17g}\n")


def read_matrix(path):
    """Read a dense real general Matrix Market array file."""
    with open(path) as fh:
        banner = fh.readline()
        if not banner.startswith("%%MatrixMarket"):
            raise FormatError(f"{path}: missing MatrixMarket banner")
        fields = tuple(tok.lower() for tok in banner.split()[1:])
        if fields != _BANNER_FIELDS:
            raise FormatError(f"{path}: unsupported format {' '.join(fields)!r}, need 'matrix array real general'")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        try:
            m, n = (int(tok) for tok in line.split())
        except ValueError as exc:
            raise FormatError(f"{path}: malformed size line {line.strip()!r}") from exc
        if m < 1 or n < 1:
            raise FormatError(f"{path}: dimensions must be positive, got {m} x {n}")
        try:
            values = np.fromiter((float(tok) for tok in fh.read().split()), dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"{path}: non-numeric matrix entry") from exc
    if values.size != m * n:
        raise FormatError(f"{path}: expected {m * n} entries, found {values.size}")
    return values.reshape((m, n), order="F")
