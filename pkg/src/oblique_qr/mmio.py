"""Matrix Market reader and writer for dense complex matrices.

The writer always emits the ``array`` format in column-major order, with
every float printed by ``repr`` (shortest round-trip decimal), so a
written matrix reads back bit-identically. The reader also accepts the
``coordinate`` format and the ``symmetric``/``hermitian``/
``skew-symmetric`` qualifiers.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import MatrixMarketError

__all__ = ["read_matrix", "write_matrix", "read_operator"]

_FIELDS = ("real", "complex", "integer", "double")
_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


def _parse_value(tokens, field, lineno, path):
    try:
        if field == "complex":
            if len(tokens) != 2:
                raise ValueError
            return complex(float(tokens[0]), float(tokens[1]))
        if len(tokens) != 1:
            raise ValueError
        return complex(float(tokens[0]), 0.0)
    except ValueError:
        raise MatrixMarketError(f"cannot parse {field} value {' '.join(tokens)!r}", lineno, path) from None


def _mirror(a, i, j, value, symmetry):
    if i == j:
        return
    if symmetry == "symmetric":
        a[j, i] = value
    elif symmetry == "hermitian":
        a[j, i] = value.conjugate()
    elif symmetry == "skew-symmetric":
        a[j, i] = -value


def read_matrix(path) -> np.ndarray:
    """Read a Matrix Market file into a complex128 ndarray.

    Raises
    ------
    MatrixMarketError
        On any syntax or consistency problem; the message names the
        offending line.
    """
    path = os.fspath(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 0, path)

    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise MatrixMarketError("expected '%%MatrixMarket matrix <format> <field> <symmetry>' header", 1, path)
    fmt, field, symmetry = (h.lower() for h in header[2:])
    if fmt not in ("array", "coordinate"):
        raise MatrixMarketError(f"unsupported format {fmt!r}", 1, path)
    if field not in _FIELDS:
        raise MatrixMarketError(f"unsupported field {field!r}", 1, path)
    if field == "double":
        field = "real"
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", 1, path)

    body = [(no, ln.split()) for no, ln in enumerate(lines[1:], start=2) if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixMarketError("missing size line", len(lines), path)
    size_no, size_tok = body[0]
    try:
        dims = [int(t) for t in size_tok]
    except ValueError:
        raise MatrixMarketError(f"bad size line {' '.join(size_tok)!r}", size_no, path) from None
    entries = body[1:]

    if fmt == "array":
        if len(dims) != 2 or min(dims) < 0:
            raise MatrixMarketError("array size line must be 'rows cols'", size_no, path)
        rows, cols = dims
        if symmetry != "general" and rows != cols:
            raise MatrixMarketError(f"{symmetry} matrix must be square", size_no, path)
        a = np.zeros((rows, cols), dtype=np.complex128)
        if symmetry == "general":
            slots = [(i, j) for j in range(cols) for i in range(rows)]
        elif symmetry == "skew-symmetric":
            slots = [(i, j) for j in range(cols) for i in range(j + 1, rows)]
        else:
            slots = [(i, j) for j in range(cols) for i in range(j, rows)]
        if len(entries) != len(slots):
            lineno = entries[len(slots)][0] if len(entries) > len(slots) else len(lines)
            raise MatrixMarketError(f"expected {len(slots)} values, found {len(entries)}", lineno, path)
        for (i, j), (no, tok) in zip(slots, entries):
            v = _parse_value(tok, field, no, path)
            a[i, j] = v
            _mirror(a, i, j, v, symmetry)
    else:
        if len(dims) != 3 or min(dims) < 0:
            raise MatrixMarketError("coordinate size line must be 'rows cols nnz'", size_no, path)
        rows, cols, nnz = dims
        if len(entries) != nnz:
            lineno = entries[nnz][0] if len(entries) > nnz else len(lines)
            raise MatrixMarketError(f"expected {nnz} entries, found {len(entries)}", lineno, path)
        a = np.zeros((rows, cols), dtype=np.complex128)
        for no, tok in entries:
            if len(tok) < 3:
                raise MatrixMarketError("coordinate entry needs 'i j value'", no, path)
            try:
                i, j = int(tok[0]) - 1, int(tok[1]) - 1
            except ValueError:
                raise MatrixMarketError(f"bad index in {' '.join(tok)!r}", no, path) from None
            if not (0 <= i < rows and 0 <= j < cols):
                raise MatrixMarketError(f"index ({i + 1}, {j + 1}) out of range", no, path)
            v = _parse_value(tok[2:], field, no, path)
            a[i, j] += v
            _mirror(a, i, j, v, symmetry)

    if not np.all(np.isfinite(a)):
        raise MatrixMarketError("matrix contains non-finite values", 0, path)
    return a


def read_operator(path):
    """Read an explicit B operator (symmetrized on load)."""
    from .core import BOperator

    a = read_matrix(path)
    if a.shape[0] != a.shape[1]:
        raise MatrixMarketError(f"B must be square, got {a.shape[0]}x{a.shape[1]}", 0, os.fspath(path))
    return BOperator.explicit(a)


def write_matrix(path, a, field=None) -> None:
    """Write ``a`` in Matrix Market array format.

    ``field`` defaults to ``"complex"`` for complex input and ``"real"``
    otherwise.
    """
    a = np.asarray(a)
    if a.ndim == 1:
        a = a[:, None]
    if field is None:
        field = "complex" if np.iscomplexobj(a) else "real"
    if field not in ("real", "complex"):
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
    rows, cols = a.shape
    out = [f"%%MatrixMarket matrix array {field} general", f"{rows} {cols}"]
    flat = a.reshape(-1, order="F")
    if field == "complex":
        flat = flat.astype(np.complex128)
        out.extend(f"{v.real!r} {v.imag!r}" for v in flat.tolist())
    else:
        if np.iscomplexobj(flat):
            if np.any(flat.imag != 0):
                raise ValueError("matrix has nonzero imaginary parts; use field='complex'")
            flat = flat.real
        out.extend(repr(float(v)) for v in flat.tolist())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
