"""JSON and CSV serialisation.

Operators are stored as ``{"dim": N, "entries": [[[re, im], ...], ...]}`` with
rows in order; a flat row-major list of N*N pairs is accepted on input.
Every float is written with 17 significant digits so that reports diff
cleanly and round-trip exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import GridMismatch
from .phase import PhaseGrid


class ParseError(ValueError):
    pass


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite number cannot be written to JSON")
    if x == 0:
        return "0.0"
    text = "%.17g" % x
    return text if any(c in text for c in ".en") else text + ".0"


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        # short numeric lists (e.g. [re, im] pairs) stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("only square matrices are serialised")
    return {
        "dim": A.shape[0],
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        raw = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    if raw.shape == (dim, dim, 2):
        pairs = raw
    elif raw.shape == (dim * dim, 2):
        pairs = raw.reshape(dim, dim, 2)
    else:
        raise ParseError(f"entries of shape {raw.shape} do not match dim {dim}")
    return pairs[..., 0] + 1j * pairs[..., 1]


def write_matrix(A, path, **extra) -> None:
    obj = matrix_to_json(A)
    obj.update(extra)
    write_json(obj, path)


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(read_json(path))


def write_field_csv(values, grid: PhaseGrid, path) -> None:
    """CSV with header ``q,p,re,im``, one row per node, q-major."""
    values = np.asarray(values, dtype=complex)
    if values.shape != grid.shape:
        raise GridMismatch(f"field of shape {values.shape} on grid {grid.shape}")
    q, p = grid.nodes()
    table = np.column_stack([q.ravel(), p.ravel(), values.real.ravel(), values.imag.ravel()])
    with open(path, "w") as fh:
        fh.write("q,p,re,im\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")


def read_field_csv(path) -> tuple[np.ndarray, PhaseGrid]:
    """Inverse of :func:`write_field_csv`; the grid is inferred from the nodes."""
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "")
        if header != "q,p,re,im":
            raise ParseError(f"{path}: expected header 'q,p,re,im', got {header!r}")
        try:
            table = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    if table.shape[1] != 4:
        raise ParseError(f"{path}: expected 4 columns")
    m = int(round(math.sqrt(table.shape[0])))
    if m * m != table.shape[0] or m < 2:
        raise ParseError(f"{path}: {table.shape[0]} rows is not a square grid")
    grid = PhaseGrid(float(table[-1, 0]), m)
    q, p = grid.nodes()
    if not (np.allclose(table[:, 0], q.ravel(), atol=1e-12) and np.allclose(table[:, 1], p.ravel(), atol=1e-12)):
        raise ParseError(f"{path}: nodes do not form a uniform symmetric grid")
    return (table[:, 2] + 1j * table[:, 3]).reshape(grid.shape), grid


def write_finite_csv(values, modulus: int, path) -> None:
    """Finite-regime field in the same CSV layout, with integer q, p in Z_d."""
    values = np.asarray(values, dtype=complex)
    if values.shape != (modulus, modulus):
        raise GridMismatch(f"field of shape {values.shape} for modulus {modulus}")
    with open(path, "w") as fh:
        fh.write("q,p,re,im\n")
        for q in range(modulus):
            for p in range(modulus):
                z = values[q, p]
                fh.write(f"{q},{p},{z.real:.17g},{z.imag:.17g}\n")


def read_finite_csv(path, modulus: int) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "")
        if header != "q,p,re,im":
            raise ParseError(f"{path}: expected header 'q,p,re,im', got {header!r}")
        try:
            table = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    if table.shape != (modulus * modulus, 4):
        raise GridMismatch(f"{path}: expected {modulus * modulus} rows of q,p,re,im")
    idx = table[:, :2].astype(int)
    if np.any(idx != table[:, :2]) or np.any(idx < 0) or np.any(idx >= modulus):
        raise ParseError(f"{path}: coordinates must be integers in [0, {modulus})")
    out = np.full((modulus, modulus), np.nan, dtype=complex)
    out[idx[:, 0], idx[:, 1]] = table[:, 2] + 1j * table[:, 3]
    if np.isnan(out).any():
        raise ParseError(f"{path}: missing points")
    return out
