"""
State files and CSV output.

A state file is a UTF-8 JSON object::

    {"dim": 2, "dims": [1, 2], "re": [...], "im": [...], "metadata": {...}}

``re`` and ``im`` hold the ``dim * dim`` real and imaginary parts in
row-major order; ``im`` defaults to zeros, ``dims`` and ``metadata`` are
optional.  Files are validated as density matrices at tolerance ``1e-8``
and then Hermitized and renormalized to unit trace.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .linalg import DensityMatrix, hermitize

FILE_TOL = 1e-8
_KEYS = {"dim", "dims", "re", "im", "metadata"}


def _number_list(obj, key, n, path):
    vals = obj[key]
    if not isinstance(vals, list) or len(vals) != n:
        got = len(vals) if isinstance(vals, list) else type(vals).__name__
        raise ParseError(f"{path}: field {key!r} must be a list of {n} numbers, got {got}")
    for i, v in enumerate(vals):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ParseError(f"{path}: field {key!r}[{i}] is not a finite number: {v!r}")
    return np.asarray(vals, dtype=float)


def load_state(path) -> tuple[DensityMatrix, tuple[int, int] | None, dict]:
    """Read a state file; returns ``(rho, dims, metadata)``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    unknown = set(obj) - _KEYS
    if unknown:
        raise ParseError(f"{path}: unknown field(s) {', '.join(sorted(unknown))}")
    if "dim" not in obj or "re" not in obj:
        raise ParseError(f"{path}: fields 'dim' and 're' are required")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError(f"{path}: field 'dim' must be a positive integer, got {dim!r}")
    re = _number_list(obj, "re", dim * dim, path)
    im = _number_list(obj, "im", dim * dim, path) if "im" in obj else np.zeros(dim * dim)
    dims = None
    if "dims" in obj:
        dims = obj["dims"]
        if (
            not isinstance(dims, list)
            or len(dims) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in dims)
        ):
            raise ParseError(f"{path}: field 'dims' must be two positive integers, got {dims!r}")
        if dims[0] * dims[1] != dim:
            raise ParseError(f"{path}: field 'dims' {dims} does not factor dim {dim}")
        dims = (dims[0], dims[1])
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError(f"{path}: field 'metadata' must be an object")
    mat = (re + 1j * im).reshape(dim, dim)
    rho = DensityMatrix(mat, validation_tol=FILE_TOL)
    m = hermitize(rho.mat)
    return DensityMatrix(m / np.trace(m).real), dims, {str(k): str(v) for k, v in metadata.items()}


def parse_state_file(path) -> DensityMatrix:
    return load_state(path)[0]


def state_to_json(rho, dims=None, metadata=None) -> dict:
    m = np.asarray(rho.mat if isinstance(rho, DensityMatrix) else rho)
    obj = {"dim": int(m.shape[0])}
    if dims is not None:
        obj["dims"] = [int(dims[0]), int(dims[1])]
    obj["re"] = [float(x) for x in m.real.ravel()]
    obj["im"] = [float(x) for x in m.imag.ravel()]
    if metadata:
        obj["metadata"] = {str(k): str(v) for k, v in metadata.items()}
    return obj


def write_state_file(path, rho, dims=None, metadata=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(state_to_json(rho, dims, metadata), fh, indent=1)
        fh.write("\n")


def fmt_float(x) -> str:
    """17 significant digits, so the text re-parses to the same double."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_csv(path_or_file, header, rows) -> None:
    """Comma-separated, LF line endings, header row first."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if own:
            fh.close()


__all__ = [
    "FILE_TOL",
    "ValidationError",
    "fmt_float",
    "load_state",
    "parse_state_file",
    "state_to_json",
    "write_csv",
    "write_state_file",
]
