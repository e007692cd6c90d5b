"""Text serialization of grid functions, norm configurations and reports.

Function files are plain text::

    # hardygauge function file
    grid_size 8
    kind samples
    0 1.0000000000000000e+00 0.0000000000000000e+00
    ...

Values are written with 17 significant digits in lowercase scientific
notation, so writing a parsed canonical file reproduces it byte for byte.
For ``kind spectrum`` the rows hold ``c_k`` for ``k = -n/2+1 .. n/2``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import HardyGaugeError
from .norms import GaugeNorm, norm_from_config
from .spectral import CircleFunction, Grid, fourier_coefficients

HEADER = "# hardygauge function file"
KINDS = ("samples", "spectrum")


class FormatError(HardyGaugeError, ValueError):
    """A function file or configuration does not parse."""


def format_float(x: float) -> str:
    return f"{x:.16e}"


def format_function(f: CircleFunction, kind: str = "samples") -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if kind == "samples":
        index, values = np.arange(f.n), f.samples
    else:
        index, values = fourier_coefficients(f)
    lines = [HEADER, f"grid_size {f.n}", f"kind {kind}"]
    lines += [f"{k} {format_float(v.real)} {format_float(v.imag)}" for k, v in zip(index, values)]
    return "\n".join(lines) + "\n"


def parse_function(text: str) -> CircleFunction:
    """Parse the text of a function file.

    Raises
    ------
    FormatError
        On a malformed header, a non-power-of-two size or a wrong row set.
    """
    header = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] in ("grid_size", "kind"):
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: malformed header entry")
            header[parts[0]] = parts[1]
            continue
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'index re im'")
        try:
            rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    try:
        n = int(header["grid_size"])
        kind = header["kind"]
    except (KeyError, ValueError) as exc:
        raise FormatError("missing or invalid grid_size/kind header") from exc
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}")
    try:
        grid = Grid(n)
    except HardyGaugeError as exc:
        raise FormatError(str(exc)) from exc
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, found {len(rows)}")
    index = np.array([r[0] for r in rows])
    values = np.array([complex(r[1], r[2]) for r in rows])
    if kind == "samples":
        expected = np.arange(n)
    else:
        expected = np.arange(-n // 2 + 1, n // 2 + 1)
    if not np.array_equal(np.sort(index), expected):
        raise FormatError(f"row indices do not cover the {kind} index range")
    if kind == "samples":
        out = np.empty(n, dtype=complex)
        out[index] = values
        return CircleFunction(grid, out)
    coeffs = np.empty(n, dtype=complex)
    coeffs[index % n] = values
    return CircleFunction.from_spectrum(grid, coeffs)


def read_function(path) -> CircleFunction:
    return parse_function(Path(path).read_text())


def write_function(path, f: CircleFunction, kind: str = "samples") -> None:
    Path(path).write_text(format_function(f, kind))


def read_norm_config(path) -> dict:
    """Load a JSON norm configuration such as ``{"variant": "lp", "p": 2}``."""
    try:
        cfg = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"norm config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or "variant" not in cfg:
        raise FormatError("norm config must be an object with a 'variant' key")
    return cfg


def load_norm(path) -> GaugeNorm:
    cfg = read_norm_config(path)
    try:
        return norm_from_config(cfg)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"norm config is missing a parameter: {exc}") from exc


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return [_jsonable(x.real), _jsonable(x.imag)]
    return x


def format_report(report: dict) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, non-finite floats as strings."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def write_report(path, report: dict) -> None:
    Path(path).write_text(format_report(report))
