"""File formats: GRDF grid files, sphere-density JSON, and CSV tables."""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .multiplier import GridFunction
from .sphere import HarmonicCoeffs, PointMasses, SphereDensity, uniform_density

GRDF_MAGIC = b"GRDF"
GRDF_VERSION = 1
_HEADER = struct.Struct("<4sIBQd")


class FormatError(DomainError):
    pass


def write_grdf(path, u: GridFunction) -> None:
    """Header ``magic, u32 version, u8 d, u64 n, f64 box`` then complex128 LE samples, row-major."""
    header = _HEADER.pack(GRDF_MAGIC, GRDF_VERSION, u.d, u.n, float(u.box))
    body = np.ascontiguousarray(u.values, dtype="<c16").tobytes()
    Path(path).write_bytes(header + body)


def read_grdf(path) -> GridFunction:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError("truncated GRDF header")
    magic, version, d, n, box = _HEADER.unpack_from(raw)
    if magic != GRDF_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != GRDF_VERSION:
        raise FormatError(f"unsupported GRDF version {version}")
    expected = _HEADER.size + 16 * n**d
    if len(raw) != expected:
        raise FormatError(f"GRDF body has {len(raw) - _HEADER.size} bytes, expected {expected - _HEADER.size}")
    vals = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).reshape((n,) * d)
    return GridFunction(d, n, box, vals.astype(complex))


def sample_grid(values_fn, d: int, n: int, box: float) -> GridFunction:
    g = GridFunction(d, n, box, np.zeros((n,) * d))
    return g.with_values(values_fn(g.coordinates()))


def sample_test_function(phi, n: int, box: float = 2.0 * np.pi) -> GridFunction:
    """Frequency-side grid holding ``phi_hat`` at the DFT lattice of the box."""
    g = GridFunction(phi.d, n, box, np.zeros((n,) * phi.d), space="frequency")
    return g.with_values(phi(g.frequencies()))


# ---------------------------------------------------------------------------
# density JSON


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise FormatError("complex values are [re, im] pairs")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise FormatError(f"not a number: {v!r}")


def density_from_dict(obj: dict) -> SphereDensity:
    """Parse ``{"d", "kind": point|smooth|harmonic, "nodes", "coeffs"}``.

    ``point``: ``nodes`` is a list of unit vectors, ``coeffs`` the masses.
    ``smooth``: a single coefficient, the constant density value.
    ``harmonic``: ``coeffs`` in the ordering of :class:`HarmonicCoeffs`.
    Complex numbers may be written as ``[re, im]``.
    """
    if not isinstance(obj, dict):
        raise FormatError("density must be a JSON object")
    try:
        d = int(obj["d"])
        kind = obj["kind"]
        coeffs = [_complex(c) for c in obj.get("coeffs", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad density record: {exc}") from exc
    if kind == "point":
        nodes = obj.get("nodes")
        if not isinstance(nodes, list) or len(nodes) != len(coeffs) or not nodes:
            raise FormatError("point densities need matching non-empty nodes and coeffs")
        try:
            nodes = np.array(nodes, dtype=float)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad nodes: {exc}") from exc
        if nodes.ndim != 2:
            raise FormatError("nodes must be a list of vectors")
        nodes = nodes / np.linalg.norm(nodes, axis=1, keepdims=True)
        return PointMasses(d, nodes, np.array(coeffs))
    if kind == "smooth":
        if len(coeffs) != 1:
            raise FormatError("smooth densities in JSON carry one constant coefficient")
        return uniform_density(d, coeffs[0])
    if kind == "harmonic":
        return HarmonicCoeffs(d, np.array(coeffs))
    raise FormatError(f"unknown density kind {kind!r}")


def read_density(path) -> SphereDensity:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc
    return density_from_dict(obj)


def density_to_dict(density: SphereDensity) -> dict:
    def enc(c):
        c = complex(c)
        return c.real if c.imag == 0 else [c.real, c.imag]

    if isinstance(density, PointMasses):
        return {"d": density.d, "kind": "point", "nodes": density.nodes.tolist(), "coeffs": [enc(c) for c in density.coeffs]}
    if isinstance(density, HarmonicCoeffs):
        return {"d": density.d, "kind": "harmonic", "nodes": [], "coeffs": [enc(c) for c in density.coeffs]}
    raise FormatError("only point and harmonic densities serialise losslessly")


# ---------------------------------------------------------------------------
# CSV


def format_float(x) -> str:
    if x is None:
        return "nan"
    return repr(float(x))


def write_csv_stream(fh, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else format_float(v) for v in row])


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        write_csv_stream(fh, header, rows)
