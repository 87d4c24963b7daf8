"""Field snapshot files.

Text format: a header line ``# dim K grid_n reality zero_mode_excluded`` followed by one
line ``k_1 ... k_d re im`` per lattice point in lexicographic k order.
Binary format: magic ``ANDLAB01``, a little-endian header (int32 dim, K, grid_n, uint8
reality, zero_mode_excluded) and the coefficients as little-endian complex128.
"""

import struct
from pathlib import Path
from typing import Literal

import numpy as np

from ..errors import SpecMismatchError
from ..models.torus import TorusSpec
from .lattice import FourierField, wavevectors

SnapshotFormat = Literal["text", "binary"]

BINARY_MAGIC = b"ANDLAB01"
_HEADER = struct.Struct("<iiiBB")


def write_snapshot(path: Path, f: FourierField, fmt: SnapshotFormat = "text") -> Path:
    """Write a field snapshot and return the path written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    spec = f.spec
    if fmt == "binary":
        header = _HEADER.pack(spec.dim, spec.K, spec.grid_n, f.reality, f.zero_mode_excluded)
        payload = f.vector.astype("<c16").tobytes()
        path.write_bytes(BINARY_MAGIC + header + payload)
        return path
    ks = [k.ravel() for k in wavevectors(spec)]
    lines = [
        f"# {spec.dim} {spec.K} {spec.grid_n} {int(f.reality)} {int(f.zero_mode_excluded)}"
    ]
    for i, c in enumerate(f.vector):
        k_text = " ".join(str(int(k[i])) for k in ks)
        lines.append(f"{k_text} {float(c.real)!r} {float(c.imag)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_snapshot(path: Path) -> FourierField:
    """Read a snapshot in either format.

    Raises:
        SpecMismatchError: If the header and the payload disagree
    """
    raw = Path(path).read_bytes()
    if raw.startswith(BINARY_MAGIC):
        offset = len(BINARY_MAGIC)
        dim, K, grid_n, reality, zero = _HEADER.unpack_from(raw, offset)
        spec = TorusSpec(dim=dim, K=K, grid_n=grid_n)
        coeffs = np.frombuffer(raw, dtype="<c16", offset=offset + _HEADER.size)
        if coeffs.size != spec.n_modes:
            raise SpecMismatchError(f"{path}: {coeffs.size} coefficients for {spec.n_modes} modes")
        return FourierField(spec, coeffs.reshape(spec.shape), bool(reality), bool(zero))

    lines = raw.decode("utf-8").splitlines()
    fields = lines[0].lstrip("#").split()
    dim, K, grid_n, reality, zero = (int(v) for v in fields)
    spec = TorusSpec(dim=dim, K=K, grid_n=grid_n)
    body = np.loadtxt(lines[1:], ndmin=2)
    if body.shape != (spec.n_modes, dim + 2):
        raise SpecMismatchError(f"{path}: body of shape {body.shape} for {spec.n_modes} modes")
    expected = np.stack([k.ravel() for k in wavevectors(spec)], axis=1)
    if not np.array_equal(body[:, :dim].astype(np.int64), expected):
        raise SpecMismatchError(f"{path}: coefficients are not in lexicographic k order")
    coeffs = body[:, dim] + 1j * body[:, dim + 1]
    return FourierField(spec, coeffs.reshape(spec.shape), bool(reality), bool(zero))
