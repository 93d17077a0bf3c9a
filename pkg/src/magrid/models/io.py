"""Little-endian binary container for model persistence.

Layout: magic ``GWML``, format version as u16, then a u32 item count.
For network weights each item is one affine layer, stored as two
row-major float64 matrices (weights ``(in, out)``, then bias ``(1, out)``),
each prefixed by u32 rows and u32 cols. For tabular values each item is
one record: u32 key length, key bytes, then a ``(1, n)`` value matrix;
records are sorted by key bytes so files are canonical.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO, Sequence

import numpy as np

from ..errors import ModelIOError

MAGIC = b"GWML"
VERSION = 1

_HEADER = struct.Struct("<4sHI")
_DIMS = struct.Struct("<II")
_KEYLEN = struct.Struct("<I")


def _write_matrix(fh: BinaryIO, m: np.ndarray) -> None:
    m = np.ascontiguousarray(m, dtype="<f8")
    if m.ndim == 1:
        m = m.reshape(1, -1)
    fh.write(_DIMS.pack(m.shape[0], m.shape[1]))
    fh.write(m.tobytes())


def _read_exact(fh: BinaryIO, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ModelIOError(f"truncated file while reading {what}")
    return data


def _read_matrix(fh: BinaryIO) -> np.ndarray:
    rows, cols = _DIMS.unpack(_read_exact(fh, _DIMS.size, "matrix dims"))
    data = _read_exact(fh, rows * cols * 8, "matrix data")
    return np.frombuffer(data, dtype="<f8").reshape(rows, cols).copy()


def _open_container(fh: BinaryIO) -> int:
    magic, version, count = _HEADER.unpack(_read_exact(fh, _HEADER.size, "header"))
    if magic != MAGIC:
        raise ModelIOError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ModelIOError(f"unsupported container version {version}")
    return count


def write_layers(path, layers: Sequence[tuple[np.ndarray, np.ndarray]]) -> None:
    """Write (weights, bias) pairs, one per affine layer."""
    with open(Path(path), "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(layers)))
        for w, b in layers:
            _write_matrix(fh, w)
            _write_matrix(fh, b)


def read_layers(path) -> list[tuple[np.ndarray, np.ndarray]]:
    with open(Path(path), "rb") as fh:
        count = _open_container(fh)
        layers = []
        for _ in range(count):
            w = _read_matrix(fh)
            b = _read_matrix(fh)
            layers.append((w, b.reshape(-1)))
        return layers


def write_records(path, records: dict[bytes, np.ndarray]) -> None:
    """Write key/value records sorted by key bytes."""
    with open(Path(path), "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(records)))
        for key in sorted(records):
            fh.write(_KEYLEN.pack(len(key)))
            fh.write(key)
            _write_matrix(fh, records[key])


def read_records(path) -> dict[bytes, np.ndarray]:
    with open(Path(path), "rb") as fh:
        count = _open_container(fh)
        records: dict[bytes, np.ndarray] = {}
        for _ in range(count):
            (klen,) = _KEYLEN.unpack(_read_exact(fh, _KEYLEN.size, "key length"))
            key = _read_exact(fh, klen, "key")
            records[key] = _read_matrix(fh).reshape(-1)
        return records
