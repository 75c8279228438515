"""Snapshot serialisation (binary and CSV) with atomic writes.

Binary layout, all little-endian::

    offset  size  field
    0       4     magic b"PGRN"
    4       1     version (uint8) = 1
    5       4     n_points (uint32)
    9       4     components (uint32)
    13      8     spacing (float64)
    21      8     time (float64)
    29      8*n*m values (float64), point-major

CSV layout: one metadata comment line, a header, then one row per point::

    # fracsplit-snapshot v1 n_points=<n> length=<L> components=<m> time=<t>
    x,u0[,u1,...]
    <x_0>,<u_0,0>,...

Floats are written with 17 significant digits so they read back exactly.
"""
from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .grid import Field, GridSpec

__all__ = ["MAGIC", "VERSION", "atomic_write", "encode_binary", "decode_binary",
           "write_binary", "read_binary", "write_csv", "read_csv", "fmt"]

MAGIC = b"PGRN"
VERSION = 1
_HEADER = struct.Struct("<4sBIIdd")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path, data: bytes | str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def encode_binary(u: Field) -> bytes:
    n, m = u.grid.shape
    head = _HEADER.pack(MAGIC, VERSION, n, m, u.grid.spacing, u.time)
    return head + np.ascontiguousarray(u.values, dtype="<f8").tobytes()


def decode_binary(data: bytes) -> Field:
    if len(data) < _HEADER.size:
        raise ValueError("truncated snapshot header")
    magic, version, n, m, spacing, time = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    body = data[_HEADER.size :]
    if len(body) != 8 * n * m:
        raise ValueError(f"expected {8 * n * m} value bytes, found {len(body)}")
    vals = np.frombuffer(body, dtype="<f8").reshape(n, m)
    return Field(GridSpec.from_spacing(n, spacing, m), vals, time)


def write_binary(path, u: Field) -> Path:
    return atomic_write(path, encode_binary(u))


def read_binary(path) -> Field:
    return decode_binary(Path(path).read_bytes())


def write_csv(path, u: Field) -> Path:
    buf = io.StringIO()
    n, m = u.grid.shape
    buf.write(f"# fracsplit-snapshot v1 n_points={n} length={fmt(u.grid.length)} "
              f"components={m} time={fmt(u.time)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x"] + [f"u{c}" for c in range(m)])
    for x, row in zip(u.grid.coordinates(), u.values):
        w.writerow([fmt(x)] + [fmt(v) for v in row])
    return atomic_write(path, buf.getvalue())


def read_csv(path) -> Field:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("# fracsplit-snapshot v1"):
        raise ValueError("missing snapshot metadata line")
    meta = dict(item.split("=", 1) for item in lines[0].split()[3:])
    n, m = int(meta["n_points"]), int(meta["components"])
    rows = list(csv.reader(lines[2:]))
    vals = np.array([[float(v) for v in r[1:]] for r in rows], dtype=np.float64)
    return Field(GridSpec(n, float(meta["length"]), m), vals.reshape(n, m), float(meta["time"]))
