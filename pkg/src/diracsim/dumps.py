"""Deterministic binary grid dumps.

Layout (all little-endian):

    magic   8 bytes  b"DIRACSIM"
    version u32      (currently 1)
    dtype   u32      0 = real f64, 1 = complex f64 pairs (re, im)
    rank    u32      number of grid axes
    ncomp   u32      components per grid point (1 for scalars)
    dims    rank x u64
    axes    rank x (min f64, max f64)
    payload row-major over dims, component axis last

Round trips are bit-exact, which the determinism tests rely on.
"""

import struct

import numpy as np

from .grids import Grid1D, SpinorField1D

__all__ = [
    "MAGIC",
    "VERSION",
    "write_grid_dump",
    "read_grid_dump",
    "dump_field",
    "load_field",
]

MAGIC = b"DIRACSIM"
VERSION = 1


def write_grid_dump(path, payload, axes):
    """Write an array with per-axis (min, max) metadata."""
    payload = np.asarray(payload)
    axes = [(float(lo), float(hi)) for lo, hi in axes]
    rank = len(axes)
    if payload.ndim == rank:
        ncomp = 1
        dims = payload.shape
    elif payload.ndim == rank + 1:
        ncomp = payload.shape[-1]
        dims = payload.shape[:-1]
    else:
        raise ValueError(
            f"payload of rank {payload.ndim} does not match {rank} axes"
        )
    if np.iscomplexobj(payload):
        tag = 1
        raw = np.ascontiguousarray(payload, dtype="<c16").tobytes()
    else:
        tag = 0
        raw = np.ascontiguousarray(payload, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", VERSION, tag, rank))
        fh.write(struct.pack("<I", ncomp))
        fh.write(struct.pack(f"<{rank}Q", *dims))
        for lo, hi in axes:
            fh.write(struct.pack("<dd", lo, hi))
        fh.write(raw)


def read_grid_dump(path):
    """Read back (payload, axes); validates header and payload size."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}, not a grid dump")
        version, tag, rank = struct.unpack("<III", fh.read(12))
        if version != VERSION:
            raise ValueError(f"unsupported dump version {version}")
        if tag not in (0, 1):
            raise ValueError(f"unknown payload type tag {tag}")
        (ncomp,) = struct.unpack("<I", fh.read(4))
        dims = struct.unpack(f"<{rank}Q", fh.read(8 * rank))
        axes = [struct.unpack("<dd", fh.read(16)) for _ in range(rank)]
        count = int(np.prod(dims)) * ncomp
        dtype = "<c16" if tag == 1 else "<f8"
        raw = fh.read()
        expected = count * np.dtype(dtype).itemsize
        if len(raw) != expected:
            raise ValueError(
                f"truncated payload: {len(raw)} bytes, expected {expected}"
            )
        payload = np.frombuffer(raw, dtype=dtype).copy()
    shape = dims if ncomp == 1 else dims + (ncomp,)
    return payload.reshape(shape), axes


def dump_field(field, path):
    """Dump a position-space SpinorField1D."""
    if field.rep != "position":
        raise ValueError("dump_field stores position-space fields")
    write_grid_dump(path, field.values, [(field.grid.x_min, field.grid.x_max)])


def load_field(path):
    """Rebuild a SpinorField1D from a rank-1 complex dump."""
    payload, axes = read_grid_dump(path)
    if len(axes) != 1 or not np.iscomplexobj(payload):
        raise ValueError("not a 1D complex field dump")
    grid = Grid1D(payload.shape[0], axes[0][0], axes[0][1])
    return SpinorField1D(grid, payload, "position")
