"""Flat binary snapshot format for density states.

Layout (all little-endian, no padding):

    bytes 0..3    magic "GBDS"
    bytes 4..7    version, u32, currently 1
    bytes 8..15   n1, n2 as u32
    bytes 16..39  L1, L2, t as f64
    bytes 40..    n1*n2 f64 row-major samples of theta_plus,
                  then n1*n2 of theta_minus

Round-trips are bit-exact: the payload is the raw IEEE-754 state.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import RealField2D, make_grid
from .model import DensityState

MAGIC = b"GBDS"
VERSION = 1
_HEADER = struct.Struct("<4sIIIddd")


@dataclass(frozen=True)
class SnapshotHeader:
    version: int
    n1: int
    n2: int
    L1: float
    L2: float
    t: float


def pack_header(h: SnapshotHeader) -> bytes:
    return _HEADER.pack(MAGIC, h.version, h.n1, h.n2, h.L1, h.L2, h.t)


def unpack_header(raw: bytes) -> SnapshotHeader:
    if len(raw) < _HEADER.size:
        raise ValueError(f"snapshot header truncated: {len(raw)} < {_HEADER.size} bytes")
    magic, version, n1, n2, L1, L2, t = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"bad snapshot magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    return SnapshotHeader(version=version, n1=n1, n2=n2, L1=L1, L2=L2, t=t)


def write_snapshot(path, state: DensityState) -> None:
    g = state.grid
    header = SnapshotHeader(version=VERSION, n1=g.n1, n2=g.n2, L1=g.L1, L2=g.L2, t=state.t)
    payload = (
        np.ascontiguousarray(state.theta_plus.values, dtype="<f8").tobytes()
        + np.ascontiguousarray(state.theta_minus.values, dtype="<f8").tobytes()
    )
    Path(path).write_bytes(pack_header(header) + payload)


def read_snapshot(path) -> DensityState:
    raw = Path(path).read_bytes()
    h = unpack_header(raw)
    payload = raw[_HEADER.size :]
    expected = 2 * h.n1 * h.n2 * 8
    if len(payload) != expected:
        raise ValueError(f"snapshot payload is {len(payload)} bytes, expected {expected}")
    grid = make_grid(h.n1, h.n2, h.L1, h.L2)
    flat = np.frombuffer(payload, dtype="<f8")
    plus = flat[: h.n1 * h.n2].reshape(h.n1, h.n2).astype(np.float64)
    minus = flat[h.n1 * h.n2 :].reshape(h.n1, h.n2).astype(np.float64)
    return DensityState(
        theta_plus=RealField2D(grid, plus),
        theta_minus=RealField2D(grid, minus),
        t=h.t,
    )
