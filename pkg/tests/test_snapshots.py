"""Binary snapshot format: byte layout and bit-exact round-trips."""

import struct

import numpy as np
import pytest

from gbdd.grid import RealField2D, make_grid
from gbdd.model import DensityState
from gbdd.snapshots import (
    MAGIC,
    SnapshotHeader,
    VERSION,
    pack_header,
    read_snapshot,
    unpack_header,
    write_snapshot,
)


def _state(rng, n1=16, n2=8, t=0.75):
    g = make_grid(n1, n2, 2 * np.pi, 4 * np.pi)
    return DensityState(
        RealField2D(g, rng.standard_normal((n1, n2))),
        RealField2D(g, rng.standard_normal((n1, n2))),
        t=t,
    )


def test_round_trip_bit_exact(tmp_path, rng):
    st = _state(rng)
    p = tmp_path / "state.gbds"
    write_snapshot(p, st)
    back = read_snapshot(p)
    assert back.grid.same_geometry(st.grid)
    assert back.t == st.t
    assert np.array_equal(back.theta_plus.values, st.theta_plus.values)
    assert np.array_equal(back.theta_minus.values, st.theta_minus.values)


def test_byte_layout(tmp_path, rng):
    st = _state(rng, n1=8, n2=8, t=1.25)
    p = tmp_path / "state.gbds"
    write_snapshot(p, st)
    raw = p.read_bytes()
    assert raw[:4] == b"GBDS"
    assert struct.unpack_from("<I", raw, 4)[0] == 1
    assert struct.unpack_from("<II", raw, 8) == (8, 8)
    L1, L2, t = struct.unpack_from("<ddd", raw, 16)
    assert (L1, L2, t) == (st.grid.L1, st.grid.L2, 1.25)
    assert len(raw) == 40 + 2 * 8 * 8 * 8
    # first payload value is theta_plus[0, 0] in row-major order
    assert struct.unpack_from("<d", raw, 40)[0] == st.theta_plus.values[0, 0]
    assert struct.unpack_from("<d", raw, 40 + 8 * 8 * 8)[0] == st.theta_minus.values[0, 0]


def test_header_round_trip():
    h = SnapshotHeader(version=VERSION, n1=32, n2=16, L1=1.5, L2=2.5, t=0.125)
    assert unpack_header(pack_header(h)) == h


def test_bad_magic(tmp_path):
    p = tmp_path / "x.gbds"
    p.write_bytes(b"NOPE" + bytes(36))
    with pytest.raises(ValueError, match="magic"):
        read_snapshot(p)


def test_bad_version():
    h = SnapshotHeader(version=2, n1=8, n2=8, L1=1.0, L2=1.0, t=0.0)
    with pytest.raises(ValueError, match="version"):
        unpack_header(pack_header(h))
    assert MAGIC == b"GBDS"


def test_truncated_header():
    with pytest.raises(ValueError, match="truncated"):
        unpack_header(b"GBDS\x01")


def test_truncated_payload(tmp_path, rng):
    st = _state(rng)
    p = tmp_path / "state.gbds"
    write_snapshot(p, st)
    raw = p.read_bytes()
    p.write_bytes(raw[:-8])
    with pytest.raises(ValueError, match="payload"):
        read_snapshot(p)


def test_non_square_and_time_preserved(tmp_path, rng):
    st = _state(rng, n1=32, n2=8, t=3.5)
    p = tmp_path / "state.gbds"
    write_snapshot(p, st)
    back = read_snapshot(p)
    assert back.grid.shape == (32, 8)
    assert back.grid.L2 == pytest.approx(4 * np.pi)
    assert back.t == 3.5
