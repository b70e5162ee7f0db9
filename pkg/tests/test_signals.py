"""Signal container and CSV round trips.

Files are written with repr() of each float, so a write/read cycle must
reproduce every value bit for bit; the round-trip tests assert exact
equality, not closeness.
"""

import io

import numpy as np
import pytest

from hippo.discretize import CoefState
from hippo.errors import SignalFormatError, TimestampOrderError
from hippo.signals import (
    Signal,
    read_signal_csv,
    read_trajectory_csv,
    write_reconstruction_csv,
    write_signal_csv,
    write_trajectory_csv,
)


def test_signal_construction_and_coercion():
    sig = Signal([1, 2, 3], dt=0.5)
    assert sig.values.dtype == np.float64
    assert len(sig) == 3
    assert np.array_equal(sig.nominal_times(), [0.5, 1.0, 1.5])
    assert sig.duration() == 1.5

    ts = Signal.timestamped([0.0, 0.2, 0.9], [5.0, 6.0, 7.0])
    assert np.array_equal(ts.nominal_times(), [0.0, 0.2, 0.9])
    assert ts.duration() == 0.9

    empty = Signal(np.empty(0), dt=1.0)
    assert empty.duration() == 0.0

    uni = Signal.uniform([1.0], dt=2)
    assert uni.dt == 2.0


def test_signal_validation():
    with pytest.raises(ValueError):
        Signal([1.0])  # neither dt nor times
    with pytest.raises(ValueError):
        Signal([1.0], dt=0.5, times=np.array([0.1]))
    with pytest.raises(ValueError):
        Signal([1.0], dt=0.0)
    with pytest.raises(ValueError):
        Signal([1.0, np.nan], dt=0.5)
    with pytest.raises(ValueError):
        Signal([1.0, np.inf], dt=0.5)
    with pytest.raises(ValueError):
        Signal([1.0, 2.0], times=np.array([0.1]))


def test_timestamp_order_errors_carry_the_offending_index():
    with pytest.raises(TimestampOrderError, match="sample 0 at t=-1.0"):
        Signal([1.0, 2.0], times=np.array([-1.0, 2.0]))
    with pytest.raises(TimestampOrderError, match="sample 2 at t=1.0 after t=3.0"):
        Signal([1.0, 2.0, 3.0], times=np.array([0.5, 3.0, 1.0]))
    with pytest.raises(TimestampOrderError, match="sample 1 at t=0.5 after t=0.5"):
        Signal([1.0, 2.0], times=np.array([0.5, 0.5]))


def test_uniform_csv_round_trip_is_bitwise(tmp_path):
    rng = np.random.default_rng(31)
    sig = Signal(rng.standard_normal(17) * 1e3, dt=0.25)
    path = tmp_path / "sig.csv"
    write_signal_csv(path, sig)
    times, values = read_signal_csv(path)
    assert times is None
    assert np.array_equal(values, sig.values)


def test_timestamped_csv_round_trip_is_bitwise():
    rng = np.random.default_rng(37)
    times = np.cumsum(rng.uniform(0.01, 1.0, size=11))
    sig = Signal(rng.standard_normal(11), times=times)
    buf = io.StringIO()
    write_signal_csv(buf, sig)
    buf.seek(0)
    rt, rv = read_signal_csv(buf)
    assert np.array_equal(rt, sig.times)
    assert np.array_equal(rv, sig.values)


def test_read_signal_skips_blank_rows():
    buf = io.StringIO("value\r\n1.5\r\n\r\n2.5\r\n")
    times, values = read_signal_csv(buf)
    assert times is None
    assert values.tolist() == [1.5, 2.5]


def test_read_signal_error_messages():
    with pytest.raises(SignalFormatError, match="line 1: missing header"):
        read_signal_csv(io.StringIO(""))
    with pytest.raises(SignalFormatError, match="header must be 'value' or 't,value'"):
        read_signal_csv(io.StringIO("amplitude\n1.0\n"))
    with pytest.raises(SignalFormatError, match="line 3: expected 1 fields, got 2"):
        read_signal_csv(io.StringIO("value\n1.0\n2.0,3.0\n"))
    with pytest.raises(SignalFormatError, match="line 2: not a number: 'abc'"):
        read_signal_csv(io.StringIO("t,value\nabc,1.0\n"))
    with pytest.raises(SignalFormatError, match="no data rows"):
        read_signal_csv(io.StringIO("value\n"))


def test_real_trajectory_round_trip(tmp_path):
    rng = np.random.default_rng(41)
    states = [
        CoefState(rng.standard_normal(4), k + 1, (k + 1) * 0.5) for k in range(6)
    ]
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, states)
    ks, ts, coefs = read_trajectory_csv(path)
    assert ks.tolist() == [1, 2, 3, 4, 5, 6]
    assert np.array_equal(ts, (np.arange(6) + 1) * 0.5)
    assert coefs.shape == (6, 4)
    for k in range(6):
        assert np.array_equal(coefs[k], states[k].c)


def test_complex_trajectory_round_trip():
    rng = np.random.default_rng(43)
    c0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    c1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    buf = io.StringIO()
    write_trajectory_csv(buf, [CoefState(c0, 1, 0.1), CoefState(c1, 2, 0.2)])
    buf.seek(0)
    header = buf.getvalue().splitlines()[0]
    assert header == "k,t,c0_re,c0_im,c1_re,c1_im,c2_re,c2_im"
    buf.seek(0)
    ks, ts, coefs = read_trajectory_csv(buf)
    assert coefs.dtype == np.complex128
    assert np.array_equal(coefs[0], c0)
    assert np.array_equal(coefs[1], c1)


def test_trajectory_errors():
    with pytest.raises(ValueError, match="no states"):
        write_trajectory_csv(io.StringIO(), [])
    with pytest.raises(SignalFormatError, match="missing header"):
        read_trajectory_csv(io.StringIO(""))
    with pytest.raises(SignalFormatError, match="must start with 'k,t'"):
        read_trajectory_csv(io.StringIO("a,b,c\n"))
    with pytest.raises(SignalFormatError, match="no coefficient columns"):
        read_trajectory_csv(io.StringIO("k,t\n"))
    with pytest.raises(SignalFormatError, match="no data rows"):
        read_trajectory_csv(io.StringIO("k,t,c0\n"))
    with pytest.raises(SignalFormatError, match="line 2: expected 3 fields"):
        read_trajectory_csv(io.StringIO("k,t,c0\n1,0.5\n"))


def test_reconstruction_table():
    xs = np.array([0.0, 0.5, 1.0])
    truth = np.array([1.0, 2.0, 3.0])
    approx = np.array([1.0, 1.5, 3.25])
    buf = io.StringIO()
    write_reconstruction_csv(buf, xs, truth, approx)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,truth,approx,abs_err"
    assert len(lines) == 4
    assert lines[2].split(",") == [repr(0.5), repr(2.0), repr(1.5), repr(0.5)]
    with pytest.raises(ValueError):
        write_reconstruction_csv(io.StringIO(), xs, truth, approx[:2])
