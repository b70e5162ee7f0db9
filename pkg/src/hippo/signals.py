"""Signal container and the CSV formats the CLI speaks.

A signal is either uniformly sampled (values plus a fixed dt, with sample j
nominally at time (j+1)*dt: the j-th sample closes the j-th hold interval)
or timestamped (strictly increasing times). Files carry one header row:
`value` for uniform data, `t,value` for timestamped data. Coefficient
trajectories serialize as `k,t,c0,...` with `_re`/`_im` column pairs for
complex states.
"""

from __future__ import annotations

import csv
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np

from .errors import SignalFormatError, TimestampOrderError

__all__ = [
    "Signal",
    "read_signal_csv",
    "write_signal_csv",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_reconstruction_csv",
]


def _open_read(source):
    """Open a path for reading, or pass a file-like object through."""
    if hasattr(source, "read"):
        return nullcontext(source)
    return open(source, newline="")


def _open_write(dest):
    if hasattr(dest, "write"):
        return nullcontext(dest)
    return open(dest, "w", newline="")


def _label(source) -> str:
    return str(getattr(source, "name", source))


@dataclass(frozen=True)
class Signal:
    """Sample values plus either a fixed dt or explicit timestamps."""

    values: np.ndarray
    dt: float | None = None
    times: np.ndarray | None = None

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        if (self.dt is None) == (self.times is None):
            raise ValueError("exactly one of dt and times must be set")
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.times is not None:
            times = np.ascontiguousarray(self.times, dtype=float)
            object.__setattr__(self, "times", times)
            if times.shape != values.shape:
                raise ValueError("times and values must have equal length")
            if len(times) and times[0] < 0:
                raise TimestampOrderError(
                    f"timestamps must be nonnegative: sample 0 at t={times[0]}"
                )
            bad = np.nonzero(np.diff(times) <= 0)[0]
            if bad.size:
                j = int(bad[0]) + 1
                raise TimestampOrderError(
                    f"timestamps must increase strictly: sample {j} at "
                    f"t={times[j]} after t={times[j - 1]}"
                )

    @classmethod
    def uniform(cls, values, dt: float) -> "Signal":
        return cls(values=np.asarray(values, dtype=float), dt=float(dt))

    @classmethod
    def timestamped(cls, times, values) -> "Signal":
        return cls(
            values=np.asarray(values, dtype=float),
            times=np.asarray(times, dtype=float),
        )

    def __len__(self) -> int:
        return len(self.values)

    def nominal_times(self) -> np.ndarray:
        """Per-sample times: the timestamps, or (j+1)*dt for uniform data."""
        if self.times is not None:
            return self.times
        return (np.arange(len(self.values)) + 1.0) * self.dt

    def duration(self) -> float:
        return float(self.nominal_times()[-1]) if len(self.values) else 0.0


def _parse_float(text: str, line_no: int, path) -> float:
    try:
        return float(text)
    except ValueError:
        raise SignalFormatError(
            f"{path}: line {line_no}: not a number: {text!r}"
        ) from None


def read_signal_csv(path) -> tuple[np.ndarray | None, np.ndarray]:
    """Read a signal file.

    Returns:
        (times, values) with times None for the single-column format.

    Raises:
        SignalFormatError: bad header, wrong arity, non-numeric field, or no
            data rows; messages carry 1-based line numbers.
    """
    label = _label(path)
    with _open_read(path) as fh:
        rows = csv.reader(fh)
        try:
            header = [h.strip() for h in next(rows)]
        except StopIteration:
            raise SignalFormatError(f"{label}: line 1: missing header") from None
        if header == ["value"]:
            timestamped = False
        elif header == ["t", "value"]:
            timestamped = True
        else:
            raise SignalFormatError(
                f"{label}: line 1: header must be 'value' or 't,value', "
                f"got {','.join(header)!r}"
            )
        times: list[float] = []
        values: list[float] = []
        for line_no, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SignalFormatError(
                    f"{label}: line {line_no}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            if timestamped:
                times.append(_parse_float(row[0], line_no, label))
                values.append(_parse_float(row[1], line_no, label))
            else:
                values.append(_parse_float(row[0], line_no, label))
    if not values:
        raise SignalFormatError(f"{label}: no data rows")
    return (np.array(times) if timestamped else None), np.array(values)


def write_signal_csv(path, signal: Signal) -> None:
    with _open_write(path) as fh:
        writer = csv.writer(fh)
        if signal.times is not None:
            writer.writerow(["t", "value"])
            for t, v in zip(signal.times, signal.values):
                writer.writerow([repr(float(t)), repr(float(v))])
        else:
            writer.writerow(["value"])
            for v in signal.values:
                writer.writerow([repr(float(v))])


def _coef_header(n: int, complex_state: bool) -> list[str]:
    cols = ["k", "t"]
    for i in range(n):
        if complex_state:
            cols += [f"c{i}_re", f"c{i}_im"]
        else:
            cols.append(f"c{i}")
    return cols


def write_trajectory_csv(path, states) -> None:
    """Write one row per CoefState: k, t, then the coefficient entries."""
    states = list(states)
    if not states:
        raise ValueError("no states to write")
    n = len(states[0].c)
    complex_state = np.iscomplexobj(states[0].c)
    with _open_write(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(_coef_header(n, complex_state))
        for st in states:
            row = [str(st.k), repr(float(st.t))]
            for v in st.c:
                if complex_state:
                    row += [repr(float(v.real)), repr(float(v.imag))]
                else:
                    row.append(repr(float(v)))
            writer.writerow(row)


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a trajectory file back into (k, t, coefficient matrix)."""
    label = _label(path)
    with _open_read(path) as fh:
        rows = csv.reader(fh)
        try:
            header = [h.strip() for h in next(rows)]
        except StopIteration:
            raise SignalFormatError(f"{label}: line 1: missing header") from None
        if header[:2] != ["k", "t"]:
            raise SignalFormatError(
                f"{label}: line 1: trajectory header must start with 'k,t'"
            )
        coef_cols = header[2:]
        if not coef_cols:
            raise SignalFormatError(f"{label}: line 1: no coefficient columns")
        complex_state = coef_cols[0].endswith("_re")
        n = len(coef_cols) // 2 if complex_state else len(coef_cols)
        ks: list[int] = []
        ts: list[float] = []
        coefs: list[np.ndarray] = []
        for line_no, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SignalFormatError(
                    f"{label}: line {line_no}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            ks.append(int(_parse_float(row[0], line_no, label)))
            ts.append(_parse_float(row[1], line_no, label))
            vals = [_parse_float(x, line_no, label) for x in row[2:]]
            if complex_state:
                arr = np.array(vals).reshape(n, 2)
                coefs.append(arr[:, 0] + 1j * arr[:, 1])
            else:
                coefs.append(np.array(vals))
    if not coefs:
        raise SignalFormatError(f"{label}: no data rows")
    return np.array(ks), np.array(ts), np.vstack(coefs)


def write_reconstruction_csv(path, xs, truth, approx) -> None:
    """Write the plot-ready comparison table: x, truth, approx, abs_err."""
    xs = np.asarray(xs, dtype=float)
    truth = np.asarray(truth, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if not (xs.shape == truth.shape == approx.shape):
        raise ValueError("x, truth, and approx must have equal length")
    with _open_write(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "truth", "approx", "abs_err"])
        for x, tv, av in zip(xs, truth, approx):
            writer.writerow(
                [repr(float(x)), repr(float(tv)), repr(float(av)),
                 repr(abs(float(tv) - float(av)))]
            )
