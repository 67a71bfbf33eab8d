"""Path-level operators: time grids, running extrema, discrete stochastic
integrals, Skorokhod reflection and balayage.

Every operator accepts either a :class:`Path` or a plain 1-d array.  When a
``Path`` goes in, a ``Path`` on the same grid comes out; arrays map to arrays.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

#: Sentinel for a random time that is not attained on the grid.
NOT_ATTAINED = None

TimeIndex = Optional[int]


class DomainError(ValueError):
    """Raised when an operation is called outside its domain."""


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    step: float
    n_points: int

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"grid step must be > 0, got {self.step}")
        if self.n_points < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.n_points}")
        if self.t0 < 0:
            raise DomainError(f"grid origin must be >= 0, got {self.t0}")

    @classmethod
    def from_horizon(cls, horizon: float, step: float, t0: float = 0.0) -> "TimeGrid":
        return cls(t0, step, int(round(horizon / step)) + 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.n_points)

    @property
    def horizon(self) -> float:
        return self.t0 + self.step * (self.n_points - 1)

    def index_at(self, t: float) -> int:
        """Last grid index with time <= t (clipped to the grid)."""
        i = int(np.floor((t - self.t0) / self.step + 1e-9))
        return min(max(i, 0), self.n_points - 1)


@dataclass(frozen=True)
class Path:
    """A trajectory sampled on a :class:`TimeGrid`.

    Stopped paths are stored absorbed: ``values[j] == values[stopped_at]`` for
    every ``j >= stopped_at``.
    """

    grid: TimeGrid
    values: np.ndarray
    stopped_at: TimeIndex = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.shape[0] != self.grid.n_points:
            raise DomainError(
                f"path has {v.shape} values for a grid of {self.grid.n_points} points"
            )
        if self.stopped_at is not None:
            i = self.stopped_at
            if not 0 <= i < v.shape[0]:
                raise DomainError(f"stopped_at={i} outside grid")
            if np.any(v[i:] != v[i]):
                raise DomainError("stopped path is not absorbed after stopped_at")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, item):
        return self.values[item]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def with_values(self, values, stopped_at: TimeIndex = "same") -> "Path":
        if stopped_at == "same":
            stopped_at = self.stopped_at
        return Path(self.grid, np.asarray(values, dtype=float), stopped_at)


PathLike = Union[Path, np.ndarray, list, tuple]


def _values(p: PathLike) -> np.ndarray:
    if isinstance(p, Path):
        return p.values
    v = np.asarray(p, dtype=float)
    if v.ndim != 1:
        raise DomainError("paths are one-dimensional")
    return v


def _wrap(like: PathLike, values: np.ndarray, keep_stop: bool = True):
    if isinstance(like, Path):
        stop = like.stopped_at if keep_stop else None
        if stop is not None and np.any(values[stop:] != values[stop]):
            stop = None
        return Path(like.grid, values, stop)
    return values


def _same_grid(a: PathLike, b: PathLike) -> None:
    if isinstance(a, Path) and isinstance(b, Path):
        if a.grid != b.grid:
            raise DomainError("paths live on different grids")
    elif len(_values(a)) != len(_values(b)):
        raise DomainError("paths have different lengths")


def running_supremum(p: PathLike):
    """``out[i] = max(p[0..i])``."""
    v = _values(p)
    if v.size == 0:
        raise DomainError("running supremum of an empty path")
    return _wrap(p, np.maximum.accumulate(v))


def running_infimum(p: PathLike):
    """``out[i] = min(p[0..i])``."""
    v = _values(p)
    if v.size == 0:
        raise DomainError("running infimum of an empty path")
    return _wrap(p, np.minimum.accumulate(v))


def ito_sum(k: PathLike, x: PathLike):
    """Left-point stochastic sum ``out[i] = sum_{j<i} k[j] (x[j+1] - x[j])``.

    The integrand is read at the left end of each step, so a predictable
    ``k`` against a martingale ``x`` gives a discrete martingale.
    """
    _same_grid(k, x)
    kv, xv = _values(k), _values(x)
    out = np.zeros_like(xv)
    np.cumsum(kv[:-1] * np.diff(xv), out=out[1:])
    return _wrap(x, out, keep_stop=False)


def skorokhod_reflection(y: PathLike):
    """Reflect ``y`` at zero: returns ``(z, a)`` with ``z = y + a >= 0``.

    ``a[i] = max(0, max_{s<=i} -y[s])`` is the minimal nondecreasing pushing
    process; it only moves at indices where ``z`` sits at zero.
    """
    v = _values(y)
    if v.size == 0 or v[0] != 0.0:
        raise DomainError("Skorokhod reflection needs y[0] == 0")
    a = np.maximum(np.maximum.accumulate(-v), 0.0)
    z = v + a
    return _wrap(y, z, keep_stop=False), _wrap(y, a, keep_stop=False)


def last_zero_index(y: PathLike, eps_zero: float = 0.0) -> np.ndarray:
    """For every ``i``, the last index ``j <= i`` with ``|y[j]| <= eps_zero``
    (0 when there is none)."""
    v = _values(y)
    idx = np.where(np.abs(v) <= eps_zero, np.arange(v.size), 0)
    return np.maximum.accumulate(idx)


def balayage_transform(k: PathLike, y: PathLike, eps_zero: float = 0.0):
    """Both sides of the balayage identity ``k_{g_t} Y_t = k_0 Y_0 + int k_{g_s} dY_s``.

    ``g_t`` is the last grid index up to ``t`` where ``y`` is zero (within
    ``eps_zero``).  Returns ``(lhs, rhs)``.
    """
    _same_grid(k, y)
    kv, yv = _values(k), _values(y)
    kg = kv[last_zero_index(yv, eps_zero)]
    lhs = kg * yv
    rhs = kv[0] * yv[0] + ito_sum(kg, yv)
    return _wrap(y, lhs, keep_stop=False), _wrap(y, rhs, keep_stop=False)


# ---------------------------------------------------------------------------
# Path CSV: header ``t,value``, one row per grid point.


def read_path_csv(source) -> Path:
    """Read a path from a CSV file name, file object or string buffer.

    The grid is rebuilt from the time column, which must be uniformly spaced.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DomainError("empty path CSV") from None
    if [h.strip() for h in header] != ["t", "value"]:
        raise DomainError(f"path CSV header must be 't,value', got {header!r}")
    rows = [r for r in reader if r]
    if len(rows) < 2:
        raise DomainError("path CSV needs at least two rows")
    try:
        t = np.array([float(r[0]) for r in rows])
        v = np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise DomainError(f"malformed path CSV row: {exc}") from None
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
        raise DomainError("path CSV contains non-finite entries")
    dt = np.diff(t)
    step = float(dt.mean())
    if step <= 0 or np.max(np.abs(dt - step)) > 1e-9 * max(1.0, abs(t[-1])):
        raise DomainError("path CSV time column must be uniformly increasing")
    return Path(TimeGrid(float(t[0]), step, len(t)), v)


def write_path_csv(path: Path, target) -> None:
    def _write(fh):
        fh.write("t,value\n")
        for t, v in zip(path.times, path.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")

    if hasattr(target, "write"):
        _write(target)
    else:
        with open(target, "w", newline="\n", encoding="utf-8") as fh:
            _write(fh)
