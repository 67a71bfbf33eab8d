"""Random times on discrete paths: hitting times, the last passage time at the
overall maximum, and the pseudo-stopping time built from it.

All tie-breaks pick the latest index, since these times are suprema.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_paths import DomainError, Path, PathLike, TimeIndex, _values, running_supremum


@dataclass(frozen=True)
class RandomTimeRecord:
    g: TimeIndex
    rho: TimeIndex
    t0: TimeIndex
    s_end: float
    r_rho: float

    def __post_init__(self):
        if self.g is not None and self.rho is not None and self.rho > self.g:
            raise DomainError("rho must not exceed g")
        if self.g is not None and self.t0 is not None and self.g > self.t0:
            raise DomainError("g must not exceed the absorption index")

    def as_row(self, path_id: int) -> dict:
        return {
            "path_id": path_id,
            "g": "" if self.g is None else self.g,
            "rho": "" if self.rho is None else self.rho,
            "t0": "" if self.t0 is None else self.t0,
            "s_end": repr(float(self.s_end)),
            "r_rho": "" if math.isnan(self.r_rho) else repr(float(self.r_rho)),
        }


TIMES_CSV_COLUMNS = ("path_id", "g", "rho", "t0", "s_end", "r_rho")


def last_passage(N: PathLike, S: PathLike) -> int:
    """Last index where ``N`` touches its terminal supremum.

    Equivalently the last index at which the running maximum ``S`` is
    (re)attained; 0 if ``S`` is flat.
    """
    n, s = _values(N), _values(S)
    if n.shape != s.shape or n.size == 0:
        raise DomainError("N and S must be nonempty and of equal length")
    if np.any(n > s):
        raise DomainError("S is below N somewhere; not a running supremum")
    hits = np.flatnonzero((n == s) & (s == s[-1]))
    if hits.size == 0:
        raise DomainError("S is not the running supremum of N")
    return int(hits[-1])


def pseudo_stopping_time(N: PathLike, S: PathLike, g: TimeIndex):
    """Latest index strictly before ``g`` where ``N/S`` equals its minimum over
    ``[0, g]``.

    Returns ``(rho, r_rho)`` with ``r_rho`` the running minimum of the ratio at
    ``rho``.  ``g == 0`` gives ``(0, 1.0)`` (empty supremum); an unattained
    ``g`` propagates as ``(None, nan)``.
    """
    if g is None:
        return None, math.nan
    n, s = _values(N), _values(S)
    if g == 0:
        return 0, float(n[0] / s[0])
    ratio = n[: g + 1] / s[: g + 1]
    r_min = ratio.min()
    before = np.flatnonzero(ratio[:g] == r_min)
    if before.size == 0:
        # minimum only reached at g itself: the ratio is then 1 throughout
        rho = g - 1
    else:
        rho = int(before[-1])
    return rho, float(np.min(ratio[: rho + 1]))


def hitting_time(p: PathLike, level: float, direction: str = "up") -> TimeIndex:
    """First index with ``p > level`` (``up``) or ``p <= level`` (``down``)."""
    v = _values(p)
    if direction == "up":
        hit = v > level
    elif direction == "down":
        hit = v <= level
    else:
        raise DomainError(f"direction must be 'up' or 'down', got {direction!r}")
    idx = np.flatnonzero(hit)
    return int(idx[0]) if idx.size else None


def record_times(N: PathLike, S: PathLike | None = None) -> RandomTimeRecord:
    """All random times of one path bundled together."""
    if S is None:
        S = running_supremum(N)
    g = last_passage(N, S)
    rho, r_rho = pseudo_stopping_time(N, S, g)
    if isinstance(N, Path) and N.stopped_at is not None:
        t0 = N.stopped_at
    else:
        t0 = hitting_time(N, 0.0, "down")
    if t0 is not None and g > t0:
        # an absorbed path cannot touch its maximum after absorption
        t0 = None
    return RandomTimeRecord(g=g, rho=rho, t0=t0, s_end=float(_values(S)[-1]), r_rho=r_rho)
