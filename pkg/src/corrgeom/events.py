"""Sliding spread measures over time and detection of their minima.

A window of K samples starting at sample t maps each series to a point on
the sphere; the spread measures of that point cloud (diameter, best triangle
area, hull area) become time series stamped at the window start. Minima of
those series mark phase-locked intervals: times where every series moves
together.

Windows that cannot be evaluated (a constant series, or a point set with no
hemisphere/2-sphere structure for the hull) become explicit gap markers,
never fabricated values, and minima are only detected within gap-free
segments.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import find_peaks

from .correlation import correlation_from_units, CorrelationMatrix
from .errors import (
    HemisphereError,
    HullRankError,
    TooFewPointsError,
    WindowTooLongError,
    ZeroVarianceError,
)
from .measures import diameter, max_simplex_volume, spherical_convex_hull_area
from .metric import PROJECTIVE, distance_matrix, sign_lift
from .series import TimeSeriesSet, WindowSpec, windowed_unit_matrix

KIND_DIAMETER = "diameter"
KIND_MAX_TRIANGLE = "max_triangle_area"
KIND_HULL = "hull_area"
MEASURE_KINDS = (KIND_DIAMETER, KIND_MAX_TRIANGLE, KIND_HULL)


@dataclass(frozen=True)
class MeasureSeries:
    """One spread measure evaluated on sliding windows.

    ``timestamps`` are the ticks of each window's first sample, strictly
    increasing. ``gaps`` flags windows that could not be evaluated; their
    ``values`` entries are a 0.0 placeholder and must be ignored.
    """

    kind: str
    window: int
    stride: int
    timestamps: np.ndarray
    values: np.ndarray
    gaps: np.ndarray

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype=int)
        vals = np.array(self.values, dtype=float)
        gaps = np.array(self.gaps, dtype=bool)
        if not (ts.shape == vals.shape == gaps.shape) or ts.ndim != 1:
            raise ValueError("timestamps, values, and gaps must be 1-d and equal length")
        if ts.size > 1 and not np.all(np.diff(ts) > 0):
            raise ValueError("timestamps must be strictly increasing")
        ok = ~gaps
        if not np.all(np.isfinite(vals[ok])):
            raise ValueError("values must be finite outside gaps")
        if vals[ok].size and vals[ok].min() < 0.0:
            raise ValueError("spread measures are nonnegative")
        if not np.all(vals[gaps] == 0.0):
            raise ValueError("gap placeholders must be exactly 0.0")
        for arr in (ts, vals, gaps):
            arr.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "gaps", gaps)

    def __len__(self) -> int:
        return self.timestamps.size

    def segments(self) -> list[tuple[int, int]]:
        """Half-open index ranges of the gap-free runs."""
        out = []
        start = None
        for i, g in enumerate(self.gaps):
            if g:
                if start is not None:
                    out.append((start, i))
                    start = None
            elif start is None:
                start = i
        if start is not None:
            out.append((start, len(self)))
        return out

    def to_csv(self, dest) -> None:
        """Rows of (timestamp, value, gap); gap rows leave the value empty."""
        if isinstance(dest, (str, Path)):
            with open(dest, "w", newline="") as fh:
                self.to_csv(fh)
                return
        writer = csv.writer(dest, lineterminator="\n")
        writer.writerow(["timestamp", "value", "gap"])
        for t, v, g in zip(self.timestamps, self.values, self.gaps):
            writer.writerow([int(t), "" if g else repr(float(v)), int(g)])


def sliding_measures(
    ts_set: TimeSeriesSet,
    window: int,
    stride: int = 1,
    kinds: Sequence[str] = (KIND_DIAMETER, KIND_MAX_TRIANGLE),
) -> list[MeasureSeries]:
    """Evaluate spread measures on every sliding window of a series set.

    The window starting at sample t covers samples [t, t + window) and is
    stamped at the tick of sample t. Produces floor((length - window) /
    stride) + 1 points per requested kind. A constant series gaps the window
    for every kind; hull failures (no open hemisphere, or points spanning
    more than three dimensions) gap only the hull series.
    """
    kinds = tuple(kinds)
    if not kinds:
        raise ValueError("at least one measure kind is required")
    for kind in kinds:
        if kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {kind!r}; choose from {MEASURE_KINDS}")
    if window > ts_set.length:
        raise WindowTooLongError(
            f"window {window} exceeds series length {ts_set.length}"
        )
    n = len(ts_set)
    if n < 2:
        raise TooFewPointsError("sliding measures need at least 2 series")
    if n < 3 and (KIND_MAX_TRIANGLE in kinds or KIND_HULL in kinds):
        raise TooFewPointsError("triangle and hull measures need at least 3 series")

    count = (ts_set.length - window) // stride + 1
    timestamps = np.array(
        [ts_set.tick(m * stride) for m in range(count)], dtype=int
    )
    values = {kind: np.zeros(count) for kind in kinds}
    gaps = {kind: np.zeros(count, dtype=bool) for kind in kinds}

    for m in range(count):
        t = m * stride
        try:
            units = windowed_unit_matrix(ts_set, WindowSpec(t, window, stride))
        except ZeroVarianceError:
            for kind in kinds:
                gaps[kind][m] = True
            continue
        dm = None
        if KIND_DIAMETER in kinds or KIND_MAX_TRIANGLE in kinds:
            corr = CorrelationMatrix(ts_set.ids, correlation_from_units(units))
            dm = distance_matrix(corr, PROJECTIVE)
        if KIND_DIAMETER in kinds:
            values[KIND_DIAMETER][m] = diameter(dm).value
        if KIND_MAX_TRIANGLE in kinds:
            values[KIND_MAX_TRIANGLE][m] = max_simplex_volume(dm, 2).value
        if KIND_HULL in kinds:
            try:
                lifted = sign_lift(units, ts_set.ids)
                values[KIND_HULL][m] = spherical_convex_hull_area(lifted).area
            except (HemisphereError, HullRankError):
                gaps[KIND_HULL][m] = True

    return [
        MeasureSeries(kind, window, stride, timestamps, values[kind], gaps[kind])
        for kind in kinds
    ]


@dataclass(frozen=True)
class Event:
    """A detected minimum: where, how deep, and how hard to escape.

    ``prominence`` is the smallest climb that leads out of the minimum's
    basin; ``left_base``/``right_base`` are the timestamps of the basin
    extents used to measure it.
    """

    timestamp: int
    value: float
    prominence: float
    left_base: int
    right_base: int

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "value": self.value,
            "prominence": self.prominence,
            "left_base": self.left_base,
            "right_base": self.right_base,
        }


@dataclass(frozen=True)
class EventList:
    """Detected minima of one measure series, ordered by timestamp, with the
    detector parameters echoed for reproducibility."""

    measure_kind: str
    window: int
    stride: int
    min_prominence: float
    min_separation: int
    events: tuple[Event, ...]

    def __post_init__(self):
        evs = tuple(self.events)
        for a, b in zip(evs, evs[1:]):
            if b.timestamp <= a.timestamp:
                raise ValueError("events must be strictly ordered by timestamp")
            if b.timestamp - a.timestamp < self.min_separation:
                raise ValueError("events closer than min_separation survived filtering")
        object.__setattr__(self, "events", evs)

    def __len__(self) -> int:
        return len(self.events)

    def timestamps(self) -> list[int]:
        return [e.timestamp for e in self.events]

    def to_dict(self) -> dict:
        return {
            "measure_kind": self.measure_kind,
            "window": self.window,
            "stride": self.stride,
            "min_prominence": self.min_prominence,
            "min_separation": self.min_separation,
            "events": [e.to_dict() for e in self.events],
        }


def detect_minima(
    series: MeasureSeries, min_prominence: float, min_separation: int
) -> EventList:
    """Find prominent local minima of a measure series.

    A candidate is a strict local minimum (plateaus report their leftmost
    point) with topographic prominence at least ``min_prominence``. Among
    candidates closer than ``min_separation`` ticks, the deeper one survives,
    ties going to the earlier timestamp. Gaps split the series; no candidate
    is ever detected across or at a gap boundary. An empty result is valid.
    """
    if min_prominence < 0.0:
        raise ValueError("min_prominence must be >= 0")
    if min_separation < 0:
        raise ValueError("min_separation must be >= 0")
    if len(series) < 3:
        raise ValueError("minima detection needs at least 3 points")

    candidates = []
    for lo, hi in series.segments():
        if hi - lo < 3:
            continue
        vals = series.values[lo:hi]
        ts = series.timestamps[lo:hi]
        peaks, props = find_peaks(
            -vals, prominence=min_prominence, plateau_size=(None, None)
        )
        for p, left_edge, prom, lb, rb in zip(
            peaks,
            props["left_edges"],
            props["prominences"],
            props["left_bases"],
            props["right_bases"],
        ):
            i = int(left_edge)  # leftmost point of a plateau
            candidates.append(
                Event(
                    timestamp=int(ts[i]),
                    value=float(vals[i]),
                    prominence=float(prom),
                    left_base=int(ts[int(lb)]),
                    right_base=int(ts[int(rb)]),
                )
            )

    # Deeper minima claim their neighborhood first; earlier timestamp wins ties.
    candidates.sort(key=lambda e: (e.value, e.timestamp))
    kept: list[Event] = []
    for cand in candidates:
        if all(abs(cand.timestamp - k.timestamp) >= min_separation for k in kept):
            kept.append(cand)
    kept.sort(key=lambda e: e.timestamp)
    return EventList(
        measure_kind=series.kind,
        window=series.window,
        stride=series.stride,
        min_prominence=min_prominence,
        min_separation=min_separation,
        events=tuple(kept),
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Greedy nearest-timestamp matching of two event lists."""

    kind_a: str
    kind_b: str
    match_window: int
    matched: tuple[tuple[int, int], ...]
    a_only: tuple[int, ...]
    b_only: tuple[int, ...]

    @property
    def count_a(self) -> int:
        return len(self.matched) + len(self.a_only)

    @property
    def count_b(self) -> int:
        return len(self.matched) + len(self.b_only)

    def to_dict(self) -> dict:
        return {
            "kind_a": self.kind_a,
            "kind_b": self.kind_b,
            "match_window": self.match_window,
            "matched": [list(p) for p in self.matched],
            "a_only": list(self.a_only),
            "b_only": list(self.b_only),
            "count_a": self.count_a,
            "count_b": self.count_b,
            "n_matched": len(self.matched),
        }


def compare_event_sets(a: EventList, b: EventList, match_window: int) -> ComparisonReport:
    """Match events of two lists from the same timeline.

    Candidate pairs within ``match_window`` ticks are taken greedily by
    increasing timestamp gap (earlier pairs first on ties); every event
    matches at most once.
    """
    ta = a.timestamps()
    tb = b.timestamps()
    pairs = [
        (abs(x - y), x, y, i, j)
        for i, x in enumerate(ta)
        for j, y in enumerate(tb)
        if abs(x - y) <= match_window
    ]
    pairs.sort()
    used_a: set[int] = set()
    used_b: set[int] = set()
    matched = []
    for _, x, y, i, j in pairs:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        matched.append((x, y))
    matched.sort()
    a_only = tuple(x for i, x in enumerate(ta) if i not in used_a)
    b_only = tuple(y for j, y in enumerate(tb) if j not in used_b)
    return ComparisonReport(
        kind_a=a.measure_kind,
        kind_b=b.measure_kind,
        match_window=match_window,
        matched=tuple(matched),
        a_only=a_only,
        b_only=b_only,
    )
