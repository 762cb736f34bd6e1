"""Calendar bucketing, per-class emotion series, and the behavioural-shift
detectors (rolling z-score per class, Jensen-Shannon divergence on the class
mix).

All boundaries are computed in UTC and weeks start on Monday, so bucket
ranges are identical regardless of host timezone. Baselines are trailing
windows: the detectors stay usable in forensic/streaming order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from statistics import fmean, stdev
from typing import Iterable, Mapping, Sequence, TypeVar

from .lexicon import ALL_CLASSES, EmotionClass

GRANULARITIES = ("week", "month", "quarter", "year")

# Pseudo-class for the post-volume series (the per-user activity chart).
VOLUME = "volume"

SERIES_HEADER = ["bucket_start", "class", "count", "total", "proportion"]
OCCURRENCE_HEADER = ["bucket_start", "class", "count"]

# Row order within one bucket of the series CSV.
SERIES_CLASS_KEYS = tuple(c.value for c in ALL_CLASSES) + (VOLUME,)

T = TypeVar("T")


def bucket_start(stamp: datetime, granularity: str) -> datetime:
    """UTC start of the calendar period containing stamp."""
    if stamp.tzinfo is None:
        raise ValueError("naive timestamps cannot be bucketed")
    stamp = stamp.astimezone(timezone.utc)
    if granularity == "week":
        day = stamp.date() - timedelta(days=stamp.weekday())
        return datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
    if granularity == "month":
        return datetime(stamp.year, stamp.month, 1, tzinfo=timezone.utc)
    if granularity == "quarter":
        month = ((stamp.month - 1) // 3) * 3 + 1
        return datetime(stamp.year, month, 1, tzinfo=timezone.utc)
    if granularity == "year":
        return datetime(stamp.year, 1, 1, tzinfo=timezone.utc)
    raise ValueError(f"unknown granularity: {granularity!r}")


def next_bucket_start(start: datetime, granularity: str) -> datetime:
    if granularity == "week":
        return start + timedelta(days=7)
    if granularity in ("month", "quarter"):
        step = 1 if granularity == "month" else 3
        month = start.month - 1 + step
        return start.replace(year=start.year + month // 12, month=month % 12 + 1)
    if granularity == "year":
        return start.replace(year=start.year + 1)
    raise ValueError(f"unknown granularity: {granularity!r}")


@dataclass(frozen=True)
class TimeBucket:
    start: datetime
    index: int
    granularity: str

    @property
    def key(self) -> str:
        return self.start.date().isoformat()


def bucketize(
    items: Iterable[tuple[datetime, T]], granularity: str
) -> tuple[list[TimeBucket], list[list[T]]]:
    """Assign items to calendar buckets, materializing empty buckets so the
    range from first to last item is contiguous and gap-free."""
    stamped = [(bucket_start(ts, granularity), value) for ts, value in items]
    if not stamped:
        return [], []
    first = min(s for s, _ in stamped)
    last = max(s for s, _ in stamped)
    buckets: list[TimeBucket] = []
    index_of: dict[datetime, int] = {}
    cursor = first
    while True:
        index_of[cursor] = len(buckets)
        buckets.append(TimeBucket(cursor, len(buckets), granularity))
        if cursor == last:
            break
        cursor = next_bucket_start(cursor, granularity)
    groups: list[list[T]] = [[] for _ in buckets]
    for start, value in stamped:
        groups[index_of[start]].append(value)
    return buckets, groups


@dataclass
class BucketSeries:
    scope: str
    class_key: str
    buckets: list[TimeBucket]
    counts: list[int]
    totals: list[int]

    @property
    def proportions(self) -> list[float]:
        return [c / t if t else 0.0 for c, t in zip(self.counts, self.totals)]


def emotion_series(
    buckets: Sequence[TimeBucket],
    bucket_labels: Sequence[Sequence[frozenset[EmotionClass]]],
    cls: EmotionClass | str,
    scope: str = "all",
) -> BucketSeries:
    """Post counts per bucket for one class (or VOLUME for all posts).

    A multi-labeled post counts once in each of its classes, so class counts
    may exceed the bucket total; proportions are per-class rates, not a
    partition.
    """
    class_key = cls.value if isinstance(cls, EmotionClass) else cls
    totals = [len(group) for group in bucket_labels]
    if class_key == VOLUME:
        counts = list(totals)
    else:
        target = EmotionClass(class_key)
        counts = [sum(1 for labels in group if target in labels) for group in bucket_labels]
    return BucketSeries(scope, class_key, list(buckets), counts, totals)


@dataclass(frozen=True)
class Flag:
    bucket_index: int
    bucket_start: datetime
    signal: str  # "zscore" | "jsd"
    class_key: str | None
    value: float
    threshold: float

    @property
    def severity(self) -> float:
        return self.value / self.threshold

    def sort_key(self) -> tuple:
        return (self.bucket_index, self.signal, self.class_key or "")


@dataclass(frozen=True)
class DetectorConfig:
    window: int = 6
    z_thresh: float = 2.0
    jsd_thresh: float = 0.25
    min_hits: int = 3
    min_total: int = 5

    def validate(self) -> None:
        if self.window < 2:
            raise ValueError("bad-window")
        if self.z_thresh <= 0 or self.jsd_thresh <= 0:
            raise ValueError("thresholds must be positive")
        if self.min_hits < 0 or self.min_total < 0:
            raise ValueError("minimum counts must be non-negative")


def zscore_flags(
    series: BucketSeries,
    window: int = 6,
    z_thresh: float = 2.0,
    min_hits: int = 3,
) -> list[Flag]:
    """Flag buckets whose count departs from the trailing-window baseline.

    Baseline is mean/sample-stdev of the W previous buckets. A flat baseline
    (sigma = 0) with a strictly higher count is flagged with value infinity:
    any departure from a constant history is a departure at every z.
    """
    if window < 2:
        raise ValueError("bad-window")
    flags: list[Flag] = []
    counts = series.counts
    for t in range(window, len(counts)):
        count = counts[t]
        if count < min_hits:
            continue
        base = counts[t - window : t]
        mu = fmean(base)
        sigma = stdev(base)
        if sigma > 0:
            z = (count - mu) / sigma
            if z >= z_thresh:
                flags.append(
                    Flag(t, series.buckets[t].start, "zscore", series.class_key, z, z_thresh)
                )
        elif count > mu:
            flags.append(
                Flag(
                    t,
                    series.buckets[t].start,
                    "zscore",
                    series.class_key,
                    math.inf,
                    z_thresh,
                )
            )
    return flags


def jsd(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon divergence, base 2, so the value lives in [0, 1].

    Inputs are renormalized; a distribution summing to zero is an error.
    """
    if len(p) != len(q):
        raise ValueError("length-mismatch")
    if any(x < 0 for x in p) or any(x < 0 for x in q):
        raise ValueError("negative probability mass")
    sum_p, sum_q = sum(p), sum(q)
    if sum_p == 0 or sum_q == 0:
        raise ValueError("empty-distribution")
    pn = [x / sum_p for x in p]
    qn = [x / sum_q for x in q]
    div = 0.0
    # accumulate per index so jsd(P,Q) and jsd(Q,P) add the same terms in the
    # same order: symmetry holds bitwise, not just within rounding
    for a, b in zip(pn, qn):
        mid = (a + b) / 2
        term = 0.0
        if a > 0:
            term += 0.5 * a * math.log2(a / mid)
        if b > 0:
            term += 0.5 * b * math.log2(b / mid)
        div += term
    return div


def shift_flags(
    class_counts: Mapping[str, Sequence[int]],
    totals: Sequence[int],
    buckets: Sequence[TimeBucket],
    window: int = 6,
    jsd_thresh: float = 0.25,
    min_total: int = 5,
) -> list[Flag]:
    """Flag buckets whose class mix diverges from the pooled trailing mix.

    The distribution runs over all five classes including Neutral; buckets
    with fewer than min_total posts are never flagged, and buckets whose
    entire trailing window is empty have no baseline to compare against.
    """
    if window < 2:
        raise ValueError("bad-window")
    keys = [c.value for c in ALL_CLASSES]
    flags: list[Flag] = []
    for t in range(window, len(totals)):
        if totals[t] < min_total:
            continue
        current = [float(class_counts[k][t]) for k in keys]
        pooled = [float(sum(class_counts[k][t - window : t])) for k in keys]
        if sum(current) == 0 or sum(pooled) == 0:
            continue
        value = jsd(current, pooled)
        if value >= jsd_thresh:
            flags.append(Flag(t, buckets[t].start, "jsd", None, value, jsd_thresh))
    return flags


@dataclass(frozen=True)
class DeviationReport:
    user_id: str
    config: DetectorConfig
    flags: tuple[Flag, ...]


def build_report(user_id: str, flags: Iterable[Flag], config: DetectorConfig) -> DeviationReport:
    ordered = sorted(flags, key=Flag.sort_key)
    seen = set()
    for flag in ordered:
        key = flag.sort_key()
        if key in seen:
            raise ValueError("duplicate-flag")
        seen.add(key)
    return DeviationReport(user_id, config, tuple(ordered))


def report_to_dict(report: DeviationReport, granularity: str) -> dict:
    return {
        "user_id": report.user_id,
        "config": {
            "granularity": granularity,
            "window": report.config.window,
            "z_thresh": report.config.z_thresh,
            "jsd_thresh": report.config.jsd_thresh,
            "min_hits": report.config.min_hits,
            "min_total": report.config.min_total,
        },
        "flags": [
            {
                "bucket_index": f.bucket_index,
                "bucket_start": f.bucket_start.date().isoformat(),
                "signal": f.signal,
                "class": f.class_key,
                "value": f.value,
                "threshold": f.threshold,
                "severity": f.severity,
            }
            for f in report.flags
        ],
    }


def write_series_csv(path: str | Path, series_list: Sequence[BucketSeries]) -> None:
    """Bit-exact series export: one row per (bucket, class), proportions with
    exactly six decimals (half-even, from the binary double)."""
    by_key = {series.class_key: series for series in series_list}
    ordered = [by_key[key] for key in SERIES_CLASS_KEYS if key in by_key]
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SERIES_HEADER)
        if not ordered:
            return
        n_buckets = len(ordered[0].buckets)
        for i in range(n_buckets):
            for series in ordered:
                proportion = series.counts[i] / series.totals[i] if series.totals[i] else 0.0
                writer.writerow(
                    [
                        series.buckets[i].key,
                        series.class_key,
                        series.counts[i],
                        series.totals[i],
                        f"{proportion:.6f}",
                    ]
                )


@dataclass
class SeriesTable:
    """Parsed series.csv: bucket starts plus per-class count columns."""

    bucket_starts: list[str]
    counts: dict[str, list[int]]
    totals: list[int]

    def to_series(self, class_key: str, scope: str, granularity: str) -> BucketSeries:
        buckets = [
            TimeBucket(
                datetime.fromisoformat(day).replace(tzinfo=timezone.utc), i, granularity
            )
            for i, day in enumerate(self.bucket_starts)
        ]
        return BucketSeries(scope, class_key, buckets, list(self.counts[class_key]), list(self.totals))


def read_series_csv(path: str | Path) -> SeriesTable:
    bucket_starts: list[str] = []
    counts: dict[str, list[int]] = {key: [] for key in SERIES_CLASS_KEYS}
    totals: list[int] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != SERIES_HEADER:
            raise ValueError(f"unexpected series CSV header: {header!r}")
        for row in reader:
            day, class_key, count, total = row[0], row[1], int(row[2]), int(row[3])
            if not bucket_starts or bucket_starts[-1] != day:
                bucket_starts.append(day)
                totals.append(total)
            counts[class_key].append(count)
    return SeriesTable(bucket_starts, counts, totals)
