"""Stemmed n-gram usage time series across one or more council instances.

A day's usage of a gram is 100 * count / total where count is how often the
stemmed query gram occurred in that UTC day's transcripts and total is every
n-gram of that size uttered that day. N-gram windows stay inside sentence
boundaries. Cross-instance pooling sums raw counts and totals per date and
recomputes the percentage — never averages percentages.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from typing import Iterable, TextIO

from .errors import GramArityMismatch, GramMismatch, UnknownInstance
from .models import Transcript, parse_utc, transcript_from_doc
from .store import Store
from .textproc import ngrams, stem_tokens, tokenize

POOLED = "pooled"


@dataclass(frozen=True)
class UsagePoint:
    date: date
    gram: str
    count: int
    total: int
    percent: float


@dataclass(frozen=True)
class UsageSeries:
    instance_slug: str  # a real slug or "pooled"
    gram: str           # stemmed, space-joined
    n: int
    points: tuple[UsagePoint, ...] = ()


def stemmed_query_gram(query_gram: str, n: int) -> str:
    tokens = tokenize(query_gram)
    if len(tokens) != n:
        raise GramArityMismatch(query_gram, n, len(tokens))
    return " ".join(stem_tokens(tokens))


def transcript_day_grams(transcript: Transcript, n: int) -> list[str]:
    """All stemmed n-grams of one transcript; windows don't cross sentences."""
    grams: list[str] = []
    for sentence in transcript.sentences:
        grams.extend(ngrams(stem_tokens(tokenize(sentence.text)), n))
    return grams


def daily_usage(
    store: Store,
    instance_slug: str,
    query_gram: str,
    n: int,
    date_range: tuple[date, date],
) -> UsageSeries:
    """Per-day usage of the stemmed query gram for one instance.

    Days without sessions (or whose transcripts yield no n-grams of size n)
    are omitted; a session day where the gram never occurs keeps a 0.0 point.
    """
    target = stemmed_query_gram(query_gram, n)
    date_from, date_to = date_range

    events_by_day: dict[date, list[str]] = defaultdict(list)
    instance_seen = False
    for event_id, doc in store.iter_docs("events"):
        if doc["instance_slug"] != instance_slug:
            continue
        instance_seen = True
        day = parse_utc(doc["session_datetime"]).date()
        if date_from <= day <= date_to:
            events_by_day[day].append(event_id)
    if not instance_seen:
        raise UnknownInstance(instance_slug)

    points = []
    for day in sorted(events_by_day):
        count = 0
        total = 0
        for event_id in events_by_day[day]:
            if not store.exists("transcripts", event_id):
                continue
            transcript = transcript_from_doc(store.get("transcripts", event_id))
            grams = transcript_day_grams(transcript, n)
            total += len(grams)
            count += sum(1 for gram in grams if gram == target)
        if total == 0:
            continue
        points.append(UsagePoint(day, target, count, total, 100.0 * count / total))
    return UsageSeries(instance_slug, target, n, tuple(points))


def pool_instances(series_list: list[UsageSeries]) -> UsageSeries:
    """Combine same-gram series by summing counts and totals per date."""
    if not series_list:
        raise GramMismatch("nothing to pool")
    gram = series_list[0].gram
    n = series_list[0].n
    for series in series_list[1:]:
        if series.gram != gram or series.n != n:
            raise GramMismatch(f"cannot pool {series.gram!r} (n={series.n}) with {gram!r} (n={n})")

    counts: dict[date, int] = defaultdict(int)
    totals: dict[date, int] = defaultdict(int)
    for series in series_list:
        for point in series.points:
            counts[point.date] += point.count
            totals[point.date] += point.total
    points = tuple(
        UsagePoint(day, gram, counts[day], totals[day], 100.0 * counts[day] / totals[day])
        for day in sorted(counts)
        if totals[day] > 0
    )
    return UsageSeries(POOLED, gram, n, points)


def aggregate(series: UsageSeries, mode: str) -> UsageSeries:
    """Aggregate a daily series: "monthly" or "rolling:<window>".

    Monthly points sit at the month start with percent = mean of that month's
    daily percents (count/total carry the month's sums for reference, so the
    ratio invariant holds for daily series only). Rolling points keep their
    own date and count/total; percent becomes the trailing mean over up to
    <window> most recent points.
    """
    if mode == "monthly":
        buckets: dict[date, list[UsagePoint]] = defaultdict(list)
        for point in series.points:
            buckets[point.date.replace(day=1)].append(point)
        monthly = []
        for month in sorted(buckets):
            group = buckets[month]
            monthly.append(
                UsagePoint(
                    month,
                    series.gram,
                    sum(p.count for p in group),
                    sum(p.total for p in group),
                    sum(p.percent for p in group) / len(group),
                )
            )
        return UsageSeries(series.instance_slug, series.gram, series.n, tuple(monthly))

    if mode.startswith("rolling:"):
        window = int(mode.split(":", 1)[1])
        if window < 1:
            raise ValueError("rolling window must be >= 1")
        percents = [p.percent for p in series.points]
        points = tuple(
            UsagePoint(
                p.date,
                p.gram,
                p.count,
                p.total,
                sum(percents[max(0, i - window + 1) : i + 1])
                / len(percents[max(0, i - window + 1) : i + 1]),
            )
            for i, p in enumerate(series.points)
        )
        return UsageSeries(series.instance_slug, series.gram, series.n, points)

    raise ValueError(f"unknown aggregate mode: {mode!r}")


# --- export ---------------------------------------------------------------------

CSV_COLUMNS = ("instance", "gram", "date", "count", "total", "percent")


def write_series_csv(series_list: Iterable[UsageSeries], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for series in series_list:
        for point in series.points:
            writer.writerow(
                [
                    series.instance_slug,
                    series.gram,
                    point.date.isoformat(),
                    point.count,
                    point.total,
                    repr(point.percent),
                ]
            )


def series_to_payload(series_list: Iterable[UsageSeries]) -> dict:
    return {
        "series": [
            {
                "instance_slug": series.instance_slug,
                "gram": series.gram,
                "n": series.n,
                "points": [
                    {
                        "date": point.date.isoformat(),
                        "count": point.count,
                        "total": point.total,
                        "percent": point.percent,
                    }
                    for point in series.points
                ],
            }
            for series in series_list
        ]
    }


def export_series(
    series_list: list[UsageSeries], fmt: str, out: TextIO
) -> None:
    """Write series as csv (instance,gram,date,count,total,percent) or json."""
    if fmt == "csv":
        write_series_csv(series_list, out)
    elif fmt == "json":
        from .store import dump_json

        out.write(dump_json(series_to_payload(series_list)))
    else:
        raise ValueError(f"unknown export format: {fmt!r}")


def series_csv_text(series_list: list[UsageSeries]) -> str:
    buffer = io.StringIO()
    write_series_csv(series_list, buffer)
    return buffer.getvalue()
