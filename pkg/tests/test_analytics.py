"""Usage-series tests; daily_usage is checked against a brute-force recount."""

import io
from collections import Counter
from datetime import date

import pytest
from hypothesis import given, strategies as st

from councilkit.analytics import (
    UsagePoint,
    UsageSeries,
    aggregate,
    daily_usage,
    pool_instances,
    series_to_payload,
    write_series_csv,
)
from councilkit.errors import GramArityMismatch, GramMismatch, UnknownInstance
from councilkit.models import (
    Body,
    Event,
    Sentence,
    Transcript,
    event_to_doc,
    parse_utc,
    transcript_to_doc,
)
from councilkit.stem import stem
from councilkit.store import Store
from councilkit.textproc import ngrams, tokenize


def _seed_store(tmp_path, events):
    """events: list of (event_id, iso_datetime, [sentence texts])."""
    store = Store(tmp_path)
    for event_id, when, sentences in events:
        event = Event(
            id=event_id,
            instance_slug="alpha-city",
            body=Body("Full Council"),
            session_datetime=parse_utc(when),
            video_uri=f"https://media.example/{event_id}.mp4",
        )
        store.put("events", event_id, event_to_doc(event))
        transcript = Transcript(
            event_id=event_id,
            generator="captions:webvtt",
            created_at=parse_utc(when),
            sentences=tuple(
                Sentence(i, float(i), float(i + 1), text) for i, text in enumerate(sentences)
            ),
        )
        store.put("transcripts", event_id, transcript_to_doc(transcript))
    return store


def brute_force_daily(store, instance, query, n, date_range):
    """Independent recount: walks raw documents, re-tokenizes, re-stems."""
    target = " ".join(stem(t) for t in tokenize(query))
    by_day = {}
    for event_id, doc in store.iter_docs("events"):
        if doc["instance_slug"] != instance:
            continue
        day = date.fromisoformat(doc["session_datetime"][:10])
        if not (date_range[0] <= day <= date_range[1]):
            continue
        counter = by_day.setdefault(day, Counter())
        if store.exists("transcripts", event_id):
            tdoc = store.get("transcripts", event_id)
            for sentence in tdoc["sentences"]:
                grams = ngrams([stem(t) for t in tokenize(sentence["text"])], n)
                counter.update(grams)
    points = []
    for day in sorted(by_day):
        total = sum(by_day[day].values())
        if total == 0:
            continue
        count = by_day[day][target]
        points.append((day, count, total, 100.0 * count / total))
    return points


class TestDailyUsage:
    def test_fifty_percent(self, tmp_path):
        store = _seed_store(
            tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["a b a c"])]
        )
        series = daily_usage(
            store, "alpha-city", "a", 1, (date(2021, 5, 1), date(2021, 5, 1))
        )
        assert len(series.points) == 1
        point = series.points[0]
        assert (point.count, point.total, point.percent) == (2, 4, 50.0)

    def test_absent_gram_keeps_zero_point(self, tmp_path):
        store = _seed_store(tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["b c d"])])
        series = daily_usage(
            store, "alpha-city", "zebra", 1, (date(2021, 5, 1), date(2021, 5, 2))
        )
        assert [p.percent for p in series.points] == [0.0]

    def test_empty_date_range(self, tmp_path):
        store = _seed_store(tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["b c"])])
        series = daily_usage(
            store, "alpha-city", "b", 1, (date(2021, 6, 1), date(2021, 6, 2))
        )
        assert series.points == ()

    def test_arity_mismatch(self, tmp_path):
        store = _seed_store(tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["b c"])])
        with pytest.raises(GramArityMismatch):
            daily_usage(store, "alpha-city", "two words", 1, (date(2021, 5, 1), date(2021, 5, 2)))

    def test_unknown_instance(self, tmp_path):
        store = _seed_store(tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["b c"])])
        with pytest.raises(UnknownInstance):
            daily_usage(store, "ghost", "b", 1, (date(2021, 5, 1), date(2021, 5, 2)))

    def test_query_is_stemmed(self, tmp_path):
        store = _seed_store(
            tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["policing police policy"])]
        )
        series = daily_usage(
            store, "alpha-city", "police", 1, (date(2021, 5, 1), date(2021, 5, 1))
        )
        point = series.points[0]
        assert series.gram == "polic"
        assert (point.count, point.total) == (2, 3)

    def test_same_day_sessions_merge(self, tmp_path):
        store = _seed_store(
            tmp_path,
            [
                ("ev1", "2021-05-01T09:00:00Z", ["a b"]),
                ("ev2", "2021-05-01T14:00:00Z", ["a c c"]),
            ],
        )
        series = daily_usage(
            store, "alpha-city", "a", 1, (date(2021, 5, 1), date(2021, 5, 1))
        )
        assert len(series.points) == 1
        assert (series.points[0].count, series.points[0].total) == (2, 5)

    def test_bigrams_do_not_cross_sentences(self, tmp_path):
        store = _seed_store(
            tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["middle housing", "housing middle"])]
        )
        series = daily_usage(
            store, "alpha-city", "housing middle", 2, (date(2021, 5, 1), date(2021, 5, 1))
        )
        point = series.points[0]
        # each sentence yields exactly one bigram window
        assert point.total == 2
        assert point.count == 1

    def test_matches_brute_force(self, tmp_path):
        store = _seed_store(
            tmp_path,
            [
                ("ev1", "2021-05-01T09:00:00Z", ["police housing police.", "union vote"]),
                ("ev2", "2021-05-01T14:00:00Z", ["housing housing budget"]),
                ("ev3", "2021-05-03T10:00:00Z", ["police policy policing"]),
            ],
        )
        span = (date(2021, 5, 1), date(2021, 5, 31))
        for query, n in [("police", 1), ("housing", 1), ("police housing", 2)]:
            series = daily_usage(store, "alpha-city", query, n, span)
            expected = brute_force_daily(store, "alpha-city", query, n, span)
            assert [
                (p.date, p.count, p.total, p.percent) for p in series.points
            ] == expected

    def test_partition_property(self, tmp_path):
        # summing counts over every distinct unigram stem reproduces the total
        store = _seed_store(
            tmp_path, [("ev1", "2021-05-01T10:00:00Z", ["police housing police union vote"])]
        )
        span = (date(2021, 5, 1), date(2021, 5, 1))
        stems = {stem(t) for t in "police housing union vote".split()}
        total = None
        counted = 0
        for target in stems:
            series = daily_usage(store, "alpha-city", target, 1, span)
            point = series.points[0]
            counted += point.count
            total = point.total
        assert counted == total == 5


class TestPooling:
    def _series(self, instance, gram, points):
        return UsageSeries(
            instance,
            gram,
            1,
            tuple(
                UsagePoint(day, gram, count, total, 100.0 * count / total)
                for day, count, total in points
            ),
        )

    def test_pooled_ratio_not_percentage_average(self):
        day = date(2021, 5, 1)
        a = self._series("alpha-city", "polic", [(day, 2, 10)])
        b = self._series("beta-county", "polic", [(day, 3, 40)])
        pooled = pool_instances([a, b])
        point = pooled.points[0]
        assert (point.count, point.total) == (5, 50)
        assert point.percent == 10.0
        mean_of_percents = (20.0 + 7.5) / 2
        assert mean_of_percents == 13.75
        assert point.percent != mean_of_percents

    def test_single_series_identity(self):
        a = self._series("alpha-city", "polic", [(date(2021, 5, 1), 2, 10)])
        pooled = pool_instances([a])
        assert pooled.points == a.points
        assert pooled.instance_slug == "pooled"

    def test_disjoint_dates_union(self):
        a = self._series("alpha-city", "polic", [(date(2021, 5, 1), 1, 10)])
        b = self._series("beta-county", "polic", [(date(2021, 5, 2), 2, 10)])
        pooled = pool_instances([a, b])
        assert [(p.date, p.count, p.total) for p in pooled.points] == [
            (date(2021, 5, 1), 1, 10),
            (date(2021, 5, 2), 2, 10),
        ]

    def test_gram_mismatch(self):
        a = self._series("alpha-city", "polic", [(date(2021, 5, 1), 1, 10)])
        b = self._series("beta-county", "hous", [(date(2021, 5, 1), 1, 10)])
        with pytest.raises(GramMismatch):
            pool_instances([a, b])

    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=50), st.integers(min_value=1, max_value=500)
            ).filter(lambda ct: ct[0] <= ct[1]),
            min_size=1,
            max_size=4,
        )
    )
    def test_pooling_conservation(self, rows):
        day = date(2021, 5, 1)
        series_list = [
            self._series(f"i{i}", "polic", [(day, count, total)])
            for i, (count, total) in enumerate(rows)
        ]
        pooled = pool_instances(series_list)
        point = pooled.points[0]
        assert point.count == sum(c for c, _ in rows)
        assert point.total == sum(t for _, t in rows)
        assert point.percent == pytest.approx(100.0 * point.count / point.total)


class TestAggregate:
    def _daily(self, day_percent_pairs, gram="polic"):
        return UsageSeries(
            "alpha-city",
            gram,
            1,
            tuple(
                UsagePoint(day, gram, int(pct), 100, pct) for day, pct in day_percent_pairs
            ),
        )

    def test_monthly_mean(self):
        series = self._daily([(date(2021, 1, 5), 0.3), (date(2021, 1, 20), 0.5)])
        monthly = aggregate(series, "monthly")
        assert len(monthly.points) == 1
        assert monthly.points[0].date == date(2021, 1, 1)
        assert monthly.points[0].percent == pytest.approx(0.4)

    def test_monthly_splits_months(self):
        series = self._daily(
            [(date(2021, 1, 5), 1.0), (date(2021, 2, 5), 3.0), (date(2021, 2, 20), 5.0)]
        )
        monthly = aggregate(series, "monthly")
        assert [(p.date, p.percent) for p in monthly.points] == [
            (date(2021, 1, 1), 1.0),
            (date(2021, 2, 1), 4.0),
        ]

    def test_rolling_mean(self):
        series = self._daily(
            [
                (date(2021, 1, 1), 1.0),
                (date(2021, 1, 2), 2.0),
                (date(2021, 1, 3), 3.0),
                (date(2021, 1, 4), 4.0),
            ]
        )
        rolled = aggregate(series, "rolling:3")
        assert [p.percent for p in rolled.points] == [1.0, 1.5, 2.0, 3.0]

    def test_empty_series(self):
        empty = UsageSeries("alpha-city", "polic", 1, ())
        assert aggregate(empty, "monthly").points == ()
        assert aggregate(empty, "rolling:3").points == ()

    def test_monthly_of_constant_is_constant(self):
        series = self._daily([(date(2021, 1, d), 2.5) for d in (3, 10, 17, 24)])
        monthly = aggregate(series, "monthly")
        assert [p.percent for p in monthly.points] == [2.5]


class TestExport:
    def test_csv_columns_and_rows(self):
        series = UsageSeries(
            "alpha-city", "polic", 1, (UsagePoint(date(2021, 5, 1), "polic", 2, 10, 20.0),)
        )
        buffer = io.StringIO()
        write_series_csv([series], buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "instance,gram,date,count,total,percent"
        assert lines[1] == "alpha-city,polic,2021-05-01,2,10,20.0"

    def test_csv_quotes_commas(self):
        series = UsageSeries(
            "alpha-city", 'odd,"gram"', 1, (UsagePoint(date(2021, 5, 1), 'odd,"gram"', 1, 2, 50.0),)
        )
        buffer = io.StringIO()
        write_series_csv([series], buffer)
        assert '"odd,""gram"""' in buffer.getvalue().splitlines()[1]

    def test_empty_list_header_only(self):
        buffer = io.StringIO()
        write_series_csv([], buffer)
        assert buffer.getvalue() == "instance,gram,date,count,total,percent\n"

    def test_json_payload_mirrors_series(self):
        series = UsageSeries(
            "alpha-city", "polic", 1, (UsagePoint(date(2021, 5, 1), "polic", 2, 10, 20.0),)
        )
        payload = series_to_payload([series])
        assert payload == {
            "series": [
                {
                    "instance_slug": "alpha-city",
                    "gram": "polic",
                    "n": 1,
                    "points": [
                        {"date": "2021-05-01", "count": 2, "total": 10, "percent": 20.0}
                    ],
                }
            ]
        }
