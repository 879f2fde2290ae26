import json
import random
from datetime import date

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

import councilkit.store as store_mod
from councilkit.errors import (
    CorruptArchive,
    NotFound,
    UnknownCollection,
    UnknownInstance,
    UnsupportedVersion,
)
from councilkit.store import (
    Store,
    dataset_stats,
    dump_json,
    export_zip,
    import_zip,
    instance_slugs,
)


def _event_doc(event_id, slug="alpha-city", when="2021-06-01T14:00:00Z", body="Full Council"):
    return {
        "id": event_id,
        "instance_slug": slug,
        "body": {"name": body},
        "session_datetime": when,
        "video_uri": f"https://media.example/{event_id}.mp4",
        "static_thumbnail_ref": None,
        "keywords": [],
    }


class TestPutGetList:
    def test_round_trip(self, tmp_path):
        store = Store(tmp_path)
        doc = _event_doc("ev1")
        store.put("events", "ev1", doc)
        assert store.get("events", "ev1") == doc

    def test_get_unknown_id(self, tmp_path):
        with pytest.raises(NotFound):
            Store(tmp_path).get("events", "nope")

    def test_unknown_collection(self, tmp_path):
        with pytest.raises(UnknownCollection):
            Store(tmp_path).put("nonsense", "x", {})

    def test_list_sorted(self, tmp_path):
        store = Store(tmp_path)
        for event_id in ("b", "c", "a"):
            store.put("events", event_id, _event_doc(event_id))
        assert store.list("events") == ["a", "b", "c"]

    def test_put_if_changed_skips_identical(self, tmp_path):
        store = Store(tmp_path)
        doc = _event_doc("ev1")
        assert store.put_if_changed("events", "ev1", doc) is True
        before = (tmp_path / "events" / "ev1.json").stat().st_mtime_ns
        assert store.put_if_changed("events", "ev1", dict(doc)) is False
        assert (tmp_path / "events" / "ev1.json").stat().st_mtime_ns == before

    def test_put_if_changed_ignores_fields(self, tmp_path):
        store = Store(tmp_path)
        store.put("transcripts", "t", {"event_id": "t", "created_at": "x", "sentences": []})
        changed = store.put_if_changed(
            "transcripts",
            "t",
            {"event_id": "t", "created_at": "y", "sentences": []},
            ignore_fields=("created_at",),
        )
        assert changed is False
        assert store.get("transcripts", "t")["created_at"] == "x"


class TestCrashConsistency:
    def test_kill_between_write_and_rename(self, tmp_path):
        store = Store(tmp_path)
        old = _event_doc("ev1")
        store.put("events", "ev1", old)

        class Boom(RuntimeError):
            pass

        def crash(tmp_file):
            raise Boom()

        rng = random.Random(7)
        for trial in range(100):
            new = _event_doc("ev1", body=f"Committee {rng.randint(0, 10**9)}")
            store_mod._pre_rename_hook = crash
            try:
                with pytest.raises(Boom):
                    store.put("events", "ev1", new)
            finally:
                store_mod._pre_rename_hook = None
            on_disk = store.get("events", "ev1")
            assert on_disk == old  # never partial, never the torn write
            json.loads((tmp_path / "events" / "ev1.json").read_text())

    def test_temp_files_invisible_to_list(self, tmp_path):
        store = Store(tmp_path)
        store.put("events", "ev1", _event_doc("ev1"))
        store_mod._pre_rename_hook = lambda tmp: (_ for _ in ()).throw(RuntimeError)
        try:
            with pytest.raises(RuntimeError):
                store.put("events", "ev2", _event_doc("ev2"))
        finally:
            store_mod._pre_rename_hook = None
        assert store.list("events") == ["ev1"]


class TestStats:
    def test_fixture_dates(self, tmp_path):
        store = Store(tmp_path)
        for i, when in enumerate(
            ["2021-01-04T09:00:00Z", "2021-06-01T09:00:00Z", "2022-03-29T09:00:00Z"]
        ):
            store.put("events", f"ev{i}", _event_doc(f"ev{i}", when=when))
        manifest = dataset_stats(store, "alpha-city")
        assert manifest.event_count == 3
        assert manifest.first_event == date(2021, 1, 4)
        assert manifest.last_event == date(2022, 3, 29)

    def test_no_events(self, tmp_path):
        manifest = dataset_stats(Store(tmp_path), "ghost")
        assert (manifest.event_count, manifest.first_event, manifest.last_event) == (0, None, None)

    def test_single_event(self, tmp_path):
        store = Store(tmp_path)
        store.put("events", "ev", _event_doc("ev"))
        manifest = dataset_stats(store, "alpha-city")
        assert manifest.first_event == manifest.last_event


class TestZipRoundTrip:
    def _populate(self, store, slug, count):
        for i in range(count):
            event_id = f"{slug}-ev{i}"
            store.put("events", event_id, _event_doc(event_id, slug=slug))
            store.put(
                "transcripts",
                event_id,
                {"event_id": event_id, "generator": "captions:webvtt",
                 "created_at": "2021-06-01T14:00:00Z",
                 "sentences": [{"index": 0, "start_time": 0.0, "end_time": 1.0, "text": "Hi."}]},
            )
            store.put(
                "minutes_items",
                f"{event_id}:0001",
                {"event_id": event_id, "ordinal": 1, "name": "CB 1", "matter_id": None,
                 "decision": None, "votes": []},
            )

    def test_round_trip_identity(self, tmp_path):
        source = Store(tmp_path / "src")
        self._populate(source, "alpha-city", 3)
        self._populate(source, "beta-county", 2)
        archive = export_zip(source, ["alpha-city", "beta-county"], tmp_path / "out.zip")

        target = Store(tmp_path / "dst")
        import_zip(archive, target)
        for collection in ("events", "transcripts", "minutes_items"):
            assert target.list(collection) == source.list(collection)
            for doc_id in source.list(collection):
                assert target.get(collection, doc_id) == source.get(collection, doc_id)

    def test_export_selected_instance_only(self, tmp_path):
        source = Store(tmp_path / "src")
        self._populate(source, "alpha-city", 2)
        self._populate(source, "beta-county", 2)
        archive = export_zip(source, ["alpha-city"], tmp_path / "out.zip")
        target = Store(tmp_path / "dst")
        import_zip(archive, target)
        assert instance_slugs(target) == ["alpha-city"]

    def test_unknown_instance(self, tmp_path):
        store = Store(tmp_path / "src")
        with pytest.raises(UnknownInstance):
            export_zip(store, ["ghost"], tmp_path / "out.zip")

    def test_manifest_payload_mismatch(self, tmp_path):
        import zipfile

        source = Store(tmp_path / "src")
        self._populate(source, "alpha-city", 3)
        archive = export_zip(source, ["alpha-city"], tmp_path / "out.zip")
        # drop one event file
        trimmed = tmp_path / "trimmed.zip"
        with zipfile.ZipFile(archive) as zin, zipfile.ZipFile(trimmed, "w") as zout:
            for name in zin.namelist():
                if name.endswith("ev2.json") and "/events/" in name:
                    continue
                zout.writestr(name, zin.read(name))
        with pytest.raises(CorruptArchive):
            import_zip(trimmed, Store(tmp_path / "dst"))

    def test_unsupported_version(self, tmp_path):
        import zipfile

        bad = tmp_path / "bad.zip"
        with zipfile.ZipFile(bad, "w") as zf:
            zf.writestr("manifest.json", dump_json({"format_version": 99, "instances": []}))
        with pytest.raises(UnsupportedVersion):
            import_zip(bad, Store(tmp_path / "dst"))

    def test_export_deterministic_bytes(self, tmp_path):
        source = Store(tmp_path / "src")
        self._populate(source, "alpha-city", 2)
        a = export_zip(source, ["alpha-city"], tmp_path / "a.zip").read_bytes()
        b = export_zip(source, ["alpha-city"], tmp_path / "b.zip").read_bytes()
        assert a == b


_doc_values = st.dictionaries(
    st.sampled_from(["note", "tag", "extra"]),
    st.one_of(st.text(max_size=10), st.integers(), st.none()),
    max_size=3,
)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    events=st.dictionaries(
        st.text(alphabet="abcdef123", min_size=3, max_size=8), _doc_values, min_size=0, max_size=6
    )
)
def test_zip_round_trip_property(tmp_path, events):
    import shutil

    base = tmp_path / str(random.randrange(10**9))
    source = Store(base / "src")
    for i, (suffix, extra) in enumerate(sorted(events.items())):
        doc = _event_doc(f"ev-{suffix}", slug="alpha-city")
        doc.update(extra)
        source.put("events", f"ev-{suffix}", doc)
    if events:
        archive = export_zip(source, ["alpha-city"], base / "out.zip")
        target = Store(base / "dst")
        import_zip(archive, target)
        assert [
            (i, target.get("events", i)) for i in target.list("events")
        ] == [(i, source.get("events", i)) for i in source.list("events")]
    shutil.rmtree(base, ignore_errors=True)
