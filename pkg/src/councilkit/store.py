"""Plain-file document store with atomic writes and ZIP dataset exchange.

Layout: <root>/<collection>/<id>.json, one canonical JSON document per file.
Documents are diffable on purpose; the inverted index under <root>/index/ is
the only multi-document structure (see the index module).
"""

from __future__ import annotations

import json
import os
import threading
import zipfile
from datetime import date
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from .errors import (
    CorruptArchive,
    NotFound,
    UnknownCollection,
    UnknownInstance,
    UnsupportedVersion,
)
from .models import InstanceManifest, manifest_from_doc, manifest_from_dates, manifest_to_doc, parse_utc

COLLECTIONS = ("events", "transcripts", "minutes_items", "matters", "manifest")

ARCHIVE_FORMAT_VERSION = 1

# Test seam: called between writing a temp file and renaming it into place.
# Raising here simulates a crash mid-put; the store must never expose a torn
# document.
_pre_rename_hook: Optional[Callable[[Path], None]] = None


def dump_json(payload: Any) -> str:
    """Canonical JSON used everywhere a document or API body is serialized."""
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def dump_json_bytes(payload: Any) -> bytes:
    return dump_json(payload).encode("utf-8")


class Store:
    """Document store; concurrent readers, single writer per key."""

    def __init__(self, root: str | os.PathLike[str]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[tuple[str, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _collection_dir(self, collection: str) -> Path:
        if collection not in COLLECTIONS:
            raise UnknownCollection(collection)
        return self.root / collection

    def _doc_path(self, collection: str, doc_id: str) -> Path:
        if not doc_id:
            raise NotFound(collection, doc_id)
        return self._collection_dir(collection) / f"{doc_id}.json"

    def _lock_for(self, collection: str, doc_id: str) -> threading.Lock:
        key = (collection, doc_id)
        with self._locks_guard:
            if key not in self._locks:
                self._locks[key] = threading.Lock()
            return self._locks[key]

    def put(self, collection: str, doc_id: str, doc: dict[str, Any]) -> None:
        path = self._doc_path(collection, doc_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        data = dump_json_bytes(doc)
        with self._lock_for(collection, doc_id):
            _atomic_write(path, data)

    def put_if_changed(
        self,
        collection: str,
        doc_id: str,
        doc: dict[str, Any],
        ignore_fields: tuple[str, ...] = (),
    ) -> bool:
        """Write unless an equal document (modulo *ignore_fields*) exists.

        Keeps re-ingestion byte-identical: volatile fields like created_at are
        not rewritten when nothing of substance changed.
        """
        try:
            existing = self.get(collection, doc_id)
        except NotFound:
            self.put(collection, doc_id, doc)
            return True
        strip = lambda d: {k: v for k, v in d.items() if k not in ignore_fields}
        if strip(existing) == strip(doc):
            return False
        self.put(collection, doc_id, doc)
        return True

    def get(self, collection: str, doc_id: str) -> dict[str, Any]:
        path = self._doc_path(collection, doc_id)
        try:
            return json.loads(path.read_text("utf-8"))
        except FileNotFoundError:
            raise NotFound(collection, doc_id) from None

    def exists(self, collection: str, doc_id: str) -> bool:
        return self._doc_path(collection, doc_id).is_file()

    def list(self, collection: str) -> list[str]:
        directory = self._collection_dir(collection)
        if not directory.is_dir():
            return []
        return sorted(p.stem for p in directory.glob("*.json"))

    def iter_docs(self, collection: str) -> Iterable[tuple[str, dict[str, Any]]]:
        for doc_id in self.list(collection):
            yield doc_id, self.get(collection, doc_id)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp-{os.urandom(6).hex()}")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    if _pre_rename_hook is not None:
        _pre_rename_hook(tmp)
    os.replace(tmp, path)


# --- per-instance statistics ---------------------------------------------------


def instance_slugs(store: Store) -> list[str]:
    slugs = {doc["instance_slug"] for _, doc in store.iter_docs("events")}
    return sorted(slugs)


def dataset_stats(store: Store, instance_slug: str) -> InstanceManifest:
    """Event count plus first/last session dates for one instance."""
    dates: list[date] = []
    for _, doc in store.iter_docs("events"):
        if doc["instance_slug"] == instance_slug:
            dates.append(parse_utc(doc["session_datetime"]).date())
    return manifest_from_dates(instance_slug, dates)


def refresh_manifests(store: Store) -> list[InstanceManifest]:
    """Recompute and persist the manifest collection for every instance."""
    manifests = [dataset_stats(store, slug) for slug in instance_slugs(store)]
    for manifest in manifests:
        store.put("manifest", manifest.instance_slug, manifest_to_doc(manifest))
    return manifests


# --- ZIP dataset exchange ---------------------------------------------------------

_EXPORTED_COLLECTIONS = ("events", "transcripts", "minutes_items", "matters")


def _instance_of_doc(store: Store, collection: str, doc: dict[str, Any]) -> Optional[str]:
    if "instance_slug" in doc:
        return doc["instance_slug"]
    event_id = doc.get("event_id")
    if event_id and store.exists("events", event_id):
        return store.get("events", event_id)["instance_slug"]
    return None


def export_zip(store: Store, instances: list[str], out_path: str | os.PathLike[str]) -> Path:
    """Write selected instances to a ZIP archive: manifest.json + documents.

    The (rebuildable) search index is not exported; run the index command
    after importing.
    """
    known = set(instance_slugs(store))
    for slug in instances:
        if slug not in known:
            raise UnknownInstance(slug)
    selected = set(instances)

    entries: list[tuple[str, bytes]] = []
    manifests = []
    for slug in sorted(selected):
        manifests.append(manifest_to_doc(dataset_stats(store, slug)))
    entries.append(
        (
            "manifest.json",
            dump_json_bytes(
                {"format_version": ARCHIVE_FORMAT_VERSION, "instances": manifests}
            ),
        )
    )
    for collection in _EXPORTED_COLLECTIONS:
        for doc_id, doc in store.iter_docs(collection):
            slug = _instance_of_doc(store, collection, doc)
            if slug in selected:
                entries.append((f"{slug}/{collection}/{doc_id}.json", dump_json_bytes(doc)))

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(out, "w", compression=zipfile.ZIP_DEFLATED) as archive:
        for name, data in entries:
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            archive.writestr(info, data)
    return out


def import_zip(path: str | os.PathLike[str], store: Store) -> list[InstanceManifest]:
    """Load an exported archive; verifies version and manifest/payload agreement."""
    try:
        archive = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise CorruptArchive(f"unreadable archive: {exc}") from None
    with archive:
        try:
            manifest_doc = json.loads(archive.read("manifest.json"))
        except KeyError:
            raise CorruptArchive("archive has no manifest.json") from None
        except json.JSONDecodeError as exc:
            raise CorruptArchive(f"manifest.json unreadable: {exc}") from None
        version = manifest_doc.get("format_version")
        if version != ARCHIVE_FORMAT_VERSION:
            raise UnsupportedVersion(version)

        names = [n for n in archive.namelist() if n != "manifest.json" and not n.endswith("/")]
        manifests = [manifest_from_doc(d) for d in manifest_doc.get("instances", [])]
        for manifest in manifests:
            event_files = [
                n for n in names if n.startswith(f"{manifest.instance_slug}/events/")
            ]
            if len(event_files) != manifest.event_count:
                raise CorruptArchive(
                    f"manifest says {manifest.event_count} events for "
                    f"{manifest.instance_slug}, archive holds {len(event_files)}"
                )
        declared = {m.instance_slug for m in manifests}
        for name in names:
            parts = name.split("/")
            if len(parts) != 3 or parts[1] not in _EXPORTED_COLLECTIONS:
                raise CorruptArchive(f"unexpected archive entry: {name}")
            if parts[0] not in declared:
                raise CorruptArchive(f"entry for undeclared instance: {name}")

        for name in names:
            slug, collection, filename = name.split("/")
            try:
                doc = json.loads(archive.read(name))
            except json.JSONDecodeError as exc:
                raise CorruptArchive(f"{name} unreadable: {exc}") from None
            store.put(collection, filename[: -len(".json")], doc)
        for manifest in manifests:
            store.put("manifest", manifest.instance_slug, manifest_to_doc(manifest))
    return manifests
