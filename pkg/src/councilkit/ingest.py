"""Gatherer-feed loading, content-addressed asset caching, event ingestion.

The gatherer contract is data, not code: a JSON array of records whose fields
match the IngestionEvent names. Video bytes are not fetched unless configured;
caption and agenda assets are cached by content hash.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Optional
from urllib.parse import urljoin, urlparse
from urllib.request import url2pathname

from .captions import CaptionSource, detect_caption_format, transcribe
from .errors import (
    HashMismatch,
    MissingField,
    NetworkError,
    ParseError,
    SourceUnreachable,
)
from .models import (
    Event,
    Body,
    IngestionEvent,
    IngestionMinutesItem,
    IngestionVote,
    Matter,
    MinutesItem,
    Vote,
    canonical_event_id,
    event_from_doc,
    event_to_doc,
    format_utc,
    matter_from_doc,
    matter_to_doc,
    minutes_item_id,
    minutes_item_to_doc,
    parse_vote_decision,
    transcript_to_doc,
    validate_ingestion_event,
)
from .store import Store, dump_json_bytes

logger = logging.getLogger(__name__)

RETRY_ATTEMPTS = 3
RETRY_BASE_SECONDS = 1.0

Fetcher = Callable[[str], tuple[int, bytes]]


def default_fetcher(uri: str) -> tuple[int, bytes]:
    """GET a URI; file:// and bare paths read the local filesystem."""
    parsed = urlparse(uri)
    if parsed.scheme in ("", "file"):
        path = url2pathname(parsed.path) if parsed.scheme == "file" else uri
        try:
            return 200, Path(path).read_bytes()
        except FileNotFoundError:
            return 404, b""
        except OSError as exc:
            raise NetworkError(str(exc), uri) from None
    import requests

    response = requests.get(uri, timeout=30)
    return response.status_code, response.content


def fetch_with_retry(
    uri: str,
    fetcher: Fetcher,
    sleep: Callable[[float], None] = time.sleep,
) -> bytes:
    """Retrying GET: 3 attempts with exponential backoff from 1 s.

    Only transient failures (connection errors, 5xx) retry; 4xx fails fast.
    """
    last_status: int | str = "unreachable"
    for attempt in range(RETRY_ATTEMPTS):
        try:
            status, body = fetcher(uri)
        except NetworkError:
            raise
        except Exception as exc:  # connection-level failure
            last_status = str(exc)
            if attempt + 1 < RETRY_ATTEMPTS:
                sleep(RETRY_BASE_SECONDS * (2**attempt))
            continue
        if status == 200:
            return body
        if 400 <= status < 500:
            raise NetworkError(status, uri)
        last_status = status
        if attempt + 1 < RETRY_ATTEMPTS:
            sleep(RETRY_BASE_SECONDS * (2**attempt))
    raise NetworkError(last_status, uri)


class AssetCache:
    """Content-addressed byte store with a uri -> digest map.

    Objects live at objects/<sha256>; refetching a mapped URI verifies the
    stored bytes instead of hitting the network again.
    """

    def __init__(
        self,
        root: str | Path,
        fetcher: Fetcher = default_fetcher,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc),
    ):
        self.root = Path(root)
        (self.root / "objects").mkdir(parents=True, exist_ok=True)
        (self.root / "uris").mkdir(parents=True, exist_ok=True)
        (self.root / "event_assets").mkdir(parents=True, exist_ok=True)
        self.fetcher = fetcher
        self.sleep = sleep
        self.clock = clock
        self.transfer_count = 0

    def _uri_entry_path(self, uri: str) -> Path:
        key = hashlib.sha256(uri.encode("utf-8")).hexdigest()[:24]
        return self.root / "uris" / f"{key}.json"

    def object_path(self, content_hash: str) -> Path:
        return self.root / "objects" / content_hash

    def fetch(self, uri: str) -> tuple[str, Path]:
        """Return (content_hash, local path), downloading at most once."""
        entry_path = self._uri_entry_path(uri)
        if entry_path.is_file():
            entry = json.loads(entry_path.read_text("utf-8"))
            stored = self.object_path(entry["content_hash"])
            if stored.is_file():
                actual = hashlib.sha256(stored.read_bytes()).hexdigest()
                if actual != entry["content_hash"]:
                    raise HashMismatch(entry["content_hash"], actual)
                return entry["content_hash"], stored

        body = fetch_with_retry(uri, self.fetcher, self.sleep)
        self.transfer_count += 1
        content_hash = hashlib.sha256(body).hexdigest()
        stored = self.object_path(content_hash)
        if not stored.is_file():
            tmp = stored.with_name(f".{content_hash}.tmp")
            tmp.write_bytes(body)
            tmp.replace(stored)
        entry = {
            "content_hash": content_hash,
            "source_uri": uri,
            "byte_length": len(body),
            "fetched_at": format_utc(self.clock()),
        }
        tmp_entry = entry_path.with_name(f".{entry_path.name}.tmp")
        tmp_entry.write_bytes(dump_json_bytes(entry))
        tmp_entry.replace(entry_path)
        return content_hash, stored

    def audit(self) -> list[str]:
        """Re-hash every cached object; returns digests that fail verification."""
        bad = []
        for path in sorted((self.root / "objects").iterdir()):
            if path.name.startswith("."):
                continue
            actual = hashlib.sha256(path.read_bytes()).hexdigest()
            if actual != path.name:
                bad.append(path.name)
        return bad

    # Per-event asset bookkeeping so `transcribe` can run after ingestion.
    def record_event_assets(self, event_id: str, assets: dict[str, Any]) -> None:
        path = self.root / "event_assets" / f"{event_id}.json"
        tmp = path.with_name(f".{path.name}.tmp")
        tmp.write_bytes(dump_json_bytes(assets))
        tmp.replace(path)

    def event_assets(self, event_id: str) -> Optional[dict[str, Any]]:
        path = self.root / "event_assets" / f"{event_id}.json"
        if not path.is_file():
            return None
        return json.loads(path.read_text("utf-8"))


# --- feed loading -------------------------------------------------------------


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def _record_from_doc(doc: dict[str, Any], record_index: int, base_uri: str) -> IngestionEvent:
    def text_field(name: str) -> str:
        value = doc.get(name)
        if value is None:
            return ""
        if not isinstance(value, str):
            raise ParseError(record_index, f"field {name} must be a string")
        return value

    def uri_field(name: str) -> Optional[str]:
        value = text_field(name)
        if not value:
            return None
        return urljoin(base_uri, value) if base_uri else value

    minutes_items = []
    raw_items = doc.get("minutes_items") or []
    if not isinstance(raw_items, list):
        raise ParseError(record_index, "minutes_items must be a list")
    for item in raw_items:
        if not isinstance(item, dict):
            raise ParseError(record_index, "minutes item must be an object")
        votes = []
        for vote in item.get("votes") or []:
            if not isinstance(vote, dict) or "person_name" not in vote or "decision" not in vote:
                raise ParseError(record_index, "vote must carry person_name and decision")
            votes.append(IngestionVote(str(vote["person_name"]), str(vote["decision"])))
        minutes_items.append(
            IngestionMinutesItem(
                name=str(item.get("name", "")),
                matter_id=item.get("matter_id"),
                matter_name=item.get("matter_name"),
                matter_title=item.get("matter_title"),
                decision=item.get("decision"),
                votes=tuple(votes),
            )
        )
    return IngestionEvent(
        instance_slug=text_field("instance_slug"),
        body_name=text_field("body_name"),
        session_datetime=text_field("session_datetime"),
        video_uri=text_field("video_uri"),
        caption_uri=uri_field("caption_uri"),
        agenda_uri=uri_field("agenda_uri"),
        minutes_items=tuple(minutes_items),
    )


def parse_feed_text(text: str, base_uri: str = "") -> list[IngestionEvent]:
    """Incremental JSON-array parse so errors carry the failing record index."""
    decoder = json.JSONDecoder()
    i = _skip_ws(text, 0)
    if i >= len(text) or text[i] != "[":
        raise ParseError(0, "feed must be a JSON array")
    i = _skip_ws(text, i + 1)
    records: list[IngestionEvent] = []
    if i < len(text) and text[i] == "]":
        return records
    index = 0
    while True:
        try:
            doc, j = decoder.raw_decode(text, i)
        except json.JSONDecodeError as exc:
            raise ParseError(index, exc.msg) from None
        if not isinstance(doc, dict):
            raise ParseError(index, "record must be a JSON object")
        records.append(_record_from_doc(doc, index, base_uri))
        i = _skip_ws(text, j)
        if i < len(text) and text[i] == ",":
            index += 1
            i = _skip_ws(text, i + 1)
            continue
        if i < len(text) and text[i] == "]":
            return records
        raise ParseError(index, "expected ',' or ']' after record")


def load_feed(source: str, fetcher: Fetcher = default_fetcher) -> list[IngestionEvent]:
    """Read a feed document from a local path or URL, preserving record order.

    Relative caption/agenda URIs resolve against the feed's own location.
    """
    parsed = urlparse(source)
    if parsed.scheme in ("http", "https"):
        status, body = fetcher(source)
        if status != 200:
            raise SourceUnreachable(f"{source}: HTTP {status}")
        text = body.decode("utf-8")
        base_uri = source
    else:
        path = Path(url2pathname(parsed.path) if parsed.scheme == "file" else source)
        try:
            text = path.read_text("utf-8")
        except OSError as exc:
            raise SourceUnreachable(f"{source}: {exc}") from None
        base_uri = path.resolve().as_uri()
    return parse_feed_text(text, base_uri)


# --- ingestion ---------------------------------------------------------------------


@dataclass
class IngestOutcome:
    event: Event
    transcribed: bool
    changed: bool


def ingest_event(
    record: IngestionEvent,
    store: Store,
    cache: AssetCache,
    fetch_video: bool = False,
    clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc),
) -> IngestOutcome:
    """Validate, identify, fetch assets, and persist one event.

    Re-ingesting an identical record leaves the store byte-identical: writes
    go through put_if_changed and volatile fields are never rewritten alone.
    """
    session_dt = validate_ingestion_event(record)
    if not record.instance_slug:
        raise MissingField("instance_slug")
    event_id = canonical_event_id(record.instance_slug, record.body_name, session_dt)

    assets: dict[str, Any] = {}
    caption_bytes: Optional[bytes] = None
    if record.caption_uri:
        content_hash, path = cache.fetch(record.caption_uri)
        caption_bytes = path.read_bytes()
        assets["caption"] = {
            "uri": record.caption_uri,
            "content_hash": content_hash,
            "format": detect_caption_format(caption_bytes, record.caption_uri),
        }
    if record.agenda_uri:
        content_hash, _ = cache.fetch(record.agenda_uri)
        assets["agenda"] = {"uri": record.agenda_uri, "content_hash": content_hash}
    if fetch_video:
        content_hash, _ = cache.fetch(record.video_uri)
        assets["video"] = {"uri": record.video_uri, "content_hash": content_hash}

    existing_keywords: tuple[str, ...] = ()
    existing_thumbnail = None
    if store.exists("events", event_id):
        existing = event_from_doc(store.get("events", event_id))
        existing_keywords = existing.keywords
        existing_thumbnail = existing.static_thumbnail_ref
        if existing.video_uri != record.video_uri:
            logger.info(
                "event %s: video_uri changed %s -> %s",
                event_id,
                existing.video_uri,
                record.video_uri,
            )

    event = Event(
        id=event_id,
        instance_slug=record.instance_slug,
        body=Body(name=record.body_name),
        session_datetime=session_dt,
        video_uri=record.video_uri,
        static_thumbnail_ref=existing_thumbnail,
        keywords=existing_keywords,
    )
    changed = store.put_if_changed("events", event_id, event_to_doc(event))

    for ordinal, item in enumerate(record.minutes_items, start=1):
        votes = tuple(
            Vote(v.person_name, parse_vote_decision(v.decision)) for v in item.votes
        )
        minutes_item = MinutesItem(
            event_id=event_id,
            ordinal=ordinal,
            name=item.name,
            matter_id=item.matter_id,
            decision=item.decision,
            votes=votes,
        )
        changed |= store.put_if_changed(
            "minutes_items", minutes_item_id(event_id, ordinal), minutes_item_to_doc(minutes_item)
        )
        if item.matter_id:
            changed |= _merge_matter(store, record.instance_slug, item, session_dt)

    if assets:
        cache.record_event_assets(event_id, assets)

    transcribed = False
    if caption_bytes is not None:
        source = CaptionSource(caption_bytes, assets["caption"]["format"])
        transcript = transcribe(event, source, clock)
        changed |= store.put_if_changed(
            "transcripts", event_id, transcript_to_doc(transcript), ignore_fields=("created_at",)
        )
        transcribed = True

    return IngestOutcome(event=event, transcribed=transcribed, changed=changed)


def _merge_matter(
    store: Store, instance_slug: str, item: IngestionMinutesItem, session_dt: datetime
) -> bool:
    """Accumulate matter status history as a sorted, deduplicated set.

    Conflicting names/titles resolve to the smallest non-empty value so feed
    permutation cannot change the final store.
    """
    assert item.matter_id
    history: set[tuple[str, datetime]] = set()
    name = item.matter_name or item.name
    title = item.matter_title or name
    if store.exists("matters", item.matter_id):
        current = matter_from_doc(store.get("matters", item.matter_id))
        history.update(current.status_history)
        candidates_n = sorted(v for v in (current.name, name) if v)
        candidates_t = sorted(v for v in (current.title, title) if v)
        name = candidates_n[0] if candidates_n else name
        title = candidates_t[0] if candidates_t else title
    if item.decision:
        history.add((item.decision, session_dt))
    matter = Matter(
        id=item.matter_id,
        name=name,
        title=title,
        instance_slug=instance_slug,
        status_history=tuple(sorted(history, key=lambda pair: (pair[1], pair[0]))),
    )
    return store.put_if_changed("matters", item.matter_id, matter_to_doc(matter))


def ingest_feed(
    records: list[IngestionEvent],
    store: Store,
    cache: AssetCache,
    instance_slug: Optional[str] = None,
    fetch_video: bool = False,
    clock: Callable[[], datetime] = lambda: datetime.now(timezone.utc),
) -> list[IngestOutcome]:
    outcomes = []
    for record in records:
        if instance_slug and not record.instance_slug:
            record = replace(record, instance_slug=instance_slug)
        outcomes.append(ingest_event(record, store, cache, fetch_video, clock))
    return outcomes
