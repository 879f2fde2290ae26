"""Persistent domain types, ingestion-record validation, and canonical ids.

All types are immutable values (frozen dataclasses) and safe to share across
threads. Serialized documents are flat key/value JSON objects; the *_to_doc /
*_from_doc pairs below own the field names.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from datetime import date, datetime, timezone
from enum import Enum
from typing import Any, Iterable, Optional

from .errors import (
    InvalidDatetime,
    InvalidUri,
    MissingField,
    UnknownDecision,
)

_URI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:\S+$")


class VoteDecision(str, Enum):
    APPROVE = "Approve"
    REJECT = "Reject"
    ABSTAIN = "Abstain"
    ABSENT = "Absent"


# Source-string aliases for vote decisions; callers may extend or replace.
# Unknown strings raise UnknownDecision rather than being guessed.
DEFAULT_VOTE_ALIASES: dict[str, VoteDecision] = {
    "approve": VoteDecision.APPROVE,
    "aye": VoteDecision.APPROVE,
    "yes": VoteDecision.APPROVE,
    "yea": VoteDecision.APPROVE,
    "in favor": VoteDecision.APPROVE,
    "pass": VoteDecision.APPROVE,
    "reject": VoteDecision.REJECT,
    "nay": VoteDecision.REJECT,
    "no": VoteDecision.REJECT,
    "oppose": VoteDecision.REJECT,
    "opposed": VoteDecision.REJECT,
    "against": VoteDecision.REJECT,
    "abstain": VoteDecision.ABSTAIN,
    "abstention": VoteDecision.ABSTAIN,
    "present": VoteDecision.ABSTAIN,
    "absent": VoteDecision.ABSENT,
    "excused": VoteDecision.ABSENT,
}


def parse_vote_decision(
    value: str, aliases: dict[str, VoteDecision] | None = None
) -> VoteDecision:
    table = DEFAULT_VOTE_ALIASES if aliases is None else aliases
    normalized = value.strip().lower()
    try:
        return VoteDecision(value.strip().title())
    except ValueError:
        pass
    if normalized in table:
        return table[normalized]
    raise UnknownDecision(value)


@dataclass(frozen=True)
class Body:
    name: str
    description: Optional[str] = None


@dataclass(frozen=True)
class Vote:
    person_name: str
    decision: VoteDecision


@dataclass(frozen=True)
class Sentence:
    index: int
    start_time: float
    end_time: float
    text: str
    speaker_name: Optional[str] = None


@dataclass(frozen=True)
class Transcript:
    event_id: str
    generator: str
    created_at: datetime
    sentences: tuple[Sentence, ...] = ()


@dataclass(frozen=True)
class MinutesItem:
    event_id: str
    ordinal: int
    name: str
    matter_id: Optional[str] = None
    decision: Optional[str] = None
    votes: tuple[Vote, ...] = ()


@dataclass(frozen=True)
class Matter:
    id: str
    name: str
    title: str
    instance_slug: str
    status_history: tuple[tuple[str, datetime], ...] = ()


@dataclass(frozen=True)
class Event:
    id: str
    instance_slug: str
    body: Body
    session_datetime: datetime
    video_uri: str
    static_thumbnail_ref: Optional[str] = None
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class InstanceManifest:
    instance_slug: str
    event_count: int
    first_event: Optional[date]
    last_event: Optional[date]


@dataclass(frozen=True)
class IngestionVote:
    person_name: str
    decision: str


@dataclass(frozen=True)
class IngestionMinutesItem:
    name: str
    matter_id: Optional[str] = None
    matter_name: Optional[str] = None
    matter_title: Optional[str] = None
    decision: Optional[str] = None
    votes: tuple[IngestionVote, ...] = ()


@dataclass(frozen=True)
class IngestionEvent:
    """One gatherer-feed record; field values raw, validated at ingest time."""

    instance_slug: str = ""
    body_name: str = ""
    session_datetime: str = ""
    video_uri: str = ""
    caption_uri: Optional[str] = None
    agenda_uri: Optional[str] = None
    minutes_items: tuple[IngestionMinutesItem, ...] = ()


# --- timestamps -------------------------------------------------------------


def parse_utc(value: str) -> datetime:
    """Parse an ISO-8601 timestamp carrying an explicit timezone, to UTC.

    Naive timestamps are rejected: guessing a zone would silently skew
    cross-instance day bucketing.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise InvalidDatetime(value) from None
    if parsed.tzinfo is None:
        raise InvalidDatetime(value)
    return parsed.astimezone(timezone.utc)


def format_utc(value: datetime) -> str:
    value = value.astimezone(timezone.utc)
    if value.microsecond:
        return value.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def is_valid_uri(value: str) -> bool:
    return bool(_URI_RE.match(value))


# --- validation ---------------------------------------------------------------


def validate_ingestion_event(record: IngestionEvent) -> datetime:
    """Check the minimal ingestion contract; returns the parsed UTC timestamp.

    Fields are checked in declaration order so the raised error names the
    first missing or invalid one.
    """
    if not record.body_name:
        raise MissingField("body_name")
    if not record.session_datetime:
        raise MissingField("session_datetime")
    session_dt = parse_utc(record.session_datetime)
    if not record.video_uri:
        raise MissingField("video_uri")
    if not is_valid_uri(record.video_uri):
        raise InvalidUri(record.video_uri)
    return session_dt


# --- canonical identifiers ------------------------------------------------------


def canonical_event_digest(instance_slug: str, body_name: str, session_datetime: datetime) -> str:
    """Full 256-bit digest over slug/body/timestamp, kept for collision audit."""
    material = "\x1f".join([instance_slug, body_name, format_utc(session_datetime)])
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def canonical_event_id(instance_slug: str, body_name: str, session_datetime: datetime) -> str:
    return canonical_event_digest(instance_slug, body_name, session_datetime)[:16]


def minutes_item_id(event_id: str, ordinal: int) -> str:
    return f"{event_id}:{ordinal:04d}"


# --- manifests ---------------------------------------------------------------------


def manifest_from_dates(instance_slug: str, session_dates: Iterable[date]) -> InstanceManifest:
    dates = sorted(session_dates)
    if not dates:
        return InstanceManifest(instance_slug, 0, None, None)
    return InstanceManifest(instance_slug, len(dates), dates[0], dates[-1])


# --- serialization -------------------------------------------------------------------


def _round_time(seconds: float) -> float:
    return round(seconds, 3)


def body_to_doc(body: Body) -> dict[str, Any]:
    doc: dict[str, Any] = {"name": body.name}
    if body.description is not None:
        doc["description"] = body.description
    return doc


def body_from_doc(doc: dict[str, Any]) -> Body:
    return Body(name=doc["name"], description=doc.get("description"))


def event_to_doc(event: Event) -> dict[str, Any]:
    return {
        "id": event.id,
        "instance_slug": event.instance_slug,
        "body": body_to_doc(event.body),
        "session_datetime": format_utc(event.session_datetime),
        "video_uri": event.video_uri,
        "static_thumbnail_ref": event.static_thumbnail_ref,
        "keywords": list(event.keywords),
    }


def event_from_doc(doc: dict[str, Any]) -> Event:
    return Event(
        id=doc["id"],
        instance_slug=doc["instance_slug"],
        body=body_from_doc(doc["body"]),
        session_datetime=parse_utc(doc["session_datetime"]),
        video_uri=doc["video_uri"],
        static_thumbnail_ref=doc.get("static_thumbnail_ref"),
        keywords=tuple(doc.get("keywords", [])),
    )


def sentence_to_doc(sentence: Sentence) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "index": sentence.index,
        "start_time": _round_time(sentence.start_time),
        "end_time": _round_time(sentence.end_time),
        "text": sentence.text,
    }
    if sentence.speaker_name is not None:
        doc["speaker_name"] = sentence.speaker_name
    return doc


def sentence_from_doc(doc: dict[str, Any]) -> Sentence:
    return Sentence(
        index=doc["index"],
        start_time=doc["start_time"],
        end_time=doc["end_time"],
        text=doc["text"],
        speaker_name=doc.get("speaker_name"),
    )


def transcript_to_doc(transcript: Transcript) -> dict[str, Any]:
    return {
        "event_id": transcript.event_id,
        "generator": transcript.generator,
        "created_at": format_utc(transcript.created_at),
        "sentences": [sentence_to_doc(s) for s in transcript.sentences],
    }


def transcript_from_doc(doc: dict[str, Any]) -> Transcript:
    return Transcript(
        event_id=doc["event_id"],
        generator=doc["generator"],
        created_at=parse_utc(doc["created_at"]),
        sentences=tuple(sentence_from_doc(s) for s in doc["sentences"]),
    )


def vote_to_doc(vote: Vote) -> dict[str, Any]:
    return {"person_name": vote.person_name, "decision": vote.decision.value}


def vote_from_doc(doc: dict[str, Any]) -> Vote:
    return Vote(person_name=doc["person_name"], decision=VoteDecision(doc["decision"]))


def minutes_item_to_doc(item: MinutesItem) -> dict[str, Any]:
    return {
        "event_id": item.event_id,
        "ordinal": item.ordinal,
        "name": item.name,
        "matter_id": item.matter_id,
        "decision": item.decision,
        "votes": [vote_to_doc(v) for v in item.votes],
    }


def minutes_item_from_doc(doc: dict[str, Any]) -> MinutesItem:
    return MinutesItem(
        event_id=doc["event_id"],
        ordinal=doc["ordinal"],
        name=doc["name"],
        matter_id=doc.get("matter_id"),
        decision=doc.get("decision"),
        votes=tuple(vote_from_doc(v) for v in doc.get("votes", [])),
    )


def matter_to_doc(matter: Matter) -> dict[str, Any]:
    return {
        "id": matter.id,
        "name": matter.name,
        "title": matter.title,
        "instance_slug": matter.instance_slug,
        "status_history": [
            {"status": status, "timestamp": format_utc(ts)}
            for status, ts in matter.status_history
        ],
    }


def matter_from_doc(doc: dict[str, Any]) -> Matter:
    return Matter(
        id=doc["id"],
        name=doc["name"],
        title=doc["title"],
        instance_slug=doc["instance_slug"],
        status_history=tuple(
            (entry["status"], parse_utc(entry["timestamp"]))
            for entry in doc.get("status_history", [])
        ),
    )


def manifest_to_doc(manifest: InstanceManifest) -> dict[str, Any]:
    return {
        "instance_slug": manifest.instance_slug,
        "event_count": manifest.event_count,
        "first_event": manifest.first_event.isoformat() if manifest.first_event else None,
        "last_event": manifest.last_event.isoformat() if manifest.last_event else None,
    }


def manifest_from_doc(doc: dict[str, Any]) -> InstanceManifest:
    return InstanceManifest(
        instance_slug=doc["instance_slug"],
        event_count=doc["event_count"],
        first_event=date.fromisoformat(doc["first_event"]) if doc["first_event"] else None,
        last_event=date.fromisoformat(doc["last_event"]) if doc["last_event"] else None,
    )
