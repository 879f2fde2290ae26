"""Deterministic synthetic corpus generator.

Produces per-instance gatherer feeds, caption files (WebVTT primary, SRT
subset), minutes with votes, and sidecar files recording the exact per-day
gram counts and expected per-instance manifests. Same spec, same bytes:
caption URIs are feed-relative so the tree is identical wherever it lands.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Optional, Sequence

from .models import canonical_event_id, parse_utc
from .store import dump_json
from .textproc import ngrams, stem_tokens, tokenize

# Weighted council-flavored vocabulary; function words keep denominators honest.
DEFAULT_VOCABULARY: tuple[tuple[str, int], ...] = (
    ("the", 18), ("we", 10), ("to", 10), ("of", 8), ("and", 8), ("for", 7),
    ("on", 6), ("this", 6), ("is", 6), ("a", 6), ("that", 5), ("will", 4),
    ("council", 9), ("committee", 5), ("meeting", 5), ("city", 6), ("budget", 5),
    ("housing", 5), ("police", 4), ("policing", 2), ("policy", 3), ("union", 3),
    ("homelessness", 2), ("homeless", 2), ("transit", 3), ("street", 3),
    ("public", 4), ("comment", 3), ("vote", 3), ("motion", 3), ("amendment", 2),
    ("ordinance", 2), ("resolution", 2), ("park", 2), ("library", 2),
    ("water", 2), ("tax", 2), ("zoning", 2), ("permit", 2), ("tenant", 2),
    ("rent", 2), ("shelter", 2), ("bike", 1), ("bridge", 1), ("missing", 1),
    ("middle", 1), ("district", 2), ("member", 3), ("report", 2), ("agenda", 2),
    ("2022", 1), ("approve", 2), ("second", 2), ("question", 2), ("item", 3),
)

SPEAKERS = (
    "Councilmember Ortiz",
    "Councilmember Chen",
    "Council President Walker",
    "Councilmember Dube",
)

BODIES = (
    "Full Council",
    "Council Briefing",
    "Transportation Committee",
    "Housing Committee",
)

PEOPLE = ("Ortiz", "Chen", "Walker", "Dube", "Okafor")

VOTE_WORDS = ("aye", "nay", "abstain", "absent")

MATTER_DECISIONS = ("Adopted", "Referred", "Failed")


@dataclass(frozen=True)
class FixtureSpec:
    seed: int = 42
    instances: tuple[str, ...] = ("alpha-city", "beta-county", "gamma-village")
    events_per_instance: int = 10
    date_span: tuple[date, date] = (date(2021, 1, 4), date(2022, 3, 29))
    vocabulary: tuple[tuple[str, int], ...] = DEFAULT_VOCABULARY
    injected_phrases: tuple[tuple[str, tuple[date, ...]], ...] = (
        (
            "missing middle housing",
            (date(2021, 3, 15), date(2021, 9, 20), date(2022, 2, 7)),
        ),
    )


def spec_for_span(spec: FixtureSpec, span: tuple[date, date]) -> FixtureSpec:
    """Rebuild *spec* on a new date span, re-placing injected phrases at the
    25/50/75% marks so their dates stay inside the span."""
    from dataclasses import replace

    span_days = max((span[1] - span[0]).days, 0)
    remapped = tuple(
        (
            phrase,
            tuple(
                span[0] + timedelta(days=round(span_days * (i + 1) / (len(days) + 1)))
                for i in range(len(days))
            ),
        )
        for phrase, days in spec.injected_phrases
    )
    return replace(spec, date_span=span, injected_phrases=remapped)


def _format_vtt_time(seconds: float) -> str:
    ms = round(seconds * 1000)
    h, rem = divmod(ms, 3_600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d}.{ms:03d}"


def _format_srt_time(seconds: float) -> str:
    return _format_vtt_time(seconds).replace(".", ",")


def _make_sentence(rng: random.Random, words: Sequence[str], weights: Sequence[int]) -> str:
    length = rng.randint(4, 11)
    tokens = rng.choices(words, weights=weights, k=length)
    punct = rng.choices(".?!", weights=(8, 1, 1), k=1)[0]
    return tokens[0].capitalize() + " " + " ".join(tokens[1:]) + punct


@dataclass
class _EventDraft:
    instance_slug: str
    body_name: str
    session_iso: str
    day: date
    sentences: list[str]
    speakers: list[Optional[str]]
    caption_format: str  # "webvtt" | "srt"
    minutes_items: list[dict] = field(default_factory=list)
    caption_name: str = ""
    agenda_name: Optional[str] = None


def _draft_events(spec: FixtureSpec, rng: random.Random) -> list[_EventDraft]:
    words = [w for w, _ in spec.vocabulary]
    weights = [weight for _, weight in spec.vocabulary]
    span_days = (spec.date_span[1] - spec.date_span[0]).days

    injections: dict[str, dict[date, list[str]]] = {slug: {} for slug in spec.instances}
    for phrase_index, (phrase, days) in enumerate(spec.injected_phrases):
        for day_index, day in enumerate(days):
            if not spec.date_span[0] <= day <= spec.date_span[1]:
                raise ValueError(f"injected phrase date {day} outside date_span")
            slug = spec.instances[(phrase_index + day_index) % len(spec.instances)]
            injections[slug].setdefault(day, []).append(phrase)

    drafts: list[_EventDraft] = []
    for slug in spec.instances:
        count = spec.events_per_instance
        if count == 0:
            continue
        days = [
            spec.date_span[0] + timedelta(days=rng.randint(0, span_days))
            for _ in range(count)
        ]
        # Pin the endpoints so the expected manifest mirrors the spec's span.
        days[0] = spec.date_span[0]
        if count > 1:
            days[-1] = spec.date_span[1]
        forced = [d for d in injections[slug] if d not in days]
        if forced and count >= 3:
            for position, day in enumerate(forced):
                days[1 + position % (count - 2)] = day
        days.sort()

        for event_index, day in enumerate(days):
            hour = rng.choice((9, 14, 18))
            # minute carries the per-instance ordinal so same-day sessions
            # never collide into one canonical id
            minute = event_index % 60
            body = BODIES[(event_index + len(drafts)) % len(BODIES)]
            sentence_count = rng.randint(8, 16)
            sentences = [_make_sentence(rng, words, weights) for _ in range(sentence_count)]
            for phrase in injections[slug].get(day, []):
                for _ in range(rng.randint(1, 3)):
                    position = rng.randrange(len(sentences))
                    sentences[position] = (
                        "We are discussing " + phrase + " again today."
                    )
            caption_format = "srt" if event_index % 4 == 3 else "webvtt"
            tagged = caption_format == "webvtt" and rng.random() < 0.5
            speakers = [
                rng.choice(SPEAKERS) if tagged else None for _ in range(len(sentences))
            ]
            draft = _EventDraft(
                instance_slug=slug,
                body_name=body,
                session_iso=f"{day.isoformat()}T{hour:02d}:{minute:02d}:00Z",
                day=day,
                sentences=sentences,
                speakers=speakers,
                caption_format=caption_format,
                caption_name=f"ev-{event_index:03d}.{'srt' if caption_format == 'srt' else 'vtt'}",
            )
            if rng.random() < 0.5:
                draft.minutes_items = _draft_minutes(rng, slug, event_index)
                draft.agenda_name = f"ev-{event_index:03d}.txt"
            drafts.append(draft)
    return drafts


def _draft_minutes(rng: random.Random, slug: str, event_index: int) -> list[dict]:
    items = []
    for ordinal in range(1, rng.randint(2, 4) + 1):
        bill = rng.randint(10000, 99999)
        item: dict = {"name": f"Council Bill {bill}"}
        if rng.random() < 0.7:
            item["matter_id"] = f"{slug}-cb-{bill}"
            item["matter_name"] = f"CB {bill}"
            item["matter_title"] = f"An ordinance relating to item {ordinal}"
            item["decision"] = rng.choice(MATTER_DECISIONS)
            item["votes"] = [
                {"person_name": person, "decision": rng.choice(VOTE_WORDS)}
                for person in PEOPLE
            ]
        items.append(item)
    return items


def _render_webvtt(draft: _EventDraft, rng: random.Random) -> str:
    lines = ["WEBVTT", ""]
    clock = 0.0
    tagged = any(draft.speakers)
    if tagged:
        # cue per 1-2 sentence chunk, voice-tagged; cues stay inside sentences
        for sentence, speaker in zip(draft.sentences, draft.speakers):
            words = sentence.split(" ")
            chunks = _chunk(words, rng, 4, 8)
            for chunk in chunks:
                duration = 0.38 * len(chunk) + rng.random() * 0.2
                start, end = clock, clock + duration
                lines.append(f"{_format_vtt_time(start)} --> {_format_vtt_time(end)}")
                text = " ".join(chunk)
                lines.append(f"<v {speaker}>{text}</v>" if speaker else text)
                lines.append("")
                clock = end
    else:
        words = [w for sentence in draft.sentences for w in sentence.split(" ")]
        for chunk in _chunk(words, rng, 3, 8):
            duration = 0.38 * len(chunk) + rng.random() * 0.2
            start, end = clock, clock + duration
            lines.append(f"{_format_vtt_time(start)} --> {_format_vtt_time(end)}")
            lines.append(" ".join(chunk))
            lines.append("")
            clock = end
    return "\n".join(lines)


def _render_srt(draft: _EventDraft, rng: random.Random) -> str:
    words = [w for sentence in draft.sentences for w in sentence.split(" ")]
    lines = []
    clock = 0.0
    for counter, chunk in enumerate(_chunk(words, rng, 3, 8), start=1):
        duration = 0.38 * len(chunk) + rng.random() * 0.2
        start, end = clock, clock + duration
        lines.append(str(counter))
        lines.append(f"{_format_srt_time(start)} --> {_format_srt_time(end)}")
        lines.append(" ".join(chunk))
        lines.append("")
        clock = end
    return "\n".join(lines)


def _chunk(words: list[str], rng: random.Random, low: int, high: int) -> list[list[str]]:
    chunks = []
    i = 0
    while i < len(words):
        size = rng.randint(low, high)
        chunks.append(words[i : i + size])
        i += size
    return chunks


def generate(spec: FixtureSpec, out_dir: str | Path) -> Path:
    """Write the corpus and sidecars; returns the output directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)
    drafts = _draft_events(spec, rng)

    # Sidecar tallies: (instance, day, n) -> Counter of stemmed grams.
    tallies: dict[tuple[str, date, int], Counter] = {}
    manifest: dict[str, dict] = {}

    feeds: dict[str, list[dict]] = {slug: [] for slug in spec.instances}
    for draft in drafts:
        slug = draft.instance_slug
        caption_dir = out / slug / "captions"
        caption_dir.mkdir(parents=True, exist_ok=True)
        content = (
            _render_srt(draft, rng)
            if draft.caption_format == "srt"
            else _render_webvtt(draft, rng)
        )
        (caption_dir / draft.caption_name).write_text(content, "utf-8")

        record: dict = {
            "instance_slug": slug,
            "body_name": draft.body_name,
            "session_datetime": draft.session_iso,
            "video_uri": f"https://media.example/{slug}/{draft.caption_name.rsplit('.', 1)[0]}.mp4",
            "caption_uri": f"captions/{draft.caption_name}",
        }
        if draft.agenda_name:
            agenda_dir = out / slug / "agendas"
            agenda_dir.mkdir(parents=True, exist_ok=True)
            agenda_text = "\n".join(item["name"] for item in draft.minutes_items) + "\n"
            (agenda_dir / draft.agenda_name).write_text(agenda_text, "utf-8")
            record["agenda_uri"] = f"agendas/{draft.agenda_name}"
        if draft.minutes_items:
            record["minutes_items"] = draft.minutes_items
        feeds[slug].append(record)

        for n in (1, 2):
            key = (slug, draft.day, n)
            tally = tallies.setdefault(key, Counter())
            for sentence in draft.sentences:
                tally.update(ngrams(stem_tokens(tokenize(sentence)), n))

        info = manifest.setdefault(
            slug, {"instance_slug": slug, "event_count": 0, "first_event": None, "last_event": None, "event_ids": []}
        )
        info["event_count"] += 1
        day_iso = draft.day.isoformat()
        if info["first_event"] is None or day_iso < info["first_event"]:
            info["first_event"] = day_iso
        if info["last_event"] is None or day_iso > info["last_event"]:
            info["last_event"] = day_iso
        info["event_ids"].append(
            canonical_event_id(slug, draft.body_name, parse_utc(draft.session_iso))
        )

    for slug in spec.instances:
        slug_dir = out / slug
        slug_dir.mkdir(parents=True, exist_ok=True)
        (slug_dir / "feed.json").write_text(dump_json(feeds[slug]), "utf-8")
        manifest.setdefault(
            slug,
            {"instance_slug": slug, "event_count": 0, "first_event": None, "last_event": None, "event_ids": []},
        )

    rows = ["instance,date,gram,n,count,total"]
    for (slug, day, n), tally in sorted(tallies.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        total = sum(tally.values())
        for gram in sorted(tally):
            rows.append(f"{slug},{day.isoformat()},{_csv_field(gram)},{n},{tally[gram]},{total}")
    (out / "expected_counts.csv").write_text("\n".join(rows) + "\n", "utf-8")

    (out / "expected_manifest.json").write_text(
        dump_json({"instances": [manifest[slug] for slug in spec.instances]}), "utf-8"
    )
    (out / "fixture_spec.json").write_text(
        dump_json(
            {
                "seed": spec.seed,
                "instances": list(spec.instances),
                "events_per_instance": spec.events_per_instance,
                "date_span": [spec.date_span[0].isoformat(), spec.date_span[1].isoformat()],
                "injected_phrases": [
                    {"phrase": phrase, "dates": [d.isoformat() for d in days]}
                    for phrase, days in spec.injected_phrases
                ],
            }
        ),
        "utf-8",
    )
    return out


def _csv_field(value: str) -> str:
    if "," in value or '"' in value or "\n" in value:
        return '"' + value.replace('"', '""') + '"'
    return value
