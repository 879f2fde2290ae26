"""Stemmed inverted index over transcripts: BM25 search, keywords, snippets.

Postings are keyed by stemmed unigram. Persistence is content-addressed: a
build writes its shards under index/<digest>/ and atomically repoints the
CURRENT file, so readers always see a consistent snapshot and rebuilding an
unchanged corpus is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import math
import shutil
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Optional

from .errors import EmptyQuery, NotFound, UnknownEvent, UnsupportedVersion
from .models import Event, Transcript, format_utc, parse_utc
from .store import Store, dump_json_bytes
from .textproc import stem_tokens, tokenize, tokenize_with_spans

INDEX_FORMAT_VERSION = 1

BM25_K1 = 1.2
BM25_B = 0.75

KEYWORDS_PER_EVENT = 5


@dataclass
class Posting:
    event_id: str
    term_frequency: int
    sentence_indices: list[int]
    surface_counts: dict[str, int]


@dataclass
class EventMeta:
    session_datetime: datetime
    body_name: str


@dataclass
class Index:
    # term -> event_id -> Posting
    postings: dict[str, dict[str, Posting]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)
    meta: dict[str, EventMeta] = field(default_factory=dict)

    @property
    def document_count(self) -> int:
        return len(self.doc_lengths)

    @property
    def average_doc_length(self) -> float:
        if not self.doc_lengths:
            return 0.0
        return sum(self.doc_lengths.values()) / len(self.doc_lengths)


@dataclass(frozen=True)
class SearchResult:
    event_id: str
    score: float
    snippet: str
    keywords: tuple[str, ...]
    session_datetime: datetime
    body_name: str


def index_event(index: Index, transcript: Transcript, event: Optional[Event] = None) -> None:
    """Add or replace one event's postings (incremental update)."""
    event_id = transcript.event_id
    if event_id in index.doc_lengths:
        _remove_event(index, event_id)

    token_count = 0
    per_term: dict[str, Posting] = {}
    for sentence in transcript.sentences:
        tokens = tokenize(sentence.text)
        token_count += len(tokens)
        for surface, stemmed in zip(tokens, stem_tokens(tokens)):
            posting = per_term.get(stemmed)
            if posting is None:
                posting = Posting(event_id, 0, [], {})
                per_term[stemmed] = posting
            posting.term_frequency += 1
            if not posting.sentence_indices or posting.sentence_indices[-1] != sentence.index:
                posting.sentence_indices.append(sentence.index)
            posting.surface_counts[surface] = posting.surface_counts.get(surface, 0) + 1

    index.doc_lengths[event_id] = token_count
    for term, posting in per_term.items():
        index.postings.setdefault(term, {})[event_id] = posting
    if event is not None:
        index.meta[event_id] = EventMeta(event.session_datetime, event.body.name)


def _remove_event(index: Index, event_id: str) -> None:
    index.doc_lengths.pop(event_id, None)
    index.meta.pop(event_id, None)
    empty_terms = []
    for term, by_event in index.postings.items():
        by_event.pop(event_id, None)
        if not by_event:
            empty_terms.append(term)
    for term in empty_terms:
        del index.postings[term]


def build_index(
    transcripts: Iterable[Transcript], events: Iterable[Event] = ()
) -> Index:
    """Index a whole corpus. Equals indexing the events one at a time."""
    events_by_id = {e.id: e for e in events}
    index = Index()
    for transcript in transcripts:
        index_event(index, transcript, events_by_id.get(transcript.event_id))
    return index


# --- ranking -------------------------------------------------------------------


def bm25_idf(document_count: int, document_frequency: int) -> float:
    return math.log(
        1.0 + (document_count - document_frequency + 0.5) / (document_frequency + 0.5)
    )


def bm25_score(index: Index, query_stems: list[str], event_id: str) -> float:
    """BM25 (k1=1.2, b=0.75) summed over query stem occurrences."""
    doc_length = index.doc_lengths.get(event_id, 0)
    avg = index.average_doc_length
    score = 0.0
    for stemmed in query_stems:
        by_event = index.postings.get(stemmed)
        if not by_event or event_id not in by_event:
            continue
        tf = by_event[event_id].term_frequency
        idf = bm25_idf(index.document_count, len(by_event))
        norm = tf + BM25_K1 * (1.0 - BM25_B + BM25_B * doc_length / avg) if avg else tf + BM25_K1
        score += idf * tf * (BM25_K1 + 1.0) / norm
    return score


def search(
    index: Index,
    query: str,
    filters: Optional[Mapping[str, Any]] = None,
    sort: str = "relevance",
    limit: int = 10,
    offset: int = 0,
    transcript_loader: Optional[Callable[[str], Transcript]] = None,
    keywords_loader: Optional[Callable[[str], tuple[str, ...]]] = None,
    recency_tau: Optional[float] = None,
) -> tuple[list[SearchResult], int]:
    """Rank events containing at least one query stem.

    Relevance ties break newest-first then by event id; `sort="date"` orders
    newest-first outright. Returns (page, pre-limit candidate count). The
    optional recency multiplier exp(-age_days/tau) is anchored at the newest
    indexed session so scoring stays deterministic.
    """
    query_stems = stem_tokens(tokenize(query))
    if not query_stems:
        raise EmptyQuery("query has no tokens")

    candidates: set[str] = set()
    for stemmed in set(query_stems):
        candidates.update(index.postings.get(stemmed, {}))

    filters = filters or {}
    body = filters.get("body")
    date_from = filters.get("date_from")
    date_to = filters.get("date_to")
    meta = index.meta
    if body is not None:
        candidates = {e for e in candidates if e in meta and meta[e].body_name == body}
    if date_from is not None:
        candidates = {
            e for e in candidates if e in meta and meta[e].session_datetime.date() >= date_from
        }
    if date_to is not None:
        candidates = {
            e for e in candidates if e in meta and meta[e].session_datetime.date() <= date_to
        }

    anchor = None
    if recency_tau:
        stamps = [m.session_datetime for m in index.meta.values()]
        anchor = max(stamps) if stamps else None

    scored = []
    for event_id in candidates:
        score = bm25_score(index, query_stems, event_id)
        if recency_tau and anchor is not None:
            age_days = (anchor - index.meta[event_id].session_datetime).total_seconds() / 86400.0
            score *= math.exp(-age_days / recency_tau)
        scored.append((event_id, score))

    def sort_key(item: tuple[str, float]):
        event_id, score = item
        meta = index.meta.get(event_id)
        stamp = meta.session_datetime.timestamp() if meta else 0.0
        if sort == "date":
            return (-stamp, event_id)
        return (-score, -stamp, event_id)

    scored.sort(key=sort_key)
    total_count = len(scored)
    page = scored[offset : offset + limit]

    results = []
    epoch = datetime.fromtimestamp(0, tz=timezone.utc)
    for event_id, score in page:
        event_meta = meta.get(event_id)
        snippet = ""
        if transcript_loader is not None:
            snippet = make_snippet(transcript_loader(event_id), query_stems)
        keywords: tuple[str, ...] = ()
        if keywords_loader is not None:
            keywords = keywords_loader(event_id)
        elif event_id in index.doc_lengths:
            keywords = tuple(extract_keywords(index, event_id))
        results.append(
            SearchResult(
                event_id=event_id,
                score=score,
                snippet=snippet,
                keywords=keywords,
                session_datetime=event_meta.session_datetime if event_meta else epoch,
                body_name=event_meta.body_name if event_meta else "",
            )
        )
    return results, total_count


# --- keywords ---------------------------------------------------------------------


def extract_keywords(index: Index, event_id: str, k: int = KEYWORDS_PER_EVENT) -> list[str]:
    """Top-k stems by tf-idf, shown as each stem's most frequent surface form.

    tf-idf = tf * ln(1 + N/df); score ties break lexicographically by stem,
    surface ties by frequency then alphabetically.
    """
    if event_id not in index.doc_lengths:
        raise UnknownEvent(event_id)
    n_docs = index.document_count
    scored: list[tuple[float, str, str]] = []
    for term, by_event in index.postings.items():
        posting = by_event.get(event_id)
        if posting is None:
            continue
        weight = posting.term_frequency * math.log(1.0 + n_docs / len(by_event))
        surface = min(posting.surface_counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        scored.append((weight, term, surface))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [surface for _, _, surface in scored[:k]]


# --- snippets ------------------------------------------------------------------------


def make_snippet(transcript: Transcript, query_stems: list[str], max_chars: int = 200) -> str:
    """Highlight query matches in the best sentence of the transcript.

    Picks the sentence with the most distinct query-stem matches (earliest
    wins ties), wraps each matched surface token in `**`, and windows long
    sentences down to *max_chars* of body text with `...` markers on cut ends.
    Returns "" when nothing matches.
    """
    stems = set(query_stems)
    best: Optional[tuple[int, int]] = None  # (-distinct_matches, position)
    for position, sentence in enumerate(transcript.sentences):
        distinct = set()
        for token, _, _ in tokenize_with_spans(sentence.text):
            stemmed = _stem_cached(token)
            if stemmed in stems:
                distinct.add(stemmed)
        if distinct and (best is None or -len(distinct) < best[0]):
            best = (-len(distinct), position)
    if best is None:
        return ""

    sentence = transcript.sentences[best[1]]
    text = sentence.text
    highlighted: list[str] = []
    cursor = 0
    for token, start, end in tokenize_with_spans(text):
        if _stem_cached(token) in stems:
            highlighted.append(text[cursor:start])
            highlighted.append(f"**{text[start:end]}**")
            cursor = end
    highlighted.append(text[cursor:])
    marked = "".join(highlighted)
    if len(marked) <= max_chars:
        return marked
    return _window_words(marked, max_chars)


def _window_words(marked: str, max_chars: int) -> str:
    """Trim to whole words around the first highlight, ellipses on cut ends."""
    words = marked.split(" ")
    first = next((i for i, w in enumerate(words) if "**" in w), 0)
    lo = hi = first
    length = len(words[first])
    while True:
        extended = False
        if hi + 1 < len(words) and length + 1 + len(words[hi + 1]) <= max_chars:
            hi += 1
            length += 1 + len(words[hi])
            extended = True
        if lo > 0 and length + 1 + len(words[lo - 1]) <= max_chars:
            lo -= 1
            length += 1 + len(words[lo])
            extended = True
        if not extended:
            break
    body = " ".join(words[lo : hi + 1])
    if len(body) > max_chars:  # single oversized word
        body = body[:max_chars]
    prefix = "..." if lo > 0 else ""
    suffix = "..." if hi + 1 < len(words) else ""
    return f"{prefix}{body}{suffix}"


_STEM_CACHE: dict[str, str] = {}


def _stem_cached(token: str) -> str:
    cached = _STEM_CACHE.get(token)
    if cached is None:
        cached = stem_tokens([token])[0]
        if len(_STEM_CACHE) < 200_000:
            _STEM_CACHE[token] = cached
        return cached
    return cached


# --- persistence ------------------------------------------------------------------------


def _shard_of(term: str) -> str:
    first = term[:1]
    if first.isascii() and (first.isalpha() or first.isdigit()):
        return first
    return "_misc"


def _index_payload(index: Index) -> tuple[dict[str, Any], dict[str, dict[str, Any]]]:
    stats = {
        "version": INDEX_FORMAT_VERSION,
        "document_count": index.document_count,
        "average_doc_length": index.average_doc_length,
        "doc_lengths": dict(sorted(index.doc_lengths.items())),
        "events": {
            event_id: {
                "session_datetime": format_utc(meta.session_datetime),
                "body_name": meta.body_name,
            }
            for event_id, meta in sorted(index.meta.items())
        },
    }
    shards: dict[str, dict[str, Any]] = defaultdict(
        lambda: {"version": INDEX_FORMAT_VERSION, "terms": {}}
    )
    for term in sorted(index.postings):
        by_event = index.postings[term]
        shards[_shard_of(term)]["terms"][term] = [
            {
                "event_id": event_id,
                "term_frequency": posting.term_frequency,
                "sentence_indices": posting.sentence_indices,
                "surface_counts": dict(sorted(posting.surface_counts.items())),
            }
            for event_id, posting in sorted(by_event.items())
        ]
    return stats, dict(shards)


def save_index(index: Index, store_root: str | Path) -> Path:
    """Persist under <root>/index/<content-digest>/ and swap CURRENT."""
    stats, shards = _index_payload(index)
    blobs: dict[str, bytes] = {"stats.json": dump_json_bytes(stats)}
    for shard, payload in shards.items():
        blobs[f"postings-{shard}.json"] = dump_json_bytes(payload)

    digest = hashlib.sha256()
    for name in sorted(blobs):
        digest.update(name.encode("utf-8"))
        digest.update(blobs[name])
    generation = digest.hexdigest()[:16]

    index_root = Path(store_root) / "index"
    generation_dir = index_root / generation
    generation_dir.mkdir(parents=True, exist_ok=True)
    for name, data in blobs.items():
        path = generation_dir / name
        tmp = path.with_name(f".{name}.tmp")
        tmp.write_bytes(data)
        tmp.replace(path)

    current = index_root / "CURRENT"
    tmp_current = index_root / ".CURRENT.tmp"
    tmp_current.write_text(generation + "\n", "utf-8")
    tmp_current.replace(current)

    for stale in index_root.iterdir():
        if stale.is_dir() and stale.name != generation:
            shutil.rmtree(stale, ignore_errors=True)
    return generation_dir


def load_index(store_root: str | Path) -> Index:
    index_root = Path(store_root) / "index"
    current = index_root / "CURRENT"
    try:
        generation = current.read_text("utf-8").strip()
    except FileNotFoundError:
        raise NotFound("index", "CURRENT") from None
    generation_dir = index_root / generation
    stats = _load_json(generation_dir / "stats.json")
    if stats.get("version") != INDEX_FORMAT_VERSION:
        raise UnsupportedVersion(stats.get("version"))
    index = Index()
    index.doc_lengths = dict(stats["doc_lengths"])
    index.meta = {
        event_id: EventMeta(parse_utc(info["session_datetime"]), info["body_name"])
        for event_id, info in stats["events"].items()
    }
    for shard_file in sorted(generation_dir.glob("postings-*.json")):
        payload = _load_json(shard_file)
        for term, postings in payload["terms"].items():
            index.postings[term] = {
                p["event_id"]: Posting(
                    event_id=p["event_id"],
                    term_frequency=p["term_frequency"],
                    sentence_indices=list(p["sentence_indices"]),
                    surface_counts=dict(p["surface_counts"]),
                )
                for p in postings
            }
    return index


def _load_json(path: Path) -> dict[str, Any]:
    return json.loads(path.read_text("utf-8"))


def index_generation(store_root: str | Path) -> Optional[str]:
    try:
        return (Path(store_root) / "index" / "CURRENT").read_text("utf-8").strip()
    except FileNotFoundError:
        return None


# --- store-level orchestration ------------------------------------------------------------


def rebuild_from_store(store: Store) -> Index:
    """Index every stored transcript and stamp top keywords onto events."""
    from .models import event_from_doc, event_to_doc, transcript_from_doc

    events = [event_from_doc(doc) for _, doc in store.iter_docs("events")]
    transcripts = [transcript_from_doc(doc) for _, doc in store.iter_docs("transcripts")]
    index = build_index(transcripts, events)

    for event in events:
        if event.id not in index.doc_lengths:
            continue
        keywords = tuple(extract_keywords(index, event.id, KEYWORDS_PER_EVENT))
        if keywords != event.keywords:
            doc = event_to_doc(event)
            doc["keywords"] = list(keywords)
            store.put("events", event.id, doc)
    save_index(index, store.root)
    return index
