"""WebVTT/SRT cue parsing, sentence segmentation, and transcript generation.

Parsers are total: any byte string either yields cues or raises one of the
structured errors (MissingHeader, InvalidTiming, InvalidBlock) — never an
unstructured crash.
"""

from __future__ import annotations

import html
import json
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .errors import (
    BackendFailed,
    BackendOutputInvalid,
    InvalidBlock,
    InvalidTiming,
    MissingHeader,
    NoTranscriptSource,
)
from .models import Event, Sentence, Transcript

_TIMESTAMP_RE = re.compile(r"^(?:(\d{1,4}):)?([0-5]?\d):([0-5]\d)[.,](\d{3})$")
_CUE_TIMING_RE = re.compile(r"-->")
_VOICE_TAG_RE = re.compile(r"<v(?:\.[^\s>]*)?\s+([^>]*)>")
_ANY_TAG_RE = re.compile(r"</?[^>]*>")
_WS_RE = re.compile(r"\s+")

# Periods after these words (or after a single capital letter) do not end a
# sentence: "Bill No. 42", "Dr. Woo".
_ABBREVIATIONS = frozenset(["Mr", "Ms", "Dr", "St", "No"])

_TERMINALS = frozenset(".!?")


@dataclass(frozen=True)
class Cue:
    start_time: float
    end_time: float
    text: str
    speaker_name: Optional[str] = None


@dataclass(frozen=True)
class CaptionSource:
    data: bytes
    format: str  # "webvtt" | "srt"


@dataclass(frozen=True)
class ExternalSource:
    name: str
    command: str
    media_path: str


TranscriptSource = Union[CaptionSource, ExternalSource]


def _decode(data: Union[bytes, str]) -> str:
    if isinstance(data, bytes):
        text = data.decode("utf-8", errors="replace")
    else:
        text = data
    return text.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n")


def _parse_timestamp(token: str) -> Optional[float]:
    match = _TIMESTAMP_RE.match(token.strip())
    if not match:
        return None
    hours = int(match.group(1)) if match.group(1) else 0
    return hours * 3600 + int(match.group(2)) * 60 + int(match.group(3)) + int(match.group(4)) / 1000.0


def _normalize_text(lines: Sequence[str]) -> tuple[str, Optional[str]]:
    """Join cue text lines, strip markup, collapse whitespace."""
    joined = " ".join(lines)
    voice = _VOICE_TAG_RE.search(joined)
    speaker = voice.group(1).strip() or None if voice else None
    stripped = _ANY_TAG_RE.sub(" ", joined)
    stripped = html.unescape(stripped)
    return _WS_RE.sub(" ", stripped).strip(), speaker


def parse_webvtt(data: Union[bytes, str]) -> list[Cue]:
    """Parse WebVTT text into time-ordered cues.

    Voice spans populate speaker_name; styling/timestamp tags are stripped.
    NOTE/STYLE/REGION blocks and cues left empty by tag stripping are skipped.
    """
    text = _decode(data)
    lines = text.split("\n")
    header = lines[0] if lines else ""
    if not (header == "WEBVTT" or header.startswith(("WEBVTT ", "WEBVTT\t"))):
        raise MissingHeader("document does not start with WEBVTT")

    cues: list[Cue] = []
    i = 1
    n = len(lines)
    while i < n:
        if not lines[i].strip():
            i += 1
            continue
        block_start = i
        block: list[str] = []
        while i < n and lines[i].strip():
            block.append(lines[i])
            i += 1
        first = block[0].strip()
        if first.startswith(("NOTE", "STYLE", "REGION")) and not _CUE_TIMING_RE.search(first):
            continue
        timing_offset = 0
        if not _CUE_TIMING_RE.search(block[0]):
            timing_offset = 1  # cue identifier line
            if len(block) < 2 or not _CUE_TIMING_RE.search(block[1]):
                continue  # stray text block, not a cue
        timing_line_no = block_start + timing_offset + 1  # 1-based
        parts = _CUE_TIMING_RE.split(block[timing_offset], maxsplit=1)
        start = _parse_timestamp(parts[0])
        end_token = parts[1].strip().split(" ")[0].split("\t")[0] if len(parts) > 1 else ""
        end = _parse_timestamp(end_token)
        if start is None or end is None:
            raise InvalidTiming(timing_line_no, "malformed timestamp")
        if end < start:
            raise InvalidTiming(timing_line_no, "cue ends before it starts")
        cue_text, speaker = _normalize_text(block[timing_offset + 1 :])
        if cue_text:
            cues.append(Cue(start, end, cue_text, speaker))
    return cues


def parse_srt(data: Union[bytes, str]) -> list[Cue]:
    """Parse SRT text into time-ordered cues. Multi-line text joins with spaces."""
    text = _decode(data)
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in text.split("\n"):
        if line.strip():
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)

    cues: list[Cue] = []
    for block_index, block in enumerate(blocks):
        offset = 0
        if block[0].strip().isdigit() and len(block) > 1:
            offset = 1
        if offset >= len(block) or not _CUE_TIMING_RE.search(block[offset]):
            raise InvalidBlock(block_index, "no timing line")
        parts = _CUE_TIMING_RE.split(block[offset], maxsplit=1)
        start = _parse_timestamp(parts[0])
        end = _parse_timestamp(parts[1]) if len(parts) > 1 else None
        if start is None or end is None:
            raise InvalidTiming(block_index, "malformed timestamp")
        if end < start:
            raise InvalidTiming(block_index, "cue ends before it starts")
        cue_text, speaker = _normalize_text(block[offset + 1 :])
        if cue_text:
            cues.append(Cue(start, end, cue_text, speaker))
    return cues


# --- sentence segmentation ------------------------------------------------------


def _is_boundary(text: str, pos: int) -> bool:
    """True when text[pos] is terminal punctuation ending a sentence."""
    ch = text[pos]
    if ch not in _TERMINALS:
        return False
    if pos + 1 < len(text) and not text[pos + 1].isspace():
        return False
    if ch != ".":
        return True
    # Walk back over the word preceding the period.
    start = pos
    while start > 0 and (text[start - 1].isalpha()):
        start -= 1
    word = text[start:pos]
    if len(word) == 1 and word.isupper():
        return False
    if word in _ABBREVIATIONS:
        return False
    return True


def segment_sentences(cues: Sequence[Cue]) -> list[Sentence]:
    """Split concatenated cue text into timestamped sentences.

    A sentence ends at . ! or ? followed by whitespace or end of input, except
    after a single capital letter or a known abbreviation. Timing comes from
    the cues containing the sentence's first and last characters; the speaker
    is carried only when every contributing cue agrees.
    """
    if not cues:
        return []
    pieces: list[str] = []
    cue_of_char: list[int] = []
    for cue_index, cue in enumerate(cues):
        if pieces:
            pieces.append(" ")
            cue_of_char.append(-1)  # joiner, owned by no cue
        pieces.append(cue.text)
        cue_of_char.extend([cue_index] * len(cue.text))
    text = "".join(pieces)

    sentences: list[Sentence] = []
    anchor = 0
    for pos in range(len(text)):
        if _is_boundary(text, pos):
            _append_sentence(sentences, text[anchor : pos + 1], anchor, cues, cue_of_char)
            anchor = pos + 1
    if anchor < len(text):
        # trailing text without terminal punctuation becomes a final sentence
        _append_sentence(sentences, text[anchor:], anchor, cues, cue_of_char)
    return sentences


def _append_sentence(
    sentences: list[Sentence],
    segment: str,
    segment_start: int,
    cues: Sequence[Cue],
    cue_of_char: list[int],
) -> None:
    stripped = segment.strip()
    if not stripped:
        return
    leading = len(segment) - len(segment.lstrip())
    first_char = segment_start + leading
    last_char = segment_start + leading + len(stripped) - 1
    contributing = sorted(
        {cue_of_char[i] for i in range(first_char, last_char + 1) if cue_of_char[i] >= 0}
    )
    speakers = {cues[i].speaker_name for i in contributing}
    speaker = speakers.pop() if len(speakers) == 1 else None
    sentences.append(
        Sentence(
            index=len(sentences),
            start_time=cues[contributing[0]].start_time,
            end_time=cues[contributing[-1]].end_time,
            text=stripped,
            speaker_name=speaker,
        )
    )


# --- transcript generation ----------------------------------------------------------


def cues_to_transcript(
    event_id: str, cues: Sequence[Cue], generator: str, created_at: datetime
) -> Transcript:
    return Transcript(
        event_id=event_id,
        generator=generator,
        created_at=created_at,
        sentences=tuple(segment_sentences(cues)),
    )


def detect_caption_format(data: bytes, uri: str = "") -> str:
    head = data[:32].lstrip(b"\xef\xbb\xbf").lstrip()
    if head.startswith(b"WEBVTT"):
        return "webvtt"
    if uri.lower().endswith(".vtt"):
        return "webvtt"
    if uri.lower().endswith(".srt"):
        return "srt"
    return "srt" if head[:1].isdigit() else "webvtt"


def _validate_transcript_doc(doc: object) -> None:
    if not isinstance(doc, dict):
        raise BackendOutputInvalid("document is not an object")
    for key in ("event_id", "generator", "created_at", "sentences"):
        if key not in doc:
            raise BackendOutputInvalid(f"missing field: {key}")
    sentences = doc["sentences"]
    if not isinstance(sentences, list):
        raise BackendOutputInvalid("sentences is not a list")
    previous_start = None
    for i, sentence in enumerate(sentences):
        if not isinstance(sentence, dict):
            raise BackendOutputInvalid(f"sentence {i} is not an object")
        for key in ("index", "start_time", "end_time", "text"):
            if key not in sentence:
                raise BackendOutputInvalid(f"sentence {i} missing field: {key}")
        if sentence["index"] != i:
            raise BackendOutputInvalid(f"sentence indices not consecutive at {i}")
        if not isinstance(sentence["start_time"], (int, float)) or not isinstance(
            sentence["end_time"], (int, float)
        ):
            raise BackendOutputInvalid(f"sentence {i} has non-numeric times")
        if sentence["end_time"] < sentence["start_time"]:
            raise BackendOutputInvalid(f"sentence {i} ends before it starts")
        if previous_start is not None and sentence["start_time"] < previous_start:
            raise BackendOutputInvalid(f"sentence start times decrease at {i}")
        previous_start = sentence["start_time"]


def transcribe(
    event: Event,
    source: Optional[TranscriptSource],
    clock: Callable[[], datetime],
) -> Transcript:
    """Produce a Transcript for *event* from exactly one source.

    Caption sources are parsed and segmented locally; external sources invoke
    the configured command with `--media <path> --out <path>` and must write a
    valid transcript document.
    """
    if source is None:
        raise NoTranscriptSource(f"event {event.id} has no caption asset or backend")
    if isinstance(source, CaptionSource):
        if source.format == "webvtt":
            cues = parse_webvtt(source.data)
        elif source.format == "srt":
            cues = parse_srt(source.data)
        else:
            raise NoTranscriptSource(f"unknown caption format: {source.format}")
        return cues_to_transcript(event.id, cues, f"captions:{source.format}", clock())

    with tempfile.TemporaryDirectory(prefix="councilkit-transcribe-") as tmp:
        out_path = Path(tmp) / "transcript.json"
        argv = shlex.split(source.command) + [
            "--media",
            source.media_path,
            "--out",
            str(out_path),
        ]
        result = subprocess.run(argv, capture_output=True)
        if result.returncode != 0:
            raise BackendFailed(result.returncode)
        try:
            doc = json.loads(out_path.read_text("utf-8"))
        except FileNotFoundError:
            raise BackendOutputInvalid("backend wrote no output file") from None
        except (OSError, json.JSONDecodeError) as exc:
            raise BackendOutputInvalid(f"unreadable output: {exc}") from None
        _validate_transcript_doc(doc)
        sentences = tuple(
            Sentence(
                index=s["index"],
                start_time=float(s["start_time"]),
                end_time=float(s["end_time"]),
                text=str(s["text"]),
                speaker_name=s.get("speaker_name"),
            )
            for s in doc["sentences"]
        )
        return Transcript(
            event_id=event.id,
            generator=f"external:{source.name}",
            created_at=clock(),
            sentences=sentences,
        )
