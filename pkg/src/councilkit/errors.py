"""Exception hierarchy for the councilkit engine."""

from __future__ import annotations


class CouncilKitError(Exception):
    """Base class for all engine errors."""


# --- record validation ---------------------------------------------------


class ValidationError(CouncilKitError):
    pass


class MissingField(ValidationError):
    def __init__(self, field: str):
        self.field = field
        super().__init__(f"missing required field: {field}")


class InvalidDatetime(ValidationError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"not a parseable UTC timestamp: {value!r}")


class InvalidUri(ValidationError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"not a valid URI: {value!r}")


class UnknownDecision(ValidationError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"unrecognized vote decision: {value!r}")


# --- feeds and assets -----------------------------------------------------


class SourceUnreachable(CouncilKitError):
    pass


class ParseError(CouncilKitError):
    def __init__(self, record_index: int, reason: str):
        self.record_index = record_index
        self.reason = reason
        super().__init__(f"record {record_index}: {reason}")


class NetworkError(CouncilKitError):
    def __init__(self, status: int | str, uri: str = ""):
        self.status = status
        self.uri = uri
        super().__init__(f"fetch failed ({status}): {uri}")


class HashMismatch(CouncilKitError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(f"cached bytes hash to {actual}, expected {expected}")


# --- captions and transcripts ----------------------------------------------


class MissingHeader(CouncilKitError):
    pass


class InvalidTiming(CouncilKitError):
    def __init__(self, location: int, detail: str = ""):
        self.location = location
        super().__init__(f"invalid cue timing at {location}: {detail}".rstrip(": "))


class InvalidBlock(CouncilKitError):
    def __init__(self, block_index: int, detail: str = ""):
        self.block_index = block_index
        super().__init__(f"malformed block {block_index}: {detail}".rstrip(": "))


class NoTranscriptSource(CouncilKitError):
    pass


class BackendFailed(CouncilKitError):
    def __init__(self, exit_status: int):
        self.exit_status = exit_status
        super().__init__(f"transcriber backend exited with status {exit_status}")


class BackendOutputInvalid(CouncilKitError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"transcriber backend output invalid: {reason}")


# --- text processing --------------------------------------------------------


class InvalidN(CouncilKitError):
    pass


# --- search ------------------------------------------------------------------


class EmptyQuery(CouncilKitError):
    pass


class UnknownEvent(CouncilKitError):
    def __init__(self, event_id: str):
        self.event_id = event_id
        super().__init__(f"event not indexed: {event_id}")


# --- analytics ----------------------------------------------------------------


class GramArityMismatch(CouncilKitError):
    def __init__(self, gram: str, expected: int, actual: int):
        self.gram = gram
        super().__init__(f"gram {gram!r} tokenizes to {actual} tokens, expected {expected}")


class GramMismatch(CouncilKitError):
    pass


class UnknownInstance(CouncilKitError):
    def __init__(self, slug: str):
        self.slug = slug
        super().__init__(f"no events stored for instance: {slug}")


# --- storage --------------------------------------------------------------------


class StoreError(CouncilKitError):
    pass


class UnknownCollection(StoreError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown collection: {name}")


class NotFound(StoreError):
    def __init__(self, collection: str, doc_id: str):
        self.collection = collection
        self.doc_id = doc_id
        super().__init__(f"{collection}/{doc_id} not found")


class UnsupportedVersion(StoreError):
    def __init__(self, version: object):
        self.version = version
        super().__init__(f"unsupported archive format_version: {version}")


class CorruptArchive(StoreError):
    pass


class BindError(CouncilKitError):
    def __init__(self, port: int, reason: str):
        self.port = port
        super().__init__(f"cannot bind port {port}: {reason}")
