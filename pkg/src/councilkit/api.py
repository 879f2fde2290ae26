"""Read-only JSON API over a store and its search index.

Every endpoint body is the canonical serialization of a payload_* builder, so
HTTP responses are byte-equivalent to the corresponding library calls.
Ingestion and indexing stay CLI-side; the service never writes.
"""

from __future__ import annotations

import threading
from datetime import date
from typing import Any, Optional

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles

from . import analytics
from .config import Config
from .errors import EmptyQuery, GramArityMismatch, NotFound, UnknownInstance
from .index import Index, SearchResult, load_index, index_generation, search
from .models import format_utc, transcript_from_doc
from .store import Store, dataset_stats, dump_json_bytes, instance_slugs

DEFAULT_LIMIT = 10
MAX_LIMIT = 100


# --- payload builders (the library-call serialization layer) --------------------


def payload_instances(store: Store) -> dict[str, Any]:
    from .models import manifest_to_doc

    manifests = [manifest_to_doc(dataset_stats(store, slug)) for slug in instance_slugs(store)]
    return {"instances": manifests}


def _event_card_fields(store: Store, event_id: str) -> dict[str, Any]:
    doc = store.get("events", event_id)
    return {
        "id": doc["id"],
        "instance_slug": doc["instance_slug"],
        "body": doc["body"],
        "session_datetime": doc["session_datetime"],
        "video_uri": doc["video_uri"],
        "static_thumbnail_ref": doc["static_thumbnail_ref"],
        "keywords": doc["keywords"],
    }


def payload_events(
    store: Store,
    instance: Optional[str] = None,
    body: Optional[str] = None,
    date_from: Optional[date] = None,
    date_to: Optional[date] = None,
    limit: int = DEFAULT_LIMIT,
    offset: int = 0,
) -> dict[str, Any]:
    """Newest-first event listing with facet filters and pagination."""
    selected = []
    for event_id, doc in store.iter_docs("events"):
        if instance is not None and doc["instance_slug"] != instance:
            continue
        if body is not None and doc["body"]["name"] != body:
            continue
        day = doc["session_datetime"][:10]
        if date_from is not None and day < date_from.isoformat():
            continue
        if date_to is not None and day > date_to.isoformat():
            continue
        selected.append(doc)
    selected.sort(key=lambda d: (d["session_datetime"], d["id"]))
    selected.reverse()
    page = selected[offset : offset + limit]
    return {
        "events": [
            {
                "id": doc["id"],
                "instance_slug": doc["instance_slug"],
                "body": doc["body"],
                "session_datetime": doc["session_datetime"],
                "video_uri": doc["video_uri"],
                "static_thumbnail_ref": doc["static_thumbnail_ref"],
                "keywords": doc["keywords"],
            }
            for doc in page
        ],
        "total_count": len(selected),
    }


def payload_event(store: Store, event_id: str) -> dict[str, Any]:
    return store.get("events", event_id)


def payload_transcript(store: Store, event_id: str) -> dict[str, Any]:
    return store.get("transcripts", event_id)


def payload_minutes(store: Store, event_id: str) -> dict[str, Any]:
    if not store.exists("events", event_id):
        raise NotFound("events", event_id)
    items = [
        doc
        for doc_id, doc in store.iter_docs("minutes_items")
        if doc["event_id"] == event_id
    ]
    items.sort(key=lambda d: d["ordinal"])
    return {"event_id": event_id, "minutes_items": items}


def _result_to_doc(result: SearchResult) -> dict[str, Any]:
    return {
        "event_id": result.event_id,
        "score": result.score,
        "snippet": result.snippet,
        "keywords": list(result.keywords),
        "session_datetime": format_utc(result.session_datetime),
        "body_name": result.body_name,
    }


def payload_search(
    store: Store,
    index: Index,
    q: str,
    body: Optional[str] = None,
    date_from: Optional[date] = None,
    date_to: Optional[date] = None,
    sort: str = "relevance",
    limit: int = DEFAULT_LIMIT,
    offset: int = 0,
    recency_tau: Optional[float] = None,
) -> dict[str, Any]:
    def transcript_loader(event_id: str):
        return transcript_from_doc(store.get("transcripts", event_id))

    def keywords_loader(event_id: str) -> tuple[str, ...]:
        if store.exists("events", event_id):
            return tuple(store.get("events", event_id)["keywords"])
        return ()

    results, total = search(
        index,
        q,
        filters={"body": body, "date_from": date_from, "date_to": date_to},
        sort=sort,
        limit=limit,
        offset=offset,
        transcript_loader=transcript_loader,
        keywords_loader=keywords_loader,
        recency_tau=recency_tau,
    )
    enriched = []
    for result in results:
        doc = _result_to_doc(result)
        card = _event_card_fields(store, result.event_id)
        doc["video_uri"] = card["video_uri"]
        doc["static_thumbnail_ref"] = card["static_thumbnail_ref"]
        enriched.append(doc)
    return {"results": enriched, "total_count": total}


def payload_ngrams(
    store: Store,
    grams: list[str],
    n: Optional[int],
    date_from: date,
    date_to: date,
    instances: Optional[list[str]] = None,
    pool: bool = False,
    aggregate_mode: Optional[str] = None,
) -> dict[str, Any]:
    slugs = instances or instance_slugs(store)
    all_series = []
    for gram in grams:
        arity = n if n is not None else len(gram.split())
        per_instance = [
            analytics.daily_usage(store, slug, gram, arity, (date_from, date_to))
            for slug in slugs
        ]
        if pool:
            per_instance = [analytics.pool_instances(per_instance)]
        if aggregate_mode:
            per_instance = [analytics.aggregate(s, aggregate_mode) for s in per_instance]
        all_series.extend(per_instance)
    return analytics.series_to_payload(all_series)


# --- HTTP wiring --------------------------------------------------------------------


class _IndexCache:
    """Reloads the index snapshot only when the CURRENT generation moves."""

    def __init__(self, store_root: str):
        self.store_root = store_root
        self._lock = threading.Lock()
        self._generation: Optional[str] = None
        self._index: Optional[Index] = None

    def get(self) -> Index:
        generation = index_generation(self.store_root)
        with self._lock:
            if generation is not None and generation != self._generation:
                self._index = load_index(self.store_root)
                self._generation = generation
            if self._index is None:
                self._index = Index()
            return self._index


def _json_response(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=dump_json_bytes(payload),
        status_code=status_code,
        media_type="application/json",
    )


def _error(status_code: int, message: str) -> Response:
    return _json_response({"error": message}, status_code)


def _parse_date(value: Optional[str], name: str) -> Optional[date]:
    if value is None or value == "":
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise _BadParam(f"{name} must be YYYY-MM-DD")


class _BadParam(Exception):
    pass


def create_app(
    store: Store,
    config: Optional[Config] = None,
    static_dir: Optional[str] = None,
) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="councilkit", openapi_url=None)
    index_cache = _IndexCache(str(store.root))

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "malformed query parameters")

    @app.exception_handler(_BadParam)
    async def _bad_param_handler(request: Request, exc: _BadParam):
        return _error(400, str(exc))

    @app.exception_handler(NotFound)
    async def _not_found_handler(request: Request, exc: NotFound):
        return _error(404, str(exc))

    @app.exception_handler(UnknownInstance)
    async def _unknown_instance_handler(request: Request, exc: UnknownInstance):
        return _error(404, str(exc))

    @app.exception_handler(EmptyQuery)
    async def _empty_query_handler(request: Request, exc: EmptyQuery):
        return _error(400, "query has no tokens")

    @app.exception_handler(GramArityMismatch)
    async def _gram_arity_handler(request: Request, exc: GramArityMismatch):
        return _error(400, str(exc))

    def clamp_paging(limit: int, offset: int) -> tuple[int, int]:
        if limit < 1 or limit > MAX_LIMIT or offset < 0:
            raise _BadParam(f"limit must be 1..{MAX_LIMIT} and offset >= 0")
        return limit, offset

    @app.get("/api/instances")
    def get_instances():
        return _json_response(payload_instances(store))

    @app.get("/api/events")
    def get_events(
        instance: Optional[str] = None,
        body: Optional[str] = None,
        date_from: Optional[str] = Query(default=None, alias="from"),
        date_to: Optional[str] = Query(default=None, alias="to"),
        limit: int = DEFAULT_LIMIT,
        offset: int = 0,
    ):
        limit, offset = clamp_paging(limit, offset)
        return _json_response(
            payload_events(
                store,
                instance=instance,
                body=body,
                date_from=_parse_date(date_from, "from"),
                date_to=_parse_date(date_to, "to"),
                limit=limit,
                offset=offset,
            )
        )

    @app.get("/api/events/{event_id}")
    def get_event(event_id: str):
        return _json_response(payload_event(store, event_id))

    @app.get("/api/events/{event_id}/transcript")
    def get_transcript(event_id: str):
        return _json_response(payload_transcript(store, event_id))

    @app.get("/api/events/{event_id}/minutes")
    def get_minutes(event_id: str):
        return _json_response(payload_minutes(store, event_id))

    @app.get("/api/search")
    def get_search(
        q: str = "",
        body: Optional[str] = None,
        date_from: Optional[str] = Query(default=None, alias="from"),
        date_to: Optional[str] = Query(default=None, alias="to"),
        sort: str = "relevance",
        limit: int = DEFAULT_LIMIT,
        offset: int = 0,
    ):
        limit, offset = clamp_paging(limit, offset)
        if sort not in ("relevance", "date"):
            raise _BadParam("sort must be relevance or date")
        return _json_response(
            payload_search(
                store,
                index_cache.get(),
                q,
                body=body,
                date_from=_parse_date(date_from, "from"),
                date_to=_parse_date(date_to, "to"),
                sort=sort,
                limit=limit,
                offset=offset,
                recency_tau=config.recency_tau,
            )
        )

    @app.get("/api/ngrams")
    def get_ngrams(
        gram: list[str] = Query(default=[]),
        n: Optional[int] = None,
        date_from: Optional[str] = Query(default=None, alias="from"),
        date_to: Optional[str] = Query(default=None, alias="to"),
        instance: list[str] = Query(default=[]),
        pool: bool = False,
        aggregate: Optional[str] = None,
    ):
        if not gram:
            raise _BadParam("at least one gram is required")
        parsed_from = _parse_date(date_from, "from")
        parsed_to = _parse_date(date_to, "to")
        if parsed_from is None or parsed_to is None:
            raise _BadParam("from and to are required")
        if aggregate is not None and aggregate != "monthly" and not aggregate.startswith("rolling:"):
            raise _BadParam("aggregate must be monthly or rolling:<w>")
        try:
            payload = payload_ngrams(
                store,
                grams=gram,
                n=n,
                date_from=parsed_from,
                date_to=parsed_to,
                instances=instance or None,
                pool=pool,
                aggregate_mode=aggregate,
            )
        except ValueError as exc:
            raise _BadParam(str(exc))
        return _json_response(payload)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(
    store: Store,
    config: Config,
    static_dir: Optional[str] = None,
) -> None:
    """Run the HTTP service; raises BindError when the port is taken."""
    import uvicorn

    from .errors import BindError

    app = create_app(store, config, static_dir)
    try:
        uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="warning")
    except OSError as exc:
        raise BindError(config.port, str(exc)) from None
