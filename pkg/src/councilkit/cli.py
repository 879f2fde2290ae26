"""councilkit command line: ingest, transcribe, index, search, ngram, stats,
export, import, serve, fixtures, stem."""

from __future__ import annotations

import sys
from dataclasses import replace
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Optional

import click

from . import analytics, fixtures as fixtures_mod
from .api import payload_ngrams, payload_search
from .captions import CaptionSource, ExternalSource, detect_caption_format, transcribe
from .config import Config, load_config
from .errors import CouncilKitError, NoTranscriptSource
from .index import load_index, rebuild_from_store
from .ingest import AssetCache, ingest_feed, load_feed
from .models import event_from_doc, transcript_to_doc
from .store import Store, dump_json, export_zip, import_zip, refresh_manifests
from .textproc import stem_tokens


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _parse_cli_date(value: Optional[str], flag: str) -> Optional[date]:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise click.BadParameter(f"{flag} must be YYYY-MM-DD, got {value!r}") from None


def _build_config(config_path: Optional[str], store: Optional[str], cache: Optional[str]) -> Config:
    config = load_config(config_path) if config_path else Config()
    if store:
        config.store_root = store
    if cache:
        config.cache_root = cache
    return config


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--store", "store_root", type=click.Path(), default=None, help="Store root directory.")
@click.option("--cache", "cache_root", type=click.Path(), default=None, help="Asset cache directory.")
@click.pass_context
def main(ctx: click.Context, config_path: Optional[str], store_root: Optional[str], cache_root: Optional[str]):
    """Curate, search, and analyze municipal council meeting records."""
    ctx.obj = _build_config(config_path, store_root, cache_root)


@main.command()
@click.option("--feed", required=True, help="Feed file path or URL.")
@click.option("--instance", "instance_slug", default=None, help="Instance slug for records lacking one.")
@click.option("--fetch-video", is_flag=True, default=False)
@click.pass_obj
def ingest(config: Config, feed: str, instance_slug: Optional[str], fetch_video: bool):
    """Load a gatherer feed and ingest every record."""
    store = Store(config.store_root)
    cache = AssetCache(config.cache_root)
    records = load_feed(feed)
    outcomes = ingest_feed(
        records,
        store,
        cache,
        instance_slug=instance_slug or config.instance_slug,
        fetch_video=fetch_video or config.fetch_video,
    )
    transcribed = sum(1 for o in outcomes if o.transcribed)
    click.echo(f"ingested {len(outcomes)} events ({transcribed} transcribed)")


@main.command(name="transcribe")
@click.option("--event", "event_id", default=None, help="Only this event id.")
@click.option("--backend", default=None, help="External transcriber name (uses transcriber_cmd).")
@click.pass_obj
def transcribe_cmd(config: Config, event_id: Optional[str], backend: Optional[str]):
    """Produce transcripts for events that still lack one."""
    store = Store(config.store_root)
    cache = AssetCache(config.cache_root)
    targets = [event_id] if event_id else store.list("events")
    done = skipped = 0
    for target in targets:
        if store.exists("transcripts", target):
            skipped += 1
            continue
        event = event_from_doc(store.get("events", target))
        assets = cache.event_assets(target) or {}
        source = None
        if "caption" in assets:
            path = cache.object_path(assets["caption"]["content_hash"])
            data = path.read_bytes()
            source = CaptionSource(data, assets["caption"].get("format") or detect_caption_format(data))
        elif backend and config.transcriber_cmd:
            media = assets.get("video", {}).get("content_hash")
            media_path = str(cache.object_path(media)) if media else event.video_uri
            source = ExternalSource(backend, config.transcriber_cmd, media_path)
        try:
            transcript = transcribe(event, source, _utc_now)
        except NoTranscriptSource:
            skipped += 1
            continue
        store.put_if_changed(
            "transcripts", target, transcript_to_doc(transcript), ignore_fields=("created_at",)
        )
        done += 1
    click.echo(f"transcribed {done} events, skipped {skipped}")


@main.command()
@click.pass_obj
def index(config: Config):
    """Rebuild the inverted index and stamp event keywords."""
    store = Store(config.store_root)
    built = rebuild_from_store(store)
    click.echo(
        f"indexed {built.document_count} events, {len(built.postings)} terms"
    )


@main.command()
@click.argument("query")
@click.option("--body", default=None)
@click.option("--from", "date_from", default=None)
@click.option("--to", "date_to", default=None)
@click.option("--sort", type=click.Choice(["relevance", "date"]), default="relevance")
@click.option("--limit", default=10)
@click.option("--offset", default=0)
@click.pass_obj
def search(config: Config, query: str, body: Optional[str], date_from: Optional[str],
           date_to: Optional[str], sort: str, limit: int, offset: int):
    """Keyword search; prints the same JSON the API serves."""
    store = Store(config.store_root)
    idx = load_index(config.store_root)
    payload = payload_search(
        store,
        idx,
        query,
        body=body,
        date_from=_parse_cli_date(date_from, "--from"),
        date_to=_parse_cli_date(date_to, "--to"),
        sort=sort,
        limit=limit,
        offset=offset,
        recency_tau=config.recency_tau,
    )
    click.echo(dump_json(payload), nl=False)


@main.command()
@click.option("--gram", "grams", multiple=True, required=True)
@click.option("--from", "date_from", required=True)
@click.option("--to", "date_to", required=True)
@click.option("--instance", "instances", multiple=True)
@click.option("--pool", is_flag=True, default=False)
@click.option("--aggregate", "aggregate_mode", default=None, help="monthly or rolling:<w>")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write to file instead of stdout.")
@click.option("--plot", "plot_path", type=click.Path(), default=None, help="Render a usage chart image.")
@click.option("--facet", is_flag=True, default=False, help="Plot a gram x instance grid.")
@click.pass_obj
def ngram(config: Config, grams: tuple[str, ...], date_from: str, date_to: str,
          instances: tuple[str, ...], pool: bool, aggregate_mode: Optional[str],
          fmt: str, out_path: Optional[str], plot_path: Optional[str], facet: bool):
    """Daily usage series for stemmed n-grams; csv/json plus optional figure."""
    store = Store(config.store_root)
    payload = payload_ngrams(
        store,
        grams=list(grams),
        n=None,
        date_from=_parse_cli_date(date_from, "--from"),
        date_to=_parse_cli_date(date_to, "--to"),
        instances=list(instances) or None,
        pool=pool,
        aggregate_mode=aggregate_mode,
    )
    series_list = _series_from_payload(payload)
    if fmt == "json":
        text = dump_json(payload)
    else:
        text = analytics.series_csv_text(series_list)
    if out_path:
        Path(out_path).write_text(text, "utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)
    if plot_path:
        from .plots import render_usage_chart

        render_usage_chart(series_list, plot_path, facet=facet)
        click.echo(f"wrote {plot_path}")


def _series_from_payload(payload: dict) -> list[analytics.UsageSeries]:
    result = []
    for entry in payload["series"]:
        points = tuple(
            analytics.UsagePoint(
                date.fromisoformat(p["date"]), entry["gram"], p["count"], p["total"], p["percent"]
            )
            for p in entry["points"]
        )
        result.append(
            analytics.UsageSeries(entry["instance_slug"], entry["gram"], entry["n"], points)
        )
    return result


@main.command()
@click.option("--instance", "instance_slug", default=None)
@click.pass_obj
def stats(config: Config, instance_slug: Optional[str]):
    """Per-instance event counts and first/last session dates."""
    store = Store(config.store_root)
    manifests = refresh_manifests(store)
    if instance_slug:
        manifests = [m for m in manifests if m.instance_slug == instance_slug]
    click.echo(f"{'Instance':<28} {'Events':>6}  {'First Event':<12} {'Last Event':<12}")
    for manifest in manifests:
        click.echo(
            f"{manifest.instance_slug:<28} {manifest.event_count:>6}  "
            f"{manifest.first_event.isoformat() if manifest.first_event else '-':<12} "
            f"{manifest.last_event.isoformat() if manifest.last_event else '-':<12}"
        )


@main.command()
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--instance", "instances", multiple=True)
@click.pass_obj
def export(config: Config, out_path: str, instances: tuple[str, ...]):
    """Write selected instances (default: all) to a ZIP archive."""
    from .store import instance_slugs

    store = Store(config.store_root)
    selected = list(instances) or instance_slugs(store)
    path = export_zip(store, selected, out_path)
    click.echo(f"exported {len(selected)} instances to {path}")


@main.command(name="import")
@click.option("--archive", required=True, type=click.Path(exists=True))
@click.pass_obj
def import_cmd(config: Config, archive: str):
    """Load a dataset archive into the store."""
    store = Store(config.store_root)
    manifests = import_zip(archive, store)
    total = sum(m.event_count for m in manifests)
    click.echo(f"imported {len(manifests)} instances ({total} events)")


@main.command()
@click.option("--port", default=None, type=int)
@click.option("--static-dir", default=None, type=click.Path(exists=True))
@click.pass_obj
def serve(config: Config, port: Optional[int], static_dir: Optional[str]):
    """Serve the read-only JSON API (and optionally the web UI)."""
    from .api import serve as run_server

    if port is not None:
        config = replace_port(config, port)
    store = Store(config.store_root)
    click.echo(f"serving on http://127.0.0.1:{config.port}")
    run_server(store, config, static_dir)


def replace_port(config: Config, port: int) -> Config:
    config.port = port
    return config


@main.group()
def fixtures():
    """Synthetic corpus generation."""


@fixtures.command(name="generate")
@click.option("--seed", default=42, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--instances", default=None, help="Comma-separated slugs.")
@click.option("--events-per-instance", default=None, type=int)
@click.option("--from", "date_from", default=None)
@click.option("--to", "date_to", default=None)
def fixtures_generate(seed: int, out_dir: str, instances: Optional[str],
                      events_per_instance: Optional[int], date_from: Optional[str],
                      date_to: Optional[str]):
    """Generate a deterministic synthetic corpus with oracle sidecars."""
    spec = fixtures_mod.FixtureSpec(seed=seed)
    if instances:
        spec = replace(spec, instances=tuple(s.strip() for s in instances.split(",") if s.strip()))
    if events_per_instance is not None:
        spec = replace(spec, events_per_instance=events_per_instance)
    if date_from or date_to:
        span = (
            _parse_cli_date(date_from, "--from") or spec.date_span[0],
            _parse_cli_date(date_to, "--to") or spec.date_span[1],
        )
        spec = fixtures_mod.spec_for_span(spec, span)
    out = fixtures_mod.generate(spec, out_dir)
    click.echo(f"generated fixture corpus at {out}")


@main.command()
@click.argument("words", nargs=-1, required=True)
def stem(words: tuple[str, ...]):
    """Print word -> stem pairs (debug helper)."""
    for word, stemmed in zip(words, stem_tokens([w.lower() for w in words])):
        click.echo(f"{word}\t{stemmed}")


def run() -> None:
    try:
        main(standalone_mode=True)
    except CouncilKitError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
