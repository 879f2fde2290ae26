/** Event card view-model construction from /api/search results. */

import type { ApiSearchResult } from "./types.js";

export interface HighlightSpan {
  text: string;
  highlight: boolean;
}

/** The five card elements: thumbnail, date, committee, snippet, keywords. */
export interface EventCardView {
  eventId: string;
  thumbnailRef: string | null;
  dateLabel: string;
  committeeName: string;
  snippetSpans: HighlightSpan[];
  keywords: string[];
  videoUri: string;
}

const MONTHS = [
  "January", "February", "March", "April", "May", "June",
  "July", "August", "September", "October", "November", "December",
];

/** Render an ISO timestamp as "Month D, YYYY" (UTC calendar date). */
export function formatDate(isoTimestamp: string): string {
  const match = /^(\d{4})-(\d{2})-(\d{2})/.exec(isoTimestamp);
  if (!match) {
    throw new Error(`unparseable timestamp: ${isoTimestamp}`);
  }
  const [, year, month, day] = match;
  return `${MONTHS[Number(month) - 1]} ${Number(day)}, ${year}`;
}

/**
 * Split snippet markup into spans. Highlights derive only from `**` marker
 * pairs; an unpaired trailing marker is treated as literal text.
 */
export function parseHighlights(snippet: string): HighlightSpan[] {
  const spans: HighlightSpan[] = [];
  const pieces = snippet.split("**");
  // pieces alternate literal / highlighted; an even piece count means the
  // final marker was unpaired, so its tail stays literal
  const paired = pieces.length % 2 === 1;
  for (let i = 0; i < pieces.length; i++) {
    const text = !paired && i === pieces.length - 1 ? "**" + pieces[i] : pieces[i];
    if (text === "") continue;
    spans.push({ text, highlight: paired ? i % 2 === 1 : i % 2 === 1 && i < pieces.length - 1 });
  }
  return spans;
}

/** The results header always restates the API's own total_count. */
export function totalCountLabel(totalCount: number): string {
  return `${totalCount} events`;
}

/**
 * Convert one search result into a card view. Malformed payloads return
 * null; the caller suppresses the card and surfaces the error in the
 * console panel.
 */
export function toCard(result: unknown): EventCardView | null {
  const r = result as ApiSearchResult;
  if (
    !r ||
    typeof r.event_id !== "string" ||
    typeof r.session_datetime !== "string" ||
    typeof r.body_name !== "string" ||
    typeof r.snippet !== "string" ||
    !Array.isArray(r.keywords)
  ) {
    return null;
  }
  let dateLabel: string;
  try {
    dateLabel = formatDate(r.session_datetime);
  } catch {
    return null;
  }
  return {
    eventId: r.event_id,
    thumbnailRef: r.static_thumbnail_ref ?? null,
    dateLabel,
    committeeName: r.body_name,
    snippetSpans: parseHighlights(r.snippet),
    keywords: r.keywords.slice(0, 5).map(String),
    videoUri: typeof r.video_uri === "string" ? r.video_uri : "",
  };
}
