/** Payload shapes served by the councilkit JSON API. */

export interface ApiSearchResult {
  event_id: string;
  score: number;
  snippet: string;
  keywords: string[];
  session_datetime: string;
  body_name: string;
  video_uri: string;
  static_thumbnail_ref: string | null;
}

export interface ApiSearchResponse {
  results: ApiSearchResult[];
  total_count: number;
}

export interface ApiEvent {
  id: string;
  instance_slug: string;
  body: { name: string; description?: string };
  session_datetime: string;
  video_uri: string;
  static_thumbnail_ref: string | null;
  keywords: string[];
}

export interface ApiEventsResponse {
  events: ApiEvent[];
  total_count: number;
}

export interface ApiSentence {
  index: number;
  start_time: number;
  end_time: number;
  text: string;
  speaker_name?: string;
}

export interface ApiTranscript {
  event_id: string;
  generator: string;
  created_at: string;
  sentences: ApiSentence[];
}

export interface ApiInstanceManifest {
  instance_slug: string;
  event_count: number;
  first_event: string | null;
  last_event: string | null;
}

export interface ApiUsagePoint {
  date: string;
  count: number;
  total: number;
  percent: number;
}

export interface ApiUsageSeries {
  instance_slug: string;
  gram: string;
  n: number;
  points: ApiUsagePoint[];
}

export interface ApiNgramsResponse {
  series: ApiUsageSeries[];
}

export interface ApiMinutesItem {
  event_id: string;
  ordinal: number;
  name: string;
  matter_id: string | null;
  decision: string | null;
  votes: { person_name: string; decision: string }[];
}

export interface ApiMinutesResponse {
  event_id: string;
  minutes_items: ApiMinutesItem[];
}
