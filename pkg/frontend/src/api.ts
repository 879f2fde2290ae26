/** Typed client over the councilkit JSON API with last-issued-wins queries. */

import type {
  ApiEvent,
  ApiEventsResponse,
  ApiInstanceManifest,
  ApiMinutesResponse,
  ApiNgramsResponse,
  ApiSearchResponse,
  ApiTranscript,
} from "./types.js";
import type { SearchState } from "./state.js";

type FetchLike = (url: string) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiClient {
  private fetchImpl: FetchLike;
  private searchToken = 0;

  constructor(private baseUrl = "", fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? ((url) => fetch(url));
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path);
    if (!response.ok) {
      throw new Error(`API ${response.status} for ${path}`);
    }
    return (await response.json()) as T;
  }

  instances(): Promise<{ instances: ApiInstanceManifest[] }> {
    return this.getJson("/api/instances");
  }

  event(eventId: string): Promise<ApiEvent> {
    return this.getJson(`/api/events/${encodeURIComponent(eventId)}`);
  }

  transcript(eventId: string): Promise<ApiTranscript> {
    return this.getJson(`/api/events/${encodeURIComponent(eventId)}/transcript`);
  }

  minutes(eventId: string): Promise<ApiMinutesResponse> {
    return this.getJson(`/api/events/${encodeURIComponent(eventId)}/minutes`);
  }

  events(params: { instance?: string; limit?: number; offset?: number }): Promise<ApiEventsResponse> {
    const search = new URLSearchParams();
    if (params.instance) search.set("instance", params.instance);
    if (params.limit) search.set("limit", String(params.limit));
    if (params.offset) search.set("offset", String(params.offset));
    return this.getJson(`/api/events?${search.toString()}`);
  }

  /**
   * Issue a search; when several are in flight, only the most recently
   * issued one resolves — stale responses resolve to null and must not
   * touch previously rendered results.
   */
  async search(state: SearchState, limit = 10): Promise<ApiSearchResponse | null> {
    const token = ++this.searchToken;
    const params = new URLSearchParams({ q: state.q, limit: String(limit) });
    if (state.body) params.set("body", state.body);
    if (state.from) params.set("from", state.from);
    if (state.to) params.set("to", state.to);
    if (state.sort !== "relevance") params.set("sort", state.sort);
    if (state.offset) params.set("offset", String(state.offset));
    const payload = await this.getJson<ApiSearchResponse>(`/api/search?${params.toString()}`);
    if (token !== this.searchToken) {
      return null; // superseded by a newer query
    }
    return payload;
  }

  ngrams(params: {
    grams: string[];
    from: string;
    to: string;
    instances?: string[];
    pool?: boolean;
    aggregate?: string;
  }): Promise<ApiNgramsResponse> {
    const search = new URLSearchParams();
    for (const gram of params.grams) search.append("gram", gram);
    search.set("from", params.from);
    search.set("to", params.to);
    for (const slug of params.instances ?? []) search.append("instance", slug);
    if (params.pool) search.set("pool", "true");
    if (params.aggregate) search.set("aggregate", params.aggregate);
    return this.getJson(`/api/ngrams?${search.toString()}`);
  }
}
