/** Query state lives in the URL so searches are shareable. */

export interface SearchState {
  q: string;
  body: string | null; // single-select facet
  from: string | null;
  to: string | null;
  sort: "relevance" | "date";
  offset: number;
}

export const DEFAULT_STATE: SearchState = {
  q: "",
  body: null,
  from: null,
  to: null,
  sort: "relevance",
  offset: 0,
};

export function parseQueryState(search: string): SearchState {
  const params = new URLSearchParams(search);
  const sort = params.get("sort") === "date" ? "date" : "relevance";
  const offset = Number(params.get("offset") ?? "0");
  return {
    q: params.get("q") ?? "",
    body: params.get("body"),
    from: params.get("from"),
    to: params.get("to"),
    sort,
    offset: Number.isFinite(offset) && offset >= 0 ? Math.floor(offset) : 0,
  };
}

export function buildQueryString(state: SearchState): string {
  const params = new URLSearchParams();
  if (state.q) params.set("q", state.q);
  if (state.body) params.set("body", state.body);
  if (state.from) params.set("from", state.from);
  if (state.to) params.set("to", state.to);
  if (state.sort !== "relevance") params.set("sort", state.sort);
  if (state.offset > 0) params.set("offset", String(state.offset));
  const text = params.toString();
  return text ? `?${text}` : "";
}
