import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DEFAULT_STATE } from "../src/state.js";

function deferredFetch() {
  const pending: { url: string; resolve: (body: unknown) => void }[] = [];
  const fetchImpl = (url: string) =>
    new Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>((resolve) => {
      pending.push({
        url,
        resolve: (body: unknown) =>
          resolve({ ok: true, status: 200, json: async () => body }),
      });
    });
  return { pending, fetchImpl };
}

describe("ApiClient.search last-issued-wins", () => {
  it("a stale response resolves to null", async () => {
    const { pending, fetchImpl } = deferredFetch();
    const client = new ApiClient("", fetchImpl);

    const first = client.search({ ...DEFAULT_STATE, q: "housing" });
    const second = client.search({ ...DEFAULT_STATE, q: "housing levy" });
    expect(pending).toHaveLength(2);

    // resolve out of order: the stale (first) response lands last
    pending[1].resolve({ results: [{ marker: "second" }], total_count: 1 });
    const winner = await second;
    pending[0].resolve({ results: [{ marker: "first" }], total_count: 9 });
    const stale = await first;

    expect(winner?.total_count).toBe(1);
    expect(stale).toBeNull();
  });

  it("a single query resolves normally", async () => {
    const { pending, fetchImpl } = deferredFetch();
    const client = new ApiClient("", fetchImpl);
    const query = client.search({ ...DEFAULT_STATE, q: "parks" });
    pending[0].resolve({ results: [], total_count: 0 });
    expect(await query).toEqual({ results: [], total_count: 0 });
  });

  it("builds facet and sort parameters", async () => {
    const { pending, fetchImpl } = deferredFetch();
    const client = new ApiClient("", fetchImpl);
    void client.search({
      q: "housing",
      body: "Full Council",
      from: "2021-01-01",
      to: "2021-12-31",
      sort: "date",
      offset: 10,
    });
    const url = pending[0].url;
    expect(url).toContain("/api/search?");
    expect(url).toContain("q=housing");
    expect(url).toContain("body=Full+Council");
    expect(url).toContain("from=2021-01-01");
    expect(url).toContain("to=2021-12-31");
    expect(url).toContain("sort=date");
    expect(url).toContain("offset=10");
  });
});

describe("ApiClient.ngrams", () => {
  it("repeats gram and instance parameters", async () => {
    const { pending, fetchImpl } = deferredFetch();
    const client = new ApiClient("", fetchImpl);
    void client.ngrams({
      grams: ["housing", "police"],
      from: "2021-01-01",
      to: "2021-12-31",
      instances: ["alpha-city", "beta-county"],
      pool: true,
      aggregate: "monthly",
    });
    const url = pending[0].url;
    expect(url.match(/gram=/g)).toHaveLength(2);
    expect(url.match(/instance=/g)).toHaveLength(2);
    expect(url).toContain("pool=true");
    expect(url).toContain("aggregate=monthly");
  });
});

describe("ApiClient errors", () => {
  it("raises on non-2xx", async () => {
    const client = new ApiClient("", async () => ({
      ok: false,
      status: 404,
      json: async () => ({}),
    }));
    await expect(client.event("nope")).rejects.toThrow("404");
  });
});
