import { describe, expect, it } from "vitest";

import { formatDate, parseHighlights, toCard, totalCountLabel } from "../src/cards.js";

const FIG1_STYLE_RESULT = {
  event_id: "456c666ffb79192d",
  score: 2.43,
  snippet: "... the governor is also proposed legislation around **missing middle housing**.",
  keywords: ["copper wire", "hb", "copper", "wire", "grocery workers"],
  session_datetime: "2022-01-24T09:30:00Z",
  body_name: "Council Briefing",
  video_uri: "https://media.example/x.mp4",
  static_thumbnail_ref: "thumbs/x.jpg",
};

describe("toCard", () => {
  it("carries exactly the five card elements", () => {
    const card = toCard(FIG1_STYLE_RESULT);
    expect(card).not.toBeNull();
    // 1. thumbnail, 2. date, 3. committee, 4. snippet, 5. keywords
    expect(card!.thumbnailRef).toBe("thumbs/x.jpg");
    expect(card!.dateLabel).toBe("January 24, 2022");
    expect(card!.committeeName).toBe("Council Briefing");
    expect(card!.snippetSpans.length).toBeGreaterThan(0);
    expect(card!.keywords).toEqual([
      "copper wire", "hb", "copper", "wire", "grocery workers",
    ]);
  });

  it("turns ** segments into a single highlighted span", () => {
    const card = toCard(FIG1_STYLE_RESULT)!;
    const highlighted = card.snippetSpans.filter((s) => s.highlight);
    expect(highlighted).toEqual([{ text: "missing middle housing", highlight: true }]);
    const literal = card.snippetSpans.filter((s) => !s.highlight).map((s) => s.text);
    expect(literal).toEqual([
      "... the governor is also proposed legislation around ",
      ".",
    ]);
  });

  it("suppresses malformed payloads", () => {
    expect(toCard(null)).toBeNull();
    expect(toCard({})).toBeNull();
    expect(toCard({ ...FIG1_STYLE_RESULT, session_datetime: 42 })).toBeNull();
    expect(toCard({ ...FIG1_STYLE_RESULT, keywords: "not-a-list" })).toBeNull();
    expect(toCard({ ...FIG1_STYLE_RESULT, session_datetime: "junk" })).toBeNull();
  });

  it("keeps at most five keywords", () => {
    const card = toCard({
      ...FIG1_STYLE_RESULT,
      keywords: ["a", "b", "c", "d", "e", "f", "g"],
    })!;
    expect(card.keywords).toEqual(["a", "b", "c", "d", "e"]);
  });

  it("handles an empty snippet with no spans", () => {
    const card = toCard({ ...FIG1_STYLE_RESULT, snippet: "" })!;
    expect(card.snippetSpans).toEqual([]);
  });

  it("handles zero keywords", () => {
    const card = toCard({ ...FIG1_STYLE_RESULT, keywords: [] })!;
    expect(card.keywords).toEqual([]);
  });
});

describe("parseHighlights", () => {
  it("alternates literal and highlighted spans", () => {
    expect(parseHighlights("a **b** c **d**")).toEqual([
      { text: "a ", highlight: false },
      { text: "b", highlight: true },
      { text: " c ", highlight: false },
      { text: "d", highlight: true },
    ]);
  });

  it("treats an unpaired marker as literal text", () => {
    expect(parseHighlights("oops ** trailing")).toEqual([
      { text: "oops ", highlight: false },
      { text: "** trailing", highlight: false },
    ]);
  });

  it("only ** produces highlights", () => {
    const spans = parseHighlights("no <b>html</b> or *single* markers");
    expect(spans).toEqual([
      { text: "no <b>html</b> or *single* markers", highlight: false },
    ]);
  });
});

describe("totalCountLabel", () => {
  it("restates the API total verbatim", () => {
    expect(totalCountLabel(245)).toBe("245 events");
    expect(totalCountLabel(0)).toBe("0 events");
  });
});

describe("formatDate", () => {
  it("renders Month D, YYYY", () => {
    expect(formatDate("2022-02-07T09:30:00Z")).toBe("February 7, 2022");
    expect(formatDate("2021-12-31T23:59:59Z")).toBe("December 31, 2021");
  });

  it("throws on junk", () => {
    expect(() => formatDate("not-a-date")).toThrow();
  });
});
