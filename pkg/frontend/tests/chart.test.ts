import { describe, expect, it } from "vitest";

import { chartModel, renderChartSVG } from "../src/chart.js";
import type { ApiUsageSeries } from "../src/types.js";

const series = (gram: string, instance: string, percents: number[]): ApiUsageSeries => ({
  instance_slug: instance,
  gram,
  n: 1,
  points: percents.map((percent, i) => ({
    date: `2021-0${i + 1}-15`,
    count: Math.round(percent * 10),
    total: 1000,
    percent,
  })),
});

describe("chartModel", () => {
  it("two grams x one instance -> two lines", () => {
    const model = chartModel([
      series("hous", "alpha-city", [0.4, 0.3]),
      series("polic", "alpha-city", [0.2, 0.25]),
    ]);
    expect(model.mode).toBe("single");
    if (model.mode === "single") {
      expect(model.lines.map((l) => l.label)).toEqual([
        "hous — alpha-city",
        "polic — alpha-city",
      ]);
    }
  });

  it("2x2 facet mode builds a gram-by-instance panel grid", () => {
    const model = chartModel(
      [
        series("hous", "alpha-city", [0.4]),
        series("hous", "beta-county", [0.5]),
        series("polic", "alpha-city", [0.1]),
        series("polic", "beta-county", [0.2]),
      ],
      true,
    );
    expect(model.mode).toBe("facet");
    if (model.mode === "facet") {
      expect(model.grams).toEqual(["hous", "polic"]);
      expect(model.instances).toEqual(["alpha-city", "beta-county"]);
      expect(model.panels).toHaveLength(2);
      expect(model.panels[0]).toHaveLength(2);
      expect(model.panels[1][1][0].label).toBe("polic — beta-county");
      for (const row of model.panels) {
        for (const panel of row) {
          expect(panel).toHaveLength(1);
        }
      }
    }
  });

  it("missing gram/instance combinations leave empty panels", () => {
    const model = chartModel(
      [series("hous", "alpha-city", [0.4]), series("polic", "beta-county", [0.2])],
      true,
    );
    if (model.mode === "facet") {
      expect(model.panels[0][1]).toEqual([]); // hous / beta-county
      expect(model.panels[1][0]).toEqual([]); // polic / alpha-city
    }
  });

  it("empty input -> empty-state model", () => {
    expect(chartModel([])).toEqual({ mode: "empty" });
  });

  it("y values are the percents, untouched", () => {
    const model = chartModel([series("hous", "alpha-city", [0.4, 0.3])]);
    if (model.mode === "single") {
      expect(model.lines[0].points.map((p) => p.percent)).toEqual([0.4, 0.3]);
    }
  });
});

describe("renderChartSVG", () => {
  it("renders one polyline per line", () => {
    const svg = renderChartSVG(
      chartModel([
        series("hous", "alpha-city", [0.4, 0.3]),
        series("polic", "alpha-city", [0.2, 0.25]),
      ]),
    );
    expect(svg.match(/<polyline/g)).toHaveLength(2);
    expect(svg).toContain("hous — alpha-city");
  });

  it("renders a 2x2 grid of panels in facet mode", () => {
    const svg = renderChartSVG(
      chartModel(
        [
          series("hous", "alpha-city", [0.4]),
          series("hous", "beta-county", [0.5]),
          series("polic", "alpha-city", [0.1]),
          series("polic", "beta-county", [0.2]),
        ],
        true,
      ),
    );
    expect(svg.match(/data-panel=/g)).toHaveLength(4);
    expect(svg).toContain('data-panel="hous / alpha-city"');
    expect(svg).toContain('data-panel="polic / beta-county"');
  });

  it("empty model renders nothing", () => {
    expect(renderChartSVG({ mode: "empty" })).toBe("");
  });
});
