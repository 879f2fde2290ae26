/** Usage-trend chart view models and a dependency-free SVG renderer. */

import type { ApiUsageSeries } from "./types.js";

export interface ChartPoint {
  date: string;
  percent: number;
}

export interface ChartLine {
  gram: string;
  instance: string;
  label: string;
  points: ChartPoint[];
}

export interface SingleChartModel {
  mode: "single";
  lines: ChartLine[];
}

/** Fig-4-style grid: one row per gram, one column per instance. */
export interface FacetChartModel {
  mode: "facet";
  grams: string[];
  instances: string[];
  panels: ChartLine[][][]; // panels[row][col] -> lines (usually one)
}

export interface EmptyChartModel {
  mode: "empty";
}

export type ChartModel = SingleChartModel | FacetChartModel | EmptyChartModel;

function toLine(series: ApiUsageSeries): ChartLine {
  return {
    gram: series.gram,
    instance: series.instance_slug,
    label: `${series.gram} — ${series.instance_slug}`,
    points: series.points.map((p) => ({ date: p.date, percent: p.percent })),
  };
}

/** One line per (gram, instance) pair; facet mode lays them out as a grid. */
export function chartModel(seriesList: ApiUsageSeries[], facet = false): ChartModel {
  if (seriesList.length === 0) {
    return { mode: "empty" };
  }
  const lines = seriesList.map(toLine);
  if (!facet) {
    return { mode: "single", lines };
  }
  const grams = [...new Set(lines.map((l) => l.gram))].sort();
  const instances = [...new Set(lines.map((l) => l.instance))].sort();
  const panels = grams.map((gram) =>
    instances.map((instance) =>
      lines.filter((l) => l.gram === gram && l.instance === instance),
    ),
  );
  return { mode: "facet", grams, instances, panels };
}

// --- SVG rendering -----------------------------------------------------------

const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];

const PANEL_W = 320;
const PANEL_H = 180;
const MARGIN = { top: 18, right: 12, bottom: 24, left: 44 };

function scaleLinear(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

function dayNumber(iso: string): number {
  return Date.parse(iso + "T00:00:00Z") / 86_400_000;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function renderPanel(
  lines: ChartLine[],
  x0: number,
  y0: number,
  yMax: number,
  xDomain: [number, number],
  title: string,
): string {
  const plotX = scaleLinear(xDomain, [x0 + MARGIN.left, x0 + PANEL_W - MARGIN.right]);
  const plotY = scaleLinear([0, yMax || 1], [y0 + PANEL_H - MARGIN.bottom, y0 + MARGIN.top]);
  const parts: string[] = [];
  parts.push(
    `<rect x="${x0 + MARGIN.left}" y="${y0 + MARGIN.top}" width="${PANEL_W - MARGIN.left - MARGIN.right}" height="${PANEL_H - MARGIN.top - MARGIN.bottom}" class="panel-bg"/>`,
  );
  if (title) {
    parts.push(
      `<text x="${x0 + MARGIN.left}" y="${y0 + 12}" class="panel-title">${esc(title)}</text>`,
    );
  }
  parts.push(
    `<text x="${x0 + 4}" y="${y0 + MARGIN.top + 8}" class="axis-label">${(yMax || 1).toFixed(2)}%</text>`,
    `<text x="${x0 + 4}" y="${y0 + PANEL_H - MARGIN.bottom}" class="axis-label">0%</text>`,
  );
  lines.forEach((line, i) => {
    if (line.points.length === 0) return;
    const color = PALETTE[i % PALETTE.length];
    const coords = line.points
      .map((p) => `${plotX(dayNumber(p.date)).toFixed(1)},${plotY(p.percent).toFixed(1)}`)
      .join(" ");
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${coords}" data-line="${esc(line.label)}"/>`,
    );
  });
  return parts.join("");
}

/** Render a chart model to a standalone SVG string. */
export function renderChartSVG(model: ChartModel): string {
  if (model.mode === "empty") {
    return "";
  }
  const allLines = model.mode === "single" ? model.lines : model.panels.flat(2);
  const allPoints = allLines.flatMap((l) => l.points);
  const yMax = Math.max(0, ...allPoints.map((p) => p.percent));
  const days = allPoints.map((p) => dayNumber(p.date));
  const xDomain: [number, number] =
    days.length > 0 ? [Math.min(...days), Math.max(...days)] : [0, 1];

  if (model.mode === "single") {
    const body = renderPanel(model.lines, 0, 0, yMax, xDomain, "");
    const legend = model.lines
      .map((line, i) => {
        const color = PALETTE[i % PALETTE.length];
        const y = 14 + i * 14;
        return (
          `<rect x="${PANEL_W + 8}" y="${y - 8}" width="10" height="3" fill="${color}"/>` +
          `<text x="${PANEL_W + 22}" y="${y - 3}" class="legend-label">${esc(line.label)}</text>`
        );
      })
      .join("");
    const width = PANEL_W + 170;
    const height = Math.max(PANEL_H, 14 + model.lines.length * 14);
    return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="usage-chart">${body}${legend}</svg>`;
  }

  const rows = model.grams.length;
  const cols = model.instances.length;
  const panels: string[] = [];
  for (let row = 0; row < rows; row++) {
    for (let col = 0; col < cols; col++) {
      const title = `${model.grams[row]} / ${model.instances[col]}`;
      panels.push(
        `<g data-panel="${esc(title)}">` +
          renderPanel(model.panels[row][col], col * PANEL_W, row * PANEL_H, yMax, xDomain, title) +
          "</g>",
      );
    }
  }
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${cols * PANEL_W} ${rows * PANEL_H}" class="usage-chart facet">${panels.join("")}</svg>`;
}
