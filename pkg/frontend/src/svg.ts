// Standalone SVG renderer for figure descriptions: axes with sensible
// tick placement, median curves, translucent min-max envelopes, a
// dashed reference line, and a legend.  Output is a complete SVG
// document; no DOM is involved.

import { scaleLinear, scaleLog } from "d3-scale";
import { area, line } from "d3-shape";

import type { FigureSpec, Series } from "./figures.js";

const WIDTH = 760;
const HEIGHT = 440;
const MARGIN = { top: 48, right: 200, bottom: 56, left: 78 };

const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
  "#bab0ac",
  "#ff9da7",
];

function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

interface Extent {
  min: number;
  max: number;
}

function dataExtent(spec: FigureSpec, axis: "x" | "y"): Extent {
  let lo = Infinity;
  let hi = -Infinity;
  for (const series of spec.series) {
    for (const p of series.points) {
      const v = axis === "x" ? p.x : p.y;
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
    if (axis === "y" && series.envelope) {
      for (const band of series.envelope) {
        lo = Math.min(lo, band.lo);
        hi = Math.max(hi, band.hi);
      }
    }
  }
  if (axis === "y" && spec.refLineY !== undefined) {
    lo = Math.min(lo, spec.refLineY);
    hi = Math.max(hi, spec.refLineY);
  }
  return { min: lo, max: hi };
}

/** Drop points a log axis cannot place (the data are positive by
 * construction; an exact zero would only appear if a randomized value
 * matched the oracle to the last bit). */
function positive(series: Series): Series {
  return {
    ...series,
    points: series.points.filter((p) => p.y > 0),
    envelope: series.envelope?.filter((band) => band.lo > 0),
  };
}

export function renderFigure(spec: FigureSpec): string {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const allSeries =
    spec.yType === "log" ? spec.series.map(positive) : spec.series;
  const drawable = { ...spec, series: allSeries };

  const xExtent = dataExtent(drawable, "x");
  const yExtent = dataExtent(drawable, "y");
  const x = scaleLinear()
    .domain([xExtent.min, xExtent.max])
    .range([0, innerW])
    .nice();
  const y = (spec.yType === "log" ? scaleLog() : scaleLinear())
    .domain([yExtent.min, yExtent.max])
    .range([innerH, 0])
    .nice();

  const toPath = line<{ x: number; y: number }>()
    .x((p) => x(p.x))
    .y((p) => y(p.y));
  const toBand = area<{ x: number; lo: number; hi: number }>()
    .x((band) => x(band.x))
    .y0((band) => y(band.lo))
    .y1((band) => y(band.hi));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
      `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
      `font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(`<g transform="translate(${MARGIN.left},${MARGIN.top})">`);

  // gridlines and ticks
  const xTicks = x.ticks(8);
  const xFormat = x.tickFormat(8);
  const yTicks = y.ticks(6);
  const yFormat = y.tickFormat(6);
  for (const t of yTicks) {
    const label = yFormat(t);
    if (label === "") continue; // log scales skip minor ticks
    const py = y(t);
    parts.push(
      `<line x1="0" y1="${py.toFixed(2)}" x2="${innerW}" ` +
        `y2="${py.toFixed(2)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="-8" y="${(py + 4).toFixed(2)}" text-anchor="end" ` +
        `font-size="12" fill="#333">${escapeText(label)}</text>`,
    );
  }
  for (const t of xTicks) {
    const px = x(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${innerH}" x2="${px.toFixed(2)}" ` +
        `y2="${innerH + 5}" stroke="#333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px.toFixed(2)}" y="${innerH + 20}" ` +
        `text-anchor="middle" font-size="12" fill="#333">` +
        `${escapeText(xFormat(t))}</text>`,
    );
  }

  // axes
  parts.push(
    `<line x1="0" y1="${innerH}" x2="${innerW}" y2="${innerH}" ` +
      `stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="0" y1="0" x2="0" y2="${innerH}" stroke="#333" ` +
      `stroke-width="1"/>`,
  );

  // reference line (break-even)
  if (spec.refLineY !== undefined) {
    const py = y(spec.refLineY);
    parts.push(
      `<line class="refline" x1="0" y1="${py.toFixed(2)}" ` +
        `x2="${innerW}" y2="${py.toFixed(2)}" stroke="#666" ` +
        `stroke-width="1.5" stroke-dasharray="6 4"/>`,
    );
  }

  // envelopes first, curves on top
  drawable.series.forEach((series, i) => {
    if (!series.envelope || series.envelope.length < 2) return;
    const d = toBand(series.envelope);
    if (!d) return;
    parts.push(
      `<path class="envelope" d="${d}" fill="${PALETTE[i % PALETTE.length]}" ` +
        `fill-opacity="0.15" stroke="none"/>`,
    );
  });
  drawable.series.forEach((series, i) => {
    if (series.points.length === 0) return;
    const d = toPath(series.points);
    if (!d) return;
    parts.push(
      `<path class="series" d="${d}" fill="none" ` +
        `stroke="${PALETTE[i % PALETTE.length]}" stroke-width="2"/>`,
    );
  });

  // legend
  drawable.series.forEach((series, i) => {
    const ly = 10 + i * 20;
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      `<line x1="${innerW + 16}" y1="${ly}" x2="${innerW + 44}" ` +
        `y2="${ly}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${innerW + 50}" y="${ly + 4}" font-size="12" ` +
        `fill="#333">${escapeText(series.label)}</text>`,
    );
  });

  // titles
  parts.push(
    `<text x="${innerW / 2}" y="-20" text-anchor="middle" ` +
      `font-size="15" fill="#111">${escapeText(spec.title)}</text>`,
  );
  parts.push(
    `<text x="${innerW / 2}" y="${innerH + 42}" text-anchor="middle" ` +
      `font-size="13" fill="#333">${escapeText(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text transform="rotate(-90)" x="${-innerH / 2}" y="-56" ` +
      `text-anchor="middle" font-size="13" fill="#333">` +
      `${escapeText(spec.yLabel)}</text>`,
  );

  parts.push("</g>");
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
