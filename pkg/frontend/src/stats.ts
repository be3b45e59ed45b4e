// Aggregation helpers shared by the figure builders: group rows by a
// label, then reduce repeated observations (seeds or ensemble members)
// at each x position to a median curve with a min-max envelope.

import { max, median, min } from "d3-array";

import type { ResultRow } from "./csv.js";

export function groupBy<T>(
  items: T[],
  keyOf: (item: T) => string,
): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const item of items) {
    const key = keyOf(item);
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(item);
    } else {
      groups.set(key, [item]);
    }
  }
  return groups;
}

export interface EnvelopePoint {
  x: number;
  median: number;
  lo: number;
  hi: number;
}

/** Median and min-max range of `value` at each `index`, sorted by index. */
export function envelopeByIndex(rows: ResultRow[]): EnvelopePoint[] {
  const byIndex = new Map<number, number[]>();
  for (const row of rows) {
    const bucket = byIndex.get(row.index);
    if (bucket) {
      bucket.push(row.value);
    } else {
      byIndex.set(row.index, [row.value]);
    }
  }
  const points: EnvelopePoint[] = [];
  for (const [x, values] of byIndex) {
    points.push({
      x,
      median: median(values) as number,
      lo: min(values) as number,
      hi: max(values) as number,
    });
  }
  points.sort((a, b) => a.x - b.x);
  return points;
}
