// One figure per experiment: each builder turns parsed result rows into
// a plain figure description (series of points, optional min-max
// envelopes, axis types) that the SVG renderer draws without knowing
// anything about the experiments.

import type { ResultRow } from "./csv.js";
import { envelopeByIndex, groupBy } from "./stats.js";

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface EnvelopeBand {
  x: number;
  lo: number;
  hi: number;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
  envelope?: EnvelopeBand[];
}

export interface FigureSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  yType: "linear" | "log";
  series: Series[];
  /** horizontal dashed reference line (the break-even ratio) */
  refLineY?: number;
}

export const FIGURE_EXPERIMENTS = [
  "eig-sensitivity",
  "eig-error",
  "control-lmp",
  "theta-sensitivity",
  "ensemble-lmp",
] as const;

export type FigureExperiment = (typeof FIGURE_EXPERIMENTS)[number];

function medianSeries(label: string, rows: ResultRow[]): Series {
  const env = envelopeByIndex(rows);
  return {
    label,
    points: env.map((p) => ({ x: p.x, y: p.median })),
    envelope: env.map((p) => ({ x: p.x, lo: p.lo, hi: p.hi })),
  };
}

function plainSeries(label: string, rows: ResultRow[]): Series {
  const points = rows
    .map((row) => ({ x: row.index, y: row.value }))
    .sort((a, b) => a.x - b.x);
  return { label, points };
}

// Leading eigenvalues of the system matrix over covariance-shape grids;
// one curve per grid cell, log scale to span the decay.
function eigSensitivity(rows: ResultRow[]): FigureSpec {
  const eigs = rows.filter((row) => row.metric === "eigenvalue");
  const series = [...groupBy(eigs, (row) => row.variant).entries()].map(
    ([variant, group]) => plainSeries(variant, group),
  );
  return {
    title: "Spectrum of the assimilation system vs covariance shape",
    xLabel: "eigenvalue number",
    yLabel: "eigenvalue",
    yType: "log",
    series,
  };
}

// Median relative eigenvalue error per sketch kind, envelope over seeds.
function eigError(rows: ResultRow[]): FigureSpec {
  const errors = rows.filter((row) => row.metric === "rel_error");
  const series = [...groupBy(errors, (row) => row.variant).entries()].map(
    ([kind, group]) => medianSeries(kind, group),
  );
  return {
    title: "Randomized eigenvalue error by sketch kind",
    xLabel: "eigenvalue number",
    yLabel: "relative eigenvalue error",
    yType: "log",
    series,
  };
}

// Quadratic-cost traces of the control solve, median over seeds.
function controlLmp(rows: ResultRow[]): FigureSpec {
  const costs = rows.filter((row) => row.metric === "J");
  const series = [...groupBy(costs, (row) => row.variant).entries()].map(
    ([variant, group]) =>
      medianSeries(variant === "none" ? "no LMP" : variant, group),
  );
  return {
    title: "Control-solve cost with one LMP per sketch kind",
    xLabel: "iteration",
    yLabel: "quadratic cost J",
    yType: "log",
    series,
  };
}

// Cost traces over scaling rules and retained ranks, median over seeds.
function thetaSensitivity(rows: ResultRow[]): FigureSpec {
  const costs = rows.filter((row) => row.metric === "J");
  const labelOf = (row: ResultRow): string =>
    row.variant === "none" ? "no LMP" : `${row.thetaRule}, k=${row.k}`;
  const series = [...groupBy(costs, labelOf).entries()].map(
    ([label, group]) => medianSeries(label, group),
  );
  return {
    title: "Cost sensitivity to the scaling rule and retained rank",
    xLabel: "iteration",
    yLabel: "quadratic cost J",
    yType: "log",
    series,
  };
}

// Per-member payoff of the shared preconditioner: distribution of the
// cost ratio across members, unity line marks break-even.
function ensembleLmp(rows: ResultRow[]): FigureSpec {
  const ratios = rows.filter(
    (row) => row.metric === "J_ratio" && row.index >= 1,
  );
  const series = [...groupBy(ratios, (row) => `k=${row.k}`).entries()].map(
    ([label, group]) => medianSeries(label, group),
  );
  return {
    title: "Shared-LMP payoff across the ensemble",
    xLabel: "iteration",
    yLabel: "cost ratio  J(no LMP) / J(LMP)",
    yType: "linear",
    series,
    refLineY: 1,
  };
}

const BUILDERS: Record<FigureExperiment, (rows: ResultRow[]) => FigureSpec> = {
  "eig-sensitivity": eigSensitivity,
  "eig-error": eigError,
  "control-lmp": controlLmp,
  "theta-sensitivity": thetaSensitivity,
  "ensemble-lmp": ensembleLmp,
};

export function buildFigure(
  experiment: string,
  rows: ResultRow[],
): FigureSpec {
  const builder = BUILDERS[experiment as FigureExperiment];
  if (!builder) {
    throw new Error(
      `no figure for experiment "${experiment}"; ` +
        `expected one of ${FIGURE_EXPERIMENTS.join(", ")}`,
    );
  }
  const spec = builder(rows);
  if (spec.series.length === 0) {
    throw new Error(`no rows for a "${experiment}" figure in this CSV`);
  }
  return spec;
}
