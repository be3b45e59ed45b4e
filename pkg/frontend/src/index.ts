export { CSV_HEADER, parseResultCsv } from "./csv.js";
export type { ResultRow } from "./csv.js";
export { envelopeByIndex, groupBy } from "./stats.js";
export type { EnvelopePoint } from "./stats.js";
export { FIGURE_EXPERIMENTS, buildFigure } from "./figures.js";
export type {
  EnvelopeBand,
  FigureExperiment,
  FigureSpec,
  Series,
  SeriesPoint,
} from "./figures.js";
export { renderFigure } from "./svg.js";
