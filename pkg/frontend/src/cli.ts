#!/usr/bin/env node
// Command line: render one experiment CSV into an SVG figure.
//
//   eda-sketch-figures plot <experiment> --in results.csv --out figure.svg

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { parseResultCsv } from "./csv.js";
import { FIGURE_EXPERIMENTS, buildFigure } from "./figures.js";
import { renderFigure } from "./svg.js";

const USAGE =
  "usage: eda-sketch-figures plot <experiment> --in <csv> --out <svg>\n" +
  `  experiments: ${FIGURE_EXPERIMENTS.join(", ")}`;

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 2;
  }
  const [command, experiment] = parsed.positionals;
  const { in: input, out } = parsed.values;
  if (command !== "plot" || !experiment || !input || !out) {
    console.error(USAGE);
    return 2;
  }
  if (!out.endsWith(".svg")) {
    console.error(
      `cannot write "${out}": output is vector-only, use a .svg path`,
    );
    return 2;
  }
  try {
    const rows = parseResultCsv(readFileSync(input, "utf-8"));
    const svg = renderFigure(buildFigure(experiment, rows));
    writeFileSync(out, svg, "utf-8");
    console.log(`${experiment}: wrote ${out} (${rows.length} rows read)`);
    return 0;
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
}

// run directly only when invoked as a script, not when imported by tests
// (realpath resolves the package-manager bin symlink to this file)
const invoked = process.argv[1];
if (invoked && import.meta.url === pathToFileURL(realpathSync(invoked)).href) {
  process.exit(run(process.argv.slice(2)));
}
