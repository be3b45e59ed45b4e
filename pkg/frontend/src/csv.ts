// Reader for the long-format result CSV written by the experiment
// harness.  The writer guarantees a fixed nine-column header and fields
// that never contain commas, quotes, or newlines, so a strict
// line-by-line split is the whole contract; anything else is an error.

export const CSV_HEADER =
  "experiment,seed,member,variant,theta_rule,k,index,metric,value";

export interface ResultRow {
  experiment: string;
  /** trial seed as written; empty when not applicable */
  seed: string;
  /** ensemble member number as written; empty for control-only rows */
  member: string;
  /** sketch kind, grid label, "none", "oracle", or a check name */
  variant: string;
  /** preconditioner scaling rule; empty when no LMP is involved */
  thetaRule: string;
  /** retained rank as written; empty when not applicable */
  k: string;
  /** eigenvalue number or solver iteration (0 is the initial state) */
  index: number;
  metric: string;
  value: number;
}

export function parseResultCsv(text: string): ResultRow[] {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== CSV_HEADER) {
    throw new Error(
      `not a result CSV: expected header "${CSV_HEADER}", ` +
        `got "${lines[0] ?? ""}"`,
    );
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 9) {
      throw new Error(`line ${i + 1}: expected 9 fields, got ${parts.length}`);
    }
    const index = Number(parts[6]);
    const value = Number(parts[8]);
    if (!Number.isFinite(index) || !Number.isFinite(value)) {
      throw new Error(`line ${i + 1}: non-numeric index or value`);
    }
    rows.push({
      experiment: parts[0],
      seed: parts[1],
      member: parts[2],
      variant: parts[3],
      thetaRule: parts[4],
      k: parts[5],
      index,
      metric: parts[7],
      value,
    });
  }
  return rows;
}
