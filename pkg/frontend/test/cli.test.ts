import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { run } from "../src/cli.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

let outDir: string;

beforeEach(() => {
  outDir = mkdtempSync(join(tmpdir(), "figures-"));
  vi.spyOn(console, "log").mockImplementation(() => {});
  vi.spyOn(console, "error").mockImplementation(() => {});
});

afterEach(() => {
  rmSync(outDir, { recursive: true, force: true });
  vi.restoreAllMocks();
});

describe("cli run", () => {
  it("plots a CSV to an SVG file", () => {
    const out = join(outDir, "figure.svg");
    const code = run([
      "plot",
      "ensemble-lmp",
      "--in",
      join(FIXTURES, "ensemble-lmp.csv"),
      "--out",
      out,
    ]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain('class="refline"');
  });

  it("returns a usage error without the plot command or paths", () => {
    expect(run([])).toBe(2);
    expect(run(["plot", "eig-error"])).toBe(2);
    expect(run(["render", "eig-error", "--in", "x", "--out", "y.svg"])).toBe(
      2,
    );
  });

  it("refuses non-SVG output paths", () => {
    const code = run([
      "plot",
      "eig-error",
      "--in",
      join(FIXTURES, "eig-error.csv"),
      "--out",
      join(outDir, "figure.png"),
    ]);
    expect(code).toBe(2);
  });

  it("fails cleanly on an unknown experiment or bad CSV", () => {
    expect(
      run([
        "plot",
        "validate",
        "--in",
        join(FIXTURES, "eig-error.csv"),
        "--out",
        join(outDir, "out.svg"),
      ]),
    ).toBe(1);
    expect(
      run([
        "plot",
        "eig-error",
        "--in",
        join(FIXTURES, "tiny.cfg"),
        "--out",
        join(outDir, "out.svg"),
      ]),
    ).toBe(1);
  });
});
