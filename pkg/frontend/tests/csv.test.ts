import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { column, DataFileError, parseRows, readTable } from "../src/csv.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function tempFile(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "csv-"));
  const path = join(dir, name);
  writeFileSync(path, text);
  return path;
}

describe("parseRows", () => {
  it("parses plain numeric rows", () => {
    expect(parseRows("1,2.5\n-3e-2,4\n")).toEqual([
      [1, 2.5],
      [-0.03, 4],
    ]);
  });

  it("maps empty fields to NaN", () => {
    const rows = parseRows("0.5,\n,1\n");
    expect(rows[0]![0]).toBe(0.5);
    expect(rows[0]![1]).toBeNaN();
    expect(rows[1]![0]).toBeNaN();
  });

  it("reports non-numeric fields with their line", () => {
    expect(() => parseRows("1,2\n1,x\n", "bad.csv")).toThrowError(
      /bad\.csv, line 2: not a number: "x"/,
    );
  });
});

describe("readTable", () => {
  it("reads a real profile file", () => {
    const rows = readTable(join(FIXTURES, "dol_single_0.csv"));
    expect(rows).toHaveLength(2000);
    expect(rows[0]).toHaveLength(6);
    expect(rows[0]![0]).toBe(0);
  });

  it("reads a real time-series file", () => {
    const rows = readTable(join(FIXTURES, "dot_small_features_0.csv"));
    expect(rows).toHaveLength(100);
    expect(rows[0]).toHaveLength(9);
  });

  it("rejects ragged files naming the line", () => {
    const path = tempFile("ragged.csv", "1,2\n3\n");
    expect(() => readTable(path)).toThrowError(/line 2: expected 2 columns/);
  });

  it("rejects empty files", () => {
    const path = tempFile("empty.csv", "");
    expect(() => readTable(path)).toThrowError(/file is empty/);
  });

  it("gives a clean error for a missing file", () => {
    expect(() => readTable("/nonexistent/nope.csv")).toThrowError(
      DataFileError,
    );
    expect(() => readTable("/nonexistent/nope.csv")).toThrowError(
      /cannot read \/nonexistent\/nope\.csv/,
    );
  });
});

describe("column", () => {
  it("extracts by index", () => {
    expect(column([[1, 2], [3, 4]], 1, "f")).toEqual([2, 4]);
  });

  it("rejects out-of-range indices naming the source", () => {
    expect(() => column([[1, 2]], 2, "data.csv")).toThrowError(
      /data\.csv: no column 2 \(file has 2 columns\)/,
    );
    expect(() => column([[1, 2]], -1, "data.csv")).toThrowError(
      DataFileError,
    );
  });
});
