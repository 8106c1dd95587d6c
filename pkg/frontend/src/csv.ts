/**
 * Reader for the benchmark CSV dialect: comma separated, no header, every
 * field a float, NaN encoded as an empty field. Files are rectangular;
 * a ragged file is reported with its path and the offending line.
 */

import { readFileSync } from "node:fs";

export class DataFileError extends Error {}

export function parseRows(text: string, source = "<string>"): number[][] {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  const rows: number[][] = [];
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i] ?? "";
    const fields = line.split(",").map((field) => {
      if (field === "") {
        return NaN;
      }
      const value = Number(field);
      if (Number.isNaN(value)) {
        throw new DataFileError(
          `${source}, line ${i + 1}: not a number: "${field}"`,
        );
      }
      return value;
    });
    rows.push(fields);
  }
  return rows;
}

/** Read a whole table, enforcing rectangularity. */
export function readTable(path: string): number[][] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new DataFileError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const rows = parseRows(text, path);
  if (rows.length === 0) {
    throw new DataFileError(`${path}: file is empty`);
  }
  const width = rows[0]?.length ?? 0;
  for (let i = 0; i < rows.length; i++) {
    if ((rows[i] ?? []).length !== width) {
      throw new DataFileError(
        `${path}, line ${i + 1}: expected ${width} columns, ` +
          `got ${(rows[i] ?? []).length}`,
      );
    }
  }
  return rows;
}

export function column(
  rows: number[][],
  index: number,
  source: string,
): number[] {
  const width = rows[0]?.length ?? 0;
  if (!Number.isInteger(index) || index < 0 || index >= width) {
    throw new DataFileError(
      `${source}: no column ${index} (file has ${width} columns)`,
    );
  }
  return rows.map((row) => row[index] ?? NaN);
}
