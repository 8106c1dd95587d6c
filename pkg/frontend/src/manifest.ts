/**
 * A manifest lists the data sets to overlay, one entry per curve:
 *
 *     [
 *       {"label": "UiB-MVEM", "path": "uib/dol_refinement_0.csv"},
 *       {"label": "LOCAL-TPFA", "path": "local/dol_refinement_0.csv"}
 *     ]
 *
 * To add another method's results, append an entry; relative paths are
 * resolved against the manifest's own directory so a manifest can live
 * next to the files it describes. Labels become legend entries verbatim.
 */

import { readFileSync } from "node:fs";
import { dirname, isAbsolute, resolve } from "node:path";

import { DataFileError } from "./csv.js";

export interface SeriesSpec {
  label: string;
  path: string;
}

export function readManifest(path: string): SeriesSpec[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new DataFileError(`cannot read ${path}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new DataFileError(`${path}: ${(err as Error).message}`);
  }
  if (!Array.isArray(parsed) || parsed.length === 0) {
    throw new DataFileError(
      `${path}: manifest must be a non-empty JSON array`,
    );
  }
  const base = dirname(path);
  return parsed.map((entry, i) => {
    if (
      typeof entry !== "object" ||
      entry === null ||
      typeof (entry as SeriesSpec).label !== "string" ||
      typeof (entry as SeriesSpec).path !== "string"
    ) {
      throw new DataFileError(
        `${path}: entry ${i} must be {"label": ..., "path": ...}`,
      );
    }
    const spec = entry as SeriesSpec;
    return {
      label: spec.label,
      path: isAbsolute(spec.path) ? spec.path : resolve(base, spec.path),
    };
  });
}
