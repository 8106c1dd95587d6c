/**
 * Shared driver for the two plot commands.
 *
 * pol overlays profiles over a line: a dol file holds (arc length, value)
 * column pairs, so `--pair 2` plots columns 2 and 3 of each listed file.
 * pot overlays time series: a dot file holds the times in column 0, so
 * `--col 3` plots column 3 against time for each listed file.
 *
 * Inputs are never modified; rendering the same manifest twice produces
 * byte-identical SVG.
 */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { column, DataFileError, readTable } from "./csv.js";
import { readManifest, SeriesSpec } from "./manifest.js";
import { Curve, renderChart, RenderError } from "./render.js";

export class UsageError extends Error {}

export function polCurves(series: SeriesSpec[], pair: number): Curve[] {
  if (!Number.isInteger(pair) || pair < 1) {
    throw new UsageError(`--pair must be a positive integer, got ${pair}`);
  }
  return series.map((spec) => {
    const rows = readTable(spec.path);
    const width = rows[0]?.length ?? 0;
    if (width % 2 !== 0) {
      throw new DataFileError(
        `${spec.path}: profile files hold (arc, value) column pairs, ` +
          `got ${width} columns`,
      );
    }
    if (2 * pair > width) {
      throw new DataFileError(
        `${spec.path}: no column pair ${pair} ` +
          `(file has ${width / 2} pairs)`,
      );
    }
    return {
      label: spec.label,
      x: column(rows, 2 * pair - 2, spec.path),
      y: column(rows, 2 * pair - 1, spec.path),
    };
  });
}

export function potCurves(series: SeriesSpec[], col: number): Curve[] {
  if (!Number.isInteger(col) || col < 1) {
    throw new UsageError(
      `--col must be a data column index >= 1 (column 0 holds the times), ` +
        `got ${col}`,
    );
  }
  return series.map((spec) => {
    const rows = readTable(spec.path);
    return {
      label: spec.label,
      x: column(rows, 0, spec.path),
      y: column(rows, col, spec.path),
    };
  });
}

interface CliSpec {
  name: string;
  selectorFlag: "pair" | "col";
  xLabel: string;
  curves: (series: SeriesSpec[], selector: number) => Curve[];
}

function runCli(spec: CliSpec, argv: string[]): number {
  let values: Record<string, string | undefined>;
  try {
    values = parseArgs({
      args: argv,
      options: {
        manifest: { type: "string" },
        [spec.selectorFlag]: { type: "string" },
        out: { type: "string" },
        title: { type: "string" },
      },
      allowPositionals: false,
    }).values as Record<string, string | undefined>;
  } catch (err) {
    process.stderr.write(`${spec.name}: ${(err as Error).message}\n`);
    return 1;
  }
  const manifest = values.manifest;
  const selector = values[spec.selectorFlag];
  const out = values.out;
  if (!manifest || !selector || !out) {
    process.stderr.write(
      `usage: ${spec.name} --manifest FILE --${spec.selectorFlag} N ` +
        `--out FILE.svg [--title TEXT]\n`,
    );
    return 1;
  }
  try {
    const series = readManifest(manifest);
    const curves = spec.curves(series, Number(selector));
    const svg = renderChart(curves, {
      title: values.title,
      xLabel: spec.xLabel,
      yLabel: `column selector ${selector}`,
    });
    writeFileSync(out, svg);
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`${spec.name}: ${err.message}\n`);
      return 1;
    }
    if (err instanceof DataFileError || err instanceof RenderError) {
      process.stderr.write(`${spec.name}: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
  return 0;
}

export function runPol(argv: string[]): number {
  return runCli(
    {
      name: "pol",
      selectorFlag: "pair",
      xLabel: "arc length [m]",
      curves: polCurves,
    },
    argv,
  );
}

export function runPot(argv: string[]): number {
  return runCli(
    { name: "pot", selectorFlag: "col", xLabel: "time [s]", curves: potCurves },
    argv,
  );
}
