import { describe, expect, it } from "vitest";

import { Curve, renderChart, RenderError } from "../src/render.js";

function pathSegments(svg: string): string[] {
  return [...svg.matchAll(/<path class="curve" d="([^"]+)"/g)].map(
    (m) => m[1]!,
  );
}

/** All (x, y) pixel pairs of a path's move/line steps. */
function pathPoints(d: string): Array<[number, number]> {
  return [...d.matchAll(/[ML]([\d.]+) ([\d.]+)/g)].map((m) => [
    Number(m[1]),
    Number(m[2]),
  ]);
}

const RAMP: Curve = { label: "ramp", x: [0, 1, 2, 3], y: [0, 1, 2, 3] };

describe("renderChart", () => {
  it("is deterministic", () => {
    const a = renderChart([RAMP], { title: "t" });
    const b = renderChart([RAMP], { title: "t" });
    expect(a).toBe(b);
    expect(a.startsWith("<svg ")).toBe(true);
    expect(a.trimEnd().endsWith("</svg>")).toBe(true);
  });

  it("draws one path per curve and a legend entry each", () => {
    const svg = renderChart([
      RAMP,
      { label: "flat", x: [0, 1, 2, 3], y: [1, 1, 1, 1] },
    ]);
    expect(pathSegments(svg)).toHaveLength(2);
    expect(svg).toContain(">ramp</text>");
    expect(svg).toContain(">flat</text>");
  });

  it("breaks the line at NaN samples", () => {
    const svg = renderChart([
      { label: "gap", x: [0, 1, 2, 3], y: [0, NaN, 2, 3] },
    ]);
    const d = pathSegments(svg)[0]!;
    expect(d.split("M")).toHaveLength(3); // two pen-down strokes
    expect(pathPoints(d)).toHaveLength(3);
  });

  it("renders a constant series as a horizontal centered line", () => {
    const svg = renderChart([
      { label: "c", x: [0, 1, 2], y: [0.25, 0.25, 0.25] },
    ]);
    const points = pathPoints(pathSegments(svg)[0]!);
    const ys = new Set(points.map(([, y]) => y));
    expect(ys.size).toBe(1);
    // Padding centers the flat line in the plot band (y spans 34..456).
    expect([...ys][0]).toBeCloseTo((34 + 456) / 2, 0);
  });

  it("escapes markup in labels", () => {
    const svg = renderChart([{ label: "a<b&c", x: [0, 1], y: [0, 1] }]);
    expect(svg).toContain("a&lt;b&amp;c");
    expect(svg).not.toContain("a<b");
  });

  it("rejects unplottable input", () => {
    expect(() => renderChart([])).toThrowError(RenderError);
    expect(() =>
      renderChart([{ label: "m", x: [0, 1], y: [0] }]),
    ).toThrowError(/lengths differ/);
    expect(() =>
      renderChart([{ label: "n", x: [0, 1], y: [NaN, NaN] }]),
    ).toThrowError(/no finite data points/);
  });
});
