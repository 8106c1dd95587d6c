/**
 * Minimal deterministic SVG line charts. No DOM, no dependencies: the
 * renderer maps data to pixel space, emits one path per curve, straight
 * axes with five ticks, and a legend. Identical input always yields the
 * identical SVG string, which the tests rely on.
 */

export interface Curve {
  label: string;
  x: number[];
  y: number[];
}

export interface ChartOptions {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  width?: number;
  height?: number;
}

export class RenderError extends Error {}

const PALETTE = [
  "#1b6ca8",
  "#c0392b",
  "#1e8449",
  "#8e44ad",
  "#b9770e",
  "#148f9f",
  "#5d6d7e",
];

const MARGIN = { left: 64, right: 16, top: 34, bottom: 44 };

/** Pixel coordinates use two decimals so output is platform independent. */
function px(value: number): string {
  return value.toFixed(2);
}

/** Tick labels drop trailing zeros but keep round-trip-enough precision. */
function tickLabel(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(2).replace(/\.?0+e/, "e");
  }
  return String(parseFloat(value.toPrecision(6)));
}

function finiteRange(values: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const series of values) {
    for (const v of series) {
      if (Number.isFinite(v)) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
    }
  }
  if (lo > hi) {
    throw new RenderError("no finite data points to plot");
  }
  if (lo === hi) {
    // A constant series still deserves a visible, centered flat line.
    const pad = Math.max(1.0, Math.abs(lo));
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}

function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function renderChart(curves: Curve[], options: ChartOptions = {}):
  string {
  if (curves.length === 0) {
    throw new RenderError("nothing to plot");
  }
  for (const curve of curves) {
    if (curve.x.length !== curve.y.length) {
      throw new RenderError(
        `curve "${curve.label}": x and y lengths differ`,
      );
    }
    if (curve.x.length === 0) {
      throw new RenderError(`curve "${curve.label}": empty series`);
    }
  }
  const width = options.width ?? 800;
  const height = options.height ?? 500;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const [x0, x1] = finiteRange(curves.map((c) => c.x));
  const [y0, y1] = finiteRange(curves.map((c) => c.y));

  const toX = (v: number) => MARGIN.left + ((v - x0) / (x1 - x0)) * plotW;
  const toY = (v: number) => MARGIN.top + plotH - ((v - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // Axes frame and ticks.
  const axisStyle = 'stroke="#333" stroke-width="1" fill="none"';
  parts.push(
    `<rect x="${px(MARGIN.left)}" y="${px(MARGIN.top)}" ` +
      `width="${px(plotW)}" height="${px(plotH)}" ${axisStyle}/>`,
  );
  const textStyle = 'font-family="Helvetica,Arial,sans-serif" fill="#333"';
  for (let i = 0; i <= 4; i++) {
    const fx = x0 + ((x1 - x0) * i) / 4;
    const fy = y0 + ((y1 - y0) * i) / 4;
    const gx = toX(fx);
    const gy = toY(fy);
    parts.push(
      `<line x1="${px(gx)}" y1="${px(MARGIN.top + plotH)}" x2="${px(gx)}" ` +
        `y2="${px(MARGIN.top + plotH + 5)}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${px(gx)}" y="${px(MARGIN.top + plotH + 18)}" ` +
        `text-anchor="middle" font-size="11" ${textStyle}>` +
        `${tickLabel(fx)}</text>`,
    );
    parts.push(
      `<line x1="${px(MARGIN.left - 5)}" y1="${px(gy)}" ` +
        `x2="${px(MARGIN.left)}" y2="${px(gy)}" stroke="#333"/>`,
    );
    parts.push(
      `<text x="${px(MARGIN.left - 8)}" y="${px(gy + 4)}" ` +
        `text-anchor="end" font-size="11" ${textStyle}>` +
        `${tickLabel(fy)}</text>`,
    );
  }
  if (options.title) {
    parts.push(
      `<text x="${px(width / 2)}" y="20" text-anchor="middle" ` +
        `font-size="14" ${textStyle}>${escapeText(options.title)}</text>`,
    );
  }
  if (options.xLabel) {
    parts.push(
      `<text x="${px(MARGIN.left + plotW / 2)}" y="${px(height - 8)}" ` +
        `text-anchor="middle" font-size="12" ${textStyle}>` +
        `${escapeText(options.xLabel)}</text>`,
    );
  }
  if (options.yLabel) {
    const ly = MARGIN.top + plotH / 2;
    parts.push(
      `<text x="14" y="${px(ly)}" text-anchor="middle" font-size="12" ` +
        `${textStyle} transform="rotate(-90 14 ${px(ly)})">` +
        `${escapeText(options.yLabel)}</text>`,
    );
  }

  // One path per curve; NaN samples break the line into segments.
  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const steps: string[] = [];
    let pendown = false;
    for (let i = 0; i < curve.x.length; i++) {
      const vx = curve.x[i] ?? NaN;
      const vy = curve.y[i] ?? NaN;
      if (!Number.isFinite(vx) || !Number.isFinite(vy)) {
        pendown = false;
        continue;
      }
      steps.push(`${pendown ? "L" : "M"}${px(toX(vx))} ${px(toY(vy))}`);
      pendown = true;
    }
    if (steps.length === 0) {
      throw new RenderError(`curve "${curve.label}": no finite samples`);
    }
    parts.push(
      `<path class="curve" d="${steps.join(" ")}" fill="none" ` +
        `stroke="${color}" stroke-width="1.5"/>`,
    );
  });

  // Legend in the top-right corner of the plot area.
  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const ly = MARGIN.top + 16 + 16 * ci;
    const lx = MARGIN.left + plotW - 150;
    parts.push(
      `<line x1="${px(lx)}" y1="${px(ly - 4)}" x2="${px(lx + 22)}" ` +
        `y2="${px(ly - 4)}" stroke="${color}" stroke-width="1.5"/>`,
    );
    parts.push(
      `<text x="${px(lx + 28)}" y="${px(ly)}" font-size="11" ${textStyle}>` +
        `${escapeText(curve.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
