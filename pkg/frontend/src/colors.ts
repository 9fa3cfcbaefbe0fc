/** Color mapping: a sequential ramp over [vmin, vmax] for continuous values and
 * a discrete palette for categories. The legend model carries the range and,
 * for metrics, the mean. */

export type Rgb = [number, number, number];

// viridis-style stops, dark-blue to yellow; perceptually ordered so "higher is
// brighter" reads at a glance
const RAMP_STOPS: Rgb[] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export const CATEGORY_PALETTE: string[] = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc949",
  "#af7aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ab",
];

function lerp(a: number, b: number, t: number): number {
  return a + (b - a) * t;
}

function rgbCss([r, g, b]: Rgb): string {
  return `rgb(${Math.round(r)},${Math.round(g)},${Math.round(b)})`;
}

/** Position t in [0,1] along the ramp. */
export function rampColor(t: number): string {
  const clamped = Number.isFinite(t) ? Math.min(1, Math.max(0, t)) : 0.5;
  const scaled = clamped * (RAMP_STOPS.length - 1);
  const low = Math.min(RAMP_STOPS.length - 2, Math.floor(scaled));
  const frac = scaled - low;
  const a = RAMP_STOPS[low] as Rgb;
  const b = RAMP_STOPS[low + 1] as Rgb;
  return rgbCss([lerp(a[0], b[0], frac), lerp(a[1], b[1], frac), lerp(a[2], b[2], frac)]);
}

export function rampPosition(value: number, vmin: number, vmax: number): number {
  if (!Number.isFinite(value)) return 0.5;
  if (vmax <= vmin) return 0.5; // constant column: everything mid-ramp
  return Math.min(1, Math.max(0, (value - vmin) / (vmax - vmin)));
}

export interface ContinuousLegend {
  kind: "continuous";
  vmin: number;
  vmax: number;
  mean: number;
}

export interface CategoricalLegend {
  kind: "categorical";
  entries: { label: string; color: string }[];
}

export type Legend = ContinuousLegend | CategoricalLegend;

export interface Coloring {
  /** One CSS color per point. */
  colors: string[];
  legend: Legend;
}

export function colorContinuous(values: ArrayLike<number>, vmin: number, vmax: number): Coloring {
  const colors = new Array<string>(values.length);
  let sum = 0;
  for (let i = 0; i < values.length; i++) {
    const v = values[i] as number;
    colors[i] = rampColor(rampPosition(v, vmin, vmax));
    sum += v;
  }
  const mean = values.length > 0 ? sum / values.length : 0;
  return { colors, legend: { kind: "continuous", vmin, vmax, mean } };
}

/** Labels get palette colors in first-appearance order, wrapping if there are
 * more categories than palette entries. */
export function colorCategorical(labels: ArrayLike<string>): Coloring {
  const byLabel = new Map<string, string>();
  const colors = new Array<string>(labels.length);
  for (let i = 0; i < labels.length; i++) {
    const label = labels[i] as string;
    let color = byLabel.get(label);
    if (color === undefined) {
      color = CATEGORY_PALETTE[byLabel.size % CATEGORY_PALETTE.length] as string;
      byLabel.set(label, color);
    }
    colors[i] = color;
  }
  const entries = [...byLabel.entries()].map(([label, color]) => ({ label, color }));
  return { colors, legend: { kind: "categorical", entries } };
}

export const NEUTRAL_COLOR = "#6b7280";

export function colorUniform(n: number): Coloring {
  return {
    colors: new Array<string>(n).fill(NEUTRAL_COLOR),
    legend: { kind: "categorical", entries: [] },
  };
}
