/** Plot models: the data-array layer every test asserts on.
 * Rendering (SVG or PNG) is a pure function of these structures. */

export interface Curve {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
}

export interface TextLabel {
  x: number;
  y: number;
  text: string;
  anchor?: "start" | "middle" | "end";
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog: boolean;
  yLog: boolean;
  curves: Curve[];
  guides: Curve[];
  labels: TextLabel[];
}

export interface PlotModel {
  width: number;
  height: number;
  panels: Panel[];
}

export interface HeatCell {
  x: number;
  y: number;
  value: number;
}

export interface HeatmapModel {
  width: number;
  height: number;
  title: string;
  xLabel: string;
  yLabel: string;
  xs: number[];       // sorted unique, log-spaced
  ys: number[];
  values: number[][]; // values[i][j] at (xs[i], ys[j]); log10 magnitude
  vmin: number;
  vmax: number;
}

export const PALETTE = ["#1f6fb4", "#d1483c", "#3c8f4e", "#8a5cb8", "#c78f2a", "#3aa0a8"];
