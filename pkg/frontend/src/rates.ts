/** The rate-versus-alpha figure: one panel per dimension, both L2-rate
 * branches, the alpha = 1 junction, and the labeled limit intercepts
 * N/4, (N+2)/4, N/2. */

import { Curve, PlotModel, TextLabel } from "./model.js";
import { Table, column } from "./table.js";

export interface RatesResult {
  model: PlotModel;
  junctions: { dim: number; alpha: number; r1: number; r2: number }[];
  intercepts: Record<number, { quarter: number; quarterPlusTwo: number; half: number }>;
}

export function buildRatesModel(table: Table, dims?: number[],
                                width = 900, height = 420): RatesResult {
  const dimCol = column(table, "dim");
  const alphaCol = column(table, "alpha");
  const r1Col = column(table, "r1");
  const r2Col = column(table, "r2");
  if (alphaCol.length === 0) throw new Error("empty alpha grid");

  const present = [...new Set(dimCol)].sort((a, b) => a - b);
  const selected = dims && dims.length > 0 ? dims : present;
  const panels = [];
  const junctions = [];
  const intercepts: RatesResult["intercepts"] = {};

  for (const dim of selected) {
    const idx = dimCol.map((d, i) => [d, i] as const).filter(([d]) => d === dim).map(([, i]) => i);
    if (idx.length === 0) throw new Error(`dimension ${dim} not present in the rates table`);
    const alphas = idx.map((i) => alphaCol[i]);
    const r1 = idx.map((i) => r1Col[i]);
    const r2 = idx.map((i) => r2Col[i]);

    const half = dim / 2;
    const quarter = dim / 4;
    const quarterPlusTwo = (dim + 2) / 4;
    intercepts[dim] = { quarter, quarterPlusTwo, half };

    // junction: the branches meet at alpha = 1 with value N/2
    let jbest = 0;
    for (let i = 1; i < alphas.length; i++) {
      if (Math.abs(alphas[i] - 1) < Math.abs(alphas[jbest] - 1)) jbest = i;
    }
    junctions.push({ dim, alpha: alphas[jbest], r1: r1[jbest], r2: r2[jbest] });

    const curves: Curve[] = [
      { label: "r1", x: alphas, y: r1, color: "#1f6fb4" },
      { label: "r2", x: alphas, y: r2, color: "#d1483c" },
    ];
    const guides: Curve[] = [
      { label: "junction", x: [0, 1, 1], y: [half, half, 0], color: "#888888", dashed: true },
      { label: "tail", x: [0, 2, 2], y: [quarter, quarter, 0], color: "#888888", dashed: true },
    ];
    const labels: TextLabel[] = [
      { x: 0, y: quarter, text: `N/4 = ${trim(quarter)}` },
      { x: 0, y: quarterPlusTwo, text: `(N+2)/4 = ${trim(quarterPlusTwo)}` },
      { x: 0, y: half, text: `N/2 = ${trim(half)}` },
    ];
    panels.push({
      title: `N = ${dim}`,
      xLabel: "alpha",
      yLabel: "decay rate",
      xLog: false,
      yLog: false,
      curves,
      guides,
      labels,
    });
  }
  return { model: { width, height, panels }, junctions, intercepts };
}

function trim(v: number): string {
  return Number(v.toPrecision(4)).toString();
}
