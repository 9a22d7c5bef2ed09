/** Audit heat maps: log10 magnitude of a fundamental-matrix entry over the
 * sampled (t, |xi|) grid written by the green-audit command. */

import { HeatmapModel } from "./model.js";
import { Table, column } from "./table.js";

export function buildHeatmapModel(samples: Table, entry = "abs_G11",
                                  width = 640, height = 440): HeatmapModel {
  const t = column(samples, "t");
  const xi = column(samples, "xi");
  const v = column(samples, entry);
  const xs = [...new Set(t)].sort((a, b) => a - b);
  const ys = [...new Set(xi)].sort((a, b) => a - b);
  if (xs.length < 2 || ys.length < 2) throw new Error("need at least a 2x2 sample grid");

  const xIndex = new Map(xs.map((x, i) => [x, i]));
  const yIndex = new Map(ys.map((y, i) => [y, i]));
  const values = xs.map(() => ys.map(() => NaN));
  for (let k = 0; k < t.length; k++) {
    values[xIndex.get(t[k])!][yIndex.get(xi[k])!] = Math.log10(Math.max(v[k], 1e-300));
  }
  let vmax = -Infinity;
  for (const row of values) for (const val of row) vmax = Math.max(vmax, val);
  const vmin = vmax - 16; // 16 decades of dynamic range is plenty for the bounds
  for (let i = 0; i < xs.length; i++) {
    for (let j = 0; j < ys.length; j++) {
      if (!Number.isFinite(values[i][j])) values[i][j] = vmin;
      values[i][j] = Math.max(values[i][j], vmin);
    }
  }
  return {
    width, height,
    title: `log10 |${entry.replace("abs_", "")}| over (t, |xi|)`,
    xLabel: "t",
    yLabel: "|xi|",
    xs, ys, values, vmin, vmax,
  };
}
