/** Log-log decay plot with dashed reference-slope overlays.
 *
 * The plotter never recomputes physics: curves are the series columns
 * against <t> = 1 + t, reference slopes come verbatim from the summary's
 * rate table, and legend labels carry the summary's fitted exponents. */

import { PALETTE, Curve, PlotModel } from "./model.js";
import { Summary, referenceRate } from "./summary.js";
import { Table, column } from "./table.js";

export interface DecayOptions {
  quantities: string[];
  referenceOverlay?: boolean;
  width?: number;
  height?: number;
}

export interface DecayResult {
  model: PlotModel;
  /** reference exponent used per quantity (exactly the rate-table value) */
  references: Record<string, number | null>;
}

export function buildDecayModel(series: Table, summary: Summary,
                                options: DecayOptions): DecayResult {
  if (options.quantities.length === 0) throw new Error("no quantities selected");
  const table = summary.rate_table;
  if (!table) throw new Error("summary carries no rate_table");
  const overlay = options.referenceOverlay ?? true;

  const t = column(series, "t");
  const x = t.map((v) => 1 + v);
  const curves: Curve[] = [];
  const guides: Curve[] = [];
  const references: Record<string, number | null> = {};

  options.quantities.forEach((quantity, qi) => {
    const y = column(series, quantity);
    const color = PALETTE[qi % PALETTE.length];
    const fit = summary.fits?.find(
      (f) => f.quantity === quantity && typeof f.exponent === "number");
    const rate = referenceRate(quantity, table);
    references[quantity] = rate;

    let label = quantity;
    if (fit) label += ` fit ${fit.exponent.toFixed(3)}`;
    if (rate !== null) label += ` ref ${rate.toFixed(3)}`;
    curves.push({ label, x, y, color });

    if (overlay && rate !== null) {
      let anchor = -1;
      for (let i = x.length - 1; i >= 0; i--) {
        if (y[i] > 0 && Number.isFinite(y[i])) {
          anchor = i;
          break;
        }
      }
      if (anchor >= 0) {
        const x1 = x[anchor];
        const x0 = Math.max(x1 / 10, x[0]);
        const gx: number[] = [];
        const gy: number[] = [];
        for (let k = 0; k <= 24; k++) {
          const xv = x0 * (x1 / x0) ** (k / 24);
          gx.push(xv);
          gy.push(y[anchor] * (xv / x1) ** rate);
        }
        guides.push({ label: `${quantity} reference`, x: gx, y: gy, color, dashed: true });
      }
    }
  });

  const model: PlotModel = {
    width: options.width ?? 640,
    height: options.height ?? 440,
    panels: [{
      title: `decay vs <t>, alpha = ${table.alpha}`,
      xLabel: "1 + t",
      yLabel: "norm",
      xLog: true,
      yLog: true,
      curves,
      guides,
      labels: [],
    }],
  };
  return { model, references };
}
