import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { buildDecayModel } from "../src/decay.js";
import { readSummary } from "../src/summary.js";
import { Table, readTable } from "../src/table.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const series = readTable(fixture("series.csv"));
const summary = readSummary(fixture("summary.json"));

function syntheticSeries(rate: number): Table {
  const rows: number[][] = [];
  for (let k = 0; k <= 40; k++) {
    const t = 10 ** (k / 10);
    rows.push([t, (1 + t) ** rate, 0.5 * (1 + t) ** rate]);
  }
  return { columns: ["t", "L2_a", "L2_u"], rows };
}

function endToEndSlope(x: number[], y: number[]): number {
  const i0 = Math.floor(x.length / 2);
  const i1 = x.length - 1;
  return (Math.log(y[i1]) - Math.log(y[i0])) / (Math.log(x[i1]) - Math.log(x[i0]));
}

describe("plot-decay model", () => {
  it("reference slopes equal the summary rate table exactly", () => {
    const { references } = buildDecayModel(series, summary, {
      quantities: ["L2_a", "L2_u", "L2_Pu"],
    });
    const table = summary.rate_table!;
    expect(references.L2_a).toBe(-table.r1);
    expect(references.L2_u).toBe(-table.r2);
    expect(references.L2_Pu).toBe(table.pu_valid ? -table.incompressible! : null);
  });

  it("guide overlays carry exactly the reference slope", () => {
    const { model, references } = buildDecayModel(series, summary, {
      quantities: ["L2_a"],
    });
    const guide = model.panels[0].guides[0];
    expect(endToEndSlope(guide.x, guide.y)).toBeCloseTo(references.L2_a!, 12);
  });

  it("a synthetic power law runs parallel to its reference line", () => {
    const rate = -summary.rate_table!.r1; // -2/3 at alpha = 1/2, N = 2
    const { model } = buildDecayModel(syntheticSeries(rate), summary, {
      quantities: ["L2_a"],
    });
    const [curve] = model.panels[0].curves;
    const [guide] = model.panels[0].guides;
    expect(endToEndSlope(curve.x, curve.y)).toBeCloseTo(endToEndSlope(guide.x, guide.y), 10);
  });

  it("legend labels carry the summary's fitted exponents", () => {
    const { model } = buildDecayModel(series, summary, { quantities: ["L2_a"] });
    const fit = summary.fits!.find((f) => f.quantity === "L2_a")!;
    expect(model.panels[0].curves[0].label).toContain(`fit ${fit.exponent.toFixed(3)}`);
  });

  it("curves are the raw series columns against 1 + t", () => {
    const { model } = buildDecayModel(series, summary, { quantities: ["L2_u"] });
    const curve = model.panels[0].curves[0];
    const tIdx = series.columns.indexOf("t");
    const uIdx = series.columns.indexOf("L2_u");
    expect(curve.x).toEqual(series.rows.map((r) => 1 + r[tIdx]));
    expect(curve.y).toEqual(series.rows.map((r) => r[uIdx]));
  });

  it("rejects a missing column by name", () => {
    expect(() => buildDecayModel(series, summary, { quantities: ["vorticity"] }))
      .toThrow(/column 'vorticity' not present/);
  });

  it("overlay can be disabled", () => {
    const { model } = buildDecayModel(series, summary, {
      quantities: ["L2_a"], referenceOverlay: false,
    });
    expect(model.panels[0].guides).toHaveLength(0);
  });

  it("is a pure function of its inputs", () => {
    const a = buildDecayModel(series, summary, { quantities: ["L2_a", "L2_u"] });
    const b = buildDecayModel(series, summary, { quantities: ["L2_a", "L2_u"] });
    expect(a).toEqual(b);
  });
});
