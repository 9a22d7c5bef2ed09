import { inflateSync } from "node:zlib";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { buildDecayModel } from "../src/decay.js";
import { buildHeatmapModel } from "../src/heatmap.js";
import { layoutHeatmap, layoutPlot } from "../src/layout.js";
import { encodePng, renderPng } from "../src/png.js";
import { buildRatesModel } from "../src/rates.js";
import { readSummary } from "../src/summary.js";
import { renderSvg } from "../src/svg.js";
import { readTable } from "../src/table.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const series = readTable(fixture("series.csv"));
const summary = readSummary(fixture("summary.json"));
const samples = readTable(fixture("samples.csv"));

describe("svg rendering", () => {
  it("is bit-stable for fixed inputs", () => {
    const build = () => renderSvg(layoutPlot(
      buildDecayModel(series, summary, { quantities: ["L2_a", "L2_u"] }).model));
    expect(build()).toBe(build());
  });

  it("produces a well-formed document with dashed guides", () => {
    const svg = renderSvg(layoutPlot(
      buildDecayModel(series, summary, { quantities: ["L2_a"] }).model));
    expect(svg).toMatch(/^<svg xmlns/);
    expect(svg.trim()).toMatch(/<\/svg>$/);
    expect(svg).toContain('stroke-dasharray="5 4"');
    expect(svg).toContain("1 + t");
  });

  it("renders both rate panels", () => {
    const svg = renderSvg(layoutPlot(buildRatesModel(readTable(fixture("rates.csv"))).model));
    expect(svg).toContain("N = 2");
    expect(svg).toContain("N = 3");
    expect(svg).toContain("N/4 = 0.5");
    expect(svg).toContain("(N+2)/4 = 1.25");
  });
});

describe("png rendering", () => {
  it("encodes a valid PNG header with the scene dimensions", () => {
    const { model } = buildDecayModel(series, summary, { quantities: ["L2_a"] });
    const png = renderPng(layoutPlot(model));
    expect([...png.subarray(0, 8)]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    expect(png.subarray(12, 16).toString("ascii")).toBe("IHDR");
    expect(png.readUInt32BE(16)).toBe(model.width);
    expect(png.readUInt32BE(20)).toBe(model.height);
  });

  it("IDAT inflates to the exact scanline byte count", () => {
    const rgba = new Uint8Array(8 * 4 * 4).fill(200);
    const png = encodePng(8, 4, rgba);
    const idatLen = png.readUInt32BE(33);
    const idat = png.subarray(41, 41 + idatLen);
    const raw = inflateSync(idat);
    expect(raw.length).toBe(4 * (8 * 4 + 1));
  });

  it("is deterministic", () => {
    const { model } = buildDecayModel(series, summary, { quantities: ["L2_u"] });
    const a = renderPng(layoutPlot(model));
    const b = renderPng(layoutPlot(model));
    expect(a.equals(b)).toBe(true);
  });
});

describe("audit heat map", () => {
  it("grids the samples and bounds the dynamic range", () => {
    const model = buildHeatmapModel(samples, "abs_G11");
    expect(model.xs.length * model.ys.length).toBe(samples.rows.length);
    expect(model.vmax - model.vmin).toBeCloseTo(16, 10);
    for (const row of model.values) {
      for (const v of row) {
        expect(v).toBeGreaterThanOrEqual(model.vmin);
        expect(v).toBeLessThanOrEqual(model.vmax);
      }
    }
  });

  it("renders rect cells", () => {
    const svg = renderSvg(layoutHeatmap(buildHeatmapModel(samples)));
    const rects = svg.match(/<rect /g) ?? [];
    expect(rects.length).toBeGreaterThan(40 * 40);
  });

  it("rejects unknown entry columns", () => {
    expect(() => buildHeatmapModel(samples, "abs_G99")).toThrow(/abs_G99/);
  });
});
