/** plot-decay / plot-rates / plot-audit over the simulator's file formats;
 * each command emits an SVG and a PNG next to it. */

import { writeFileSync } from "node:fs";

import { buildDecayModel } from "./decay.js";
import { buildHeatmapModel } from "./heatmap.js";
import { layoutHeatmap, layoutPlot, Scene } from "./layout.js";
import { renderPng } from "./png.js";
import { buildRatesModel } from "./rates.js";
import { readSummary } from "./summary.js";
import { renderSvg } from "./svg.js";
import { readTable } from "./table.js";

function parseArgs(argv: string[]): { flags: Map<string, string>; bools: Set<string> } {
  const flags = new Map<string, string>();
  const bools = new Set<string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument ${arg}`);
    const name = arg.slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      flags.set(name, argv[++i]);
    } else {
      bools.add(name);
    }
  }
  return { flags, bools };
}

function need(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) throw new Error(`missing required flag --${name}`);
  return v;
}

function emit(scene: Scene, out: string) {
  const svgPath = out.endsWith(".svg") ? out : `${out}.svg`;
  const pngPath = svgPath.replace(/\.svg$/, ".png");
  writeFileSync(svgPath, renderSvg(scene));
  writeFileSync(pngPath, renderPng(scene));
  console.log(`wrote ${svgPath} and ${pngPath}`);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "plot-decay") {
      const { flags, bools } = parseArgs(rest);
      const series = readTable(need(flags, "series"));
      const summary = readSummary(need(flags, "summary"));
      const quantities = (flags.get("quantities") ?? "L2_a,L2_u").split(",");
      const { model } = buildDecayModel(series, summary, {
        quantities,
        referenceOverlay: !bools.has("no-reference"),
      });
      emit(layoutPlot(model), flags.get("out") ?? "decay.svg");
      return 0;
    }
    if (command === "plot-rates") {
      const { flags } = parseArgs(rest);
      const table = readTable(need(flags, "table"));
      const dims = flags.get("dims")?.split(",").map(Number);
      const { model, junctions } = buildRatesModel(table, dims);
      for (const j of junctions) {
        console.log(`N=${j.dim}: junction at alpha=${j.alpha.toFixed(3)} `
          + `r1=${j.r1.toFixed(3)} r2=${j.r2.toFixed(3)}`);
      }
      emit(layoutPlot(model), flags.get("out") ?? "rates.svg");
      return 0;
    }
    if (command === "plot-audit") {
      const { flags } = parseArgs(rest);
      const samples = readTable(need(flags, "samples"));
      const model = buildHeatmapModel(samples, flags.get("entry") ?? "abs_G11");
      emit(layoutHeatmap(model), flags.get("out") ?? "audit.svg");
      return 0;
    }
    console.error("usage: plot-decay|plot-rates|plot-audit [--flags]");
    return 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exitCode = main(process.argv.slice(2));
}
