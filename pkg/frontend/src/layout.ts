/** Turn plot models into flat draw scenes (strokes, texts, rects) in pixel
 * space; the SVG and PNG writers both consume scenes, so the two outputs
 * share every coordinate. */

import { HeatmapModel, Panel, PlotModel } from "./model.js";
import { linearScale, logScale, Scale } from "./scale.js";

export interface Stroke {
  points: [number, number][];
  color: string;
  dashed: boolean;
  width: number;
}

export interface SceneText {
  x: number;
  y: number;
  text: string;
  size: number;
  anchor: "start" | "middle" | "end";
  color: string;
}

export interface SceneRect {
  x: number;
  y: number;
  w: number;
  h: number;
  color: string;
}

export interface Scene {
  width: number;
  height: number;
  strokes: Stroke[];
  texts: SceneText[];
  rects: SceneRect[];
}

const MARGIN = { left: 64, right: 16, top: 28, bottom: 42 };

function extent(values: number[][], log: boolean): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of values) {
    for (const v of arr) {
      if (!Number.isFinite(v)) continue;
      if (log && v <= 0) continue;
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!(lo < hi)) {
    lo = log ? 0.1 : 0;
    hi = 1;
  }
  if (log) return [lo / 1.25, hi * 1.25];
  const pad = 0.05 * (hi - lo || 1);
  return [lo - pad, hi + pad];
}

function panelScene(panel: Panel, x0: number, x1: number, scene: Scene, fullHeight: number) {
  const yTop = MARGIN.top;
  const yBot = fullHeight - MARGIN.bottom;
  const all = [...panel.curves, ...panel.guides];
  const [xlo, xhi] = extent(all.map((c) => c.x), panel.xLog);
  const [ylo, yhi] = extent(all.map((c) => c.y), panel.yLog);
  const sx: Scale = panel.xLog ? logScale(xlo, xhi, x0, x1) : linearScale(xlo, xhi, x0, x1);
  const sy: Scale = panel.yLog ? logScale(ylo, yhi, yBot, yTop) : linearScale(ylo, yhi, yBot, yTop);

  // frame
  scene.strokes.push({
    points: [[x0, yTop], [x1, yTop], [x1, yBot], [x0, yBot], [x0, yTop]],
    color: "#444444", dashed: false, width: 1,
  });
  for (const tick of sx.ticks()) {
    const px = sx.toPixel(tick.value);
    scene.strokes.push({ points: [[px, yBot], [px, yBot + 4]], color: "#444444", dashed: false, width: 1 });
    scene.texts.push({ x: px, y: yBot + 16, text: tick.label, size: 10, anchor: "middle", color: "#333333" });
  }
  for (const tick of sy.ticks()) {
    const py = sy.toPixel(tick.value);
    scene.strokes.push({ points: [[x0 - 4, py], [x0, py]], color: "#444444", dashed: false, width: 1 });
    scene.texts.push({ x: x0 - 7, y: py + 3, text: tick.label, size: 10, anchor: "end", color: "#333333" });
  }
  scene.texts.push({
    x: (x0 + x1) / 2, y: fullHeight - 10, text: panel.xLabel, size: 11, anchor: "middle", color: "#222222",
  });
  scene.texts.push({
    x: x0 - 50, y: yTop - 10, text: panel.yLabel, size: 11, anchor: "start", color: "#222222",
  });
  scene.texts.push({
    x: (x0 + x1) / 2, y: yTop - 10, text: panel.title, size: 12, anchor: "middle", color: "#111111",
  });

  const clipMap = (c: { x: number[]; y: number[] }): [number, number][] => {
    const pts: [number, number][] = [];
    for (let i = 0; i < c.x.length; i++) {
      const vx = c.x[i];
      const vy = c.y[i];
      if (!Number.isFinite(vx) || !Number.isFinite(vy)) continue;
      if (panel.xLog && vx <= 0) continue;
      if (panel.yLog && vy <= 0) continue;
      pts.push([sx.toPixel(vx), sy.toPixel(vy)]);
    }
    return pts;
  };

  for (const guide of panel.guides) {
    scene.strokes.push({ points: clipMap(guide), color: guide.color, dashed: true, width: 1 });
  }
  let legendY = yTop + 14;
  for (const curve of panel.curves) {
    scene.strokes.push({
      points: clipMap(curve), color: curve.color, dashed: curve.dashed ?? false, width: 1.6,
    });
    scene.texts.push({
      x: x1 - 8, y: legendY, text: curve.label, size: 10, anchor: "end", color: curve.color,
    });
    legendY += 13;
  }
  for (const label of panel.labels) {
    const px = panel.xLog ? sx.toPixel(Math.max(label.x, xlo)) : sx.toPixel(label.x);
    const py = sy.toPixel(label.y);
    scene.texts.push({
      x: px + 4, y: py - 4, text: label.text, size: 10, anchor: label.anchor ?? "start", color: "#555555",
    });
  }
}

export function layoutPlot(model: PlotModel): Scene {
  const scene: Scene = { width: model.width, height: model.height, strokes: [], texts: [], rects: [] };
  const n = model.panels.length;
  const innerWidth = (model.width - MARGIN.left - MARGIN.right - (n - 1) * 70) / n;
  model.panels.forEach((panel, i) => {
    const x0 = MARGIN.left + i * (innerWidth + 70);
    panelScene(panel, x0, x0 + innerWidth, scene, model.height);
  });
  return scene;
}

function heatColor(t: number): string {
  // compact blue -> yellow ramp
  const clamped = Math.min(Math.max(t, 0), 1);
  const r = Math.round(30 + 225 * clamped);
  const g = Math.round(40 + 180 * clamped);
  const b = Math.round(140 - 110 * clamped + 50 * (1 - clamped));
  return `#${[r, g, b].map((c) => c.toString(16).padStart(2, "0")).join("")}`;
}

export function layoutHeatmap(model: HeatmapModel): Scene {
  const scene: Scene = { width: model.width, height: model.height, strokes: [], texts: [], rects: [] };
  const x0 = MARGIN.left;
  const x1 = model.width - MARGIN.right - 60;
  const yTop = MARGIN.top;
  const yBot = model.height - MARGIN.bottom;
  const sx = logScale(model.xs[0], model.xs[model.xs.length - 1], x0, x1);
  const sy = logScale(model.ys[0], model.ys[model.ys.length - 1], yBot, yTop);

  const span = model.vmax - model.vmin || 1;
  for (let i = 0; i < model.xs.length; i++) {
    for (let j = 0; j < model.ys.length; j++) {
      const px0 = sx.toPixel(edge(model.xs, i, -1));
      const px1 = sx.toPixel(edge(model.xs, i, +1));
      const py0 = sy.toPixel(edge(model.ys, j, +1));
      const py1 = sy.toPixel(edge(model.ys, j, -1));
      scene.rects.push({
        x: px0, y: py0, w: px1 - px0, h: py1 - py0,
        color: heatColor((model.values[i][j] - model.vmin) / span),
      });
    }
  }
  for (const tick of sx.ticks()) {
    const px = sx.toPixel(tick.value);
    scene.texts.push({ x: px, y: yBot + 16, text: tick.label, size: 10, anchor: "middle", color: "#333333" });
  }
  for (const tick of sy.ticks()) {
    const py = sy.toPixel(tick.value);
    scene.texts.push({ x: x0 - 7, y: py + 3, text: tick.label, size: 10, anchor: "end", color: "#333333" });
  }
  // color bar
  const cbX = model.width - MARGIN.right - 40;
  const steps = 32;
  for (let k = 0; k < steps; k++) {
    const y = yBot - ((k + 1) / steps) * (yBot - yTop);
    scene.rects.push({
      x: cbX, y, w: 14, h: (yBot - yTop) / steps + 0.5, color: heatColor(k / (steps - 1)),
    });
  }
  scene.texts.push({ x: cbX + 18, y: yTop + 8, text: model.vmax.toFixed(1), size: 9, anchor: "start", color: "#333333" });
  scene.texts.push({ x: cbX + 18, y: yBot, text: model.vmin.toFixed(1), size: 9, anchor: "start", color: "#333333" });
  scene.texts.push({ x: (x0 + x1) / 2, y: model.height - 10, text: model.xLabel, size: 11, anchor: "middle", color: "#222222" });
  scene.texts.push({ x: x0 - 50, y: yTop - 10, text: model.yLabel, size: 11, anchor: "start", color: "#222222" });
  scene.texts.push({ x: (x0 + x1) / 2, y: yTop - 10, text: model.title, size: 12, anchor: "middle", color: "#111111" });
  scene.strokes.push({
    points: [[x0, yTop], [x1, yTop], [x1, yBot], [x0, yBot], [x0, yTop]],
    color: "#444444", dashed: false, width: 1,
  });
  return scene;
}

function edge(values: number[], i: number, side: -1 | 1): number {
  const v = values[i];
  const neighbor = side < 0 ? values[Math.max(i - 1, 0)] : values[Math.min(i + 1, values.length - 1)];
  if (neighbor === v) {
    const other = side < 0 ? values[Math.min(i + 1, values.length - 1)] : values[Math.max(i - 1, 0)];
    const ratio = other === v ? 1.1 : Math.sqrt(Math.abs(other / v)) || 1.1;
    return side < 0 ? v / ratio : v * ratio;
  }
  return Math.sqrt(v * neighbor);
}
