/** Scene -> SVG string (no DOM, deterministic output). */

import { Scene } from "./layout.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function round(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

export function renderSvg(scene: Scene): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
    `viewBox="0 0 ${scene.width} ${scene.height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${scene.width}" height="${scene.height}" fill="#ffffff"/>`);
  for (const rect of scene.rects) {
    parts.push(
      `<rect x="${round(rect.x)}" y="${round(rect.y)}" width="${round(Math.max(rect.w, 0))}" ` +
      `height="${round(Math.max(rect.h, 0))}" fill="${rect.color}"/>`,
    );
  }
  for (const stroke of scene.strokes) {
    if (stroke.points.length < 2) continue;
    const d = stroke.points.map((p, i) => `${i === 0 ? "M" : "L"}${round(p[0])} ${round(p[1])}`).join("");
    const dash = stroke.dashed ? ' stroke-dasharray="5 4"' : "";
    parts.push(
      `<path d="${d}" fill="none" stroke="${stroke.color}" stroke-width="${stroke.width}"${dash}/>`,
    );
  }
  for (const text of scene.texts) {
    const anchor = text.anchor === "middle" ? "middle" : text.anchor === "end" ? "end" : "start";
    parts.push(
      `<text x="${round(text.x)}" y="${round(text.y)}" font-size="${text.size}" ` +
      `text-anchor="${anchor}" fill="${text.color}">${esc(text.text)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
