/** Read-only possibility-function plots for labels and senses. */

import type { LabelModel, Trapezoid } from "./types.js";

const WIDTH = 220;
const HEIGHT = 64;
const PAD = 8;

function toX(v: number): number {
  return PAD + v * (WIDTH - 2 * PAD);
}

function points(t: Trapezoid): string {
  const top = PAD;
  const base = HEIGHT - PAD;
  return [
    `${toX(0)},${base}`,
    `${toX(t.a)},${base}`,
    `${toX(t.b)},${top}`,
    `${toX(t.c)},${top}`,
    `${toX(t.d)},${base}`,
    `${toX(1)},${base}`,
  ].join(" ");
}

export function plotTrapezoids(
  host: Element,
  series: { trapezoid: Trapezoid; color?: string; name?: string }[],
): SVGSVGElement {
  const doc = host.ownerDocument;
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "possibility-plot");
  svg.setAttribute("width", String(WIDTH));
  svg.setAttribute("height", String(HEIGHT));
  const palette = ["#3a7bd5", "#d0653d", "#4f9d69", "#8c6bb1", "#b5a142", "#5aa7c4"];
  series.forEach((entry, i) => {
    const line = doc.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", entry.color ?? palette[i % palette.length]);
    line.setAttribute("stroke-width", "2");
    line.setAttribute("points", points(entry.trapezoid));
    if (entry.name) {
      line.setAttribute("data-name", entry.name);
    }
    svg.appendChild(line);
  });
  host.appendChild(svg);
  return svg;
}

export function plotLexicon(host: Element, labels: LabelModel[]): SVGSVGElement {
  return plotTrapezoids(
    host,
    labels.map((label) => ({ trapezoid: label.meaning, name: label.name })),
  );
}
