/** Random-dot proportion display for elicitation stimuli.
 *
 * The service supplies the fraction; the layout and the choice of which dots
 * are filled come from a seeded generator, so the same question always renders
 * the same picture.
 */

import { mulberry32 } from "./rand.js";

export interface DotSpec {
  x: number;
  y: number;
  filled: boolean;
}

export const DOT_COUNT = 100;

export function dotLayout(fraction: number, seed: number, count = DOT_COUNT): DotSpec[] {
  if (!(fraction >= 0 && fraction <= 1)) {
    throw new RangeError(`fraction must lie in [0, 1], got ${fraction}`);
  }
  const rng = mulberry32(seed);
  const filledCount = Math.round(fraction * count);
  const flags = new Array<boolean>(count);
  for (let i = 0; i < count; i++) {
    flags[i] = i < filledCount;
  }
  for (let i = count - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1));
    [flags[i], flags[j]] = [flags[j], flags[i]];
  }
  const side = Math.ceil(Math.sqrt(count));
  const dots: DotSpec[] = [];
  for (let i = 0; i < count; i++) {
    const col = i % side;
    const row = Math.floor(i / side);
    // jitter inside the cell, but keep a margin so dots never overlap
    const jx = 0.2 + rng() * 0.6;
    const jy = 0.2 + rng() * 0.6;
    dots.push({ x: (col + jx) / side, y: (row + jy) / side, filled: flags[i] });
  }
  return dots;
}

export function renderDots(
  target: Element,
  fraction: number,
  seed: number,
  sizePx = 240,
): SVGSVGElement {
  const doc = target.ownerDocument;
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "dot-display");
  svg.setAttribute("width", String(sizePx));
  svg.setAttribute("height", String(sizePx));
  svg.setAttribute("viewBox", "0 0 1 1");
  const frame = doc.createElementNS("http://www.w3.org/2000/svg", "rect");
  frame.setAttribute("x", "0");
  frame.setAttribute("y", "0");
  frame.setAttribute("width", "1");
  frame.setAttribute("height", "1");
  frame.setAttribute("fill", "#1d2430");
  svg.appendChild(frame);
  for (const dot of dotLayout(fraction, seed)) {
    const circle = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", dot.x.toFixed(4));
    circle.setAttribute("cy", dot.y.toFixed(4));
    circle.setAttribute("r", "0.028");
    circle.setAttribute("fill", dot.filled ? "#ffffff" : "#4a5468");
    circle.setAttribute("data-filled", dot.filled ? "1" : "0");
    svg.appendChild(circle);
  }
  target.appendChild(svg);
  return svg;
}
