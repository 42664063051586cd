/** Trapezoid editor: an SVG possibility function with four draggable corner
 * handles. Corner order a <= b <= c <= d is enforced in the widget, so the
 * emitted value is always valid.
 */

import type { Trapezoid } from "./types.js";

export const CORNER_KEYS = ["a", "b", "c", "d"] as const;
export type CornerKey = (typeof CORNER_KEYS)[number];

/** Move one corner to a new position, clamped to [0, 1] and to its
 * neighbours so the order never inverts. */
export function clampCorner(current: Trapezoid, corner: CornerKey, value: number): Trapezoid {
  const next = { ...current };
  const x = Math.min(1, Math.max(0, value));
  switch (corner) {
    case "a":
      next.a = Math.min(x, current.b);
      break;
    case "b":
      next.b = Math.min(Math.max(x, current.a), current.c);
      break;
    case "c":
      next.c = Math.min(Math.max(x, current.b), current.d);
      break;
    case "d":
      next.d = Math.max(x, current.c);
      break;
  }
  return next;
}

export function isOrdered(t: Trapezoid): boolean {
  return 0 <= t.a && t.a <= t.b && t.b <= t.c && t.c <= t.d && t.d <= 1;
}

const WIDTH = 260;
const HEIGHT = 84;
const PAD = 10;

function toX(v: number): number {
  return PAD + v * (WIDTH - 2 * PAD);
}

function fromX(px: number): number {
  return (px - PAD) / (WIDTH - 2 * PAD);
}

function outlinePoints(t: Trapezoid): string {
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

export class TrapezoidEditor {
  readonly element: SVGSVGElement;
  private outline: SVGPolylineElement;
  private handles: Map<CornerKey, SVGCircleElement> = new Map();
  private current: Trapezoid;
  private dragging: CornerKey | null = null;

  constructor(
    host: Element,
    initial: Trapezoid,
    private readonly onChange: (t: Trapezoid) => void = () => {},
  ) {
    this.current = { ...initial };
    const doc = host.ownerDocument;
    this.element = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
    this.element.setAttribute("class", "trapezoid-editor");
    this.element.setAttribute("width", String(WIDTH));
    this.element.setAttribute("height", String(HEIGHT));
    this.outline = doc.createElementNS("http://www.w3.org/2000/svg", "polyline");
    this.outline.setAttribute("fill", "none");
    this.outline.setAttribute("stroke", "#3a7bd5");
    this.outline.setAttribute("stroke-width", "2");
    this.element.appendChild(this.outline);
    for (const key of CORNER_KEYS) {
      const handle = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
      handle.setAttribute("r", "6");
      handle.setAttribute("fill", "#e7a13d");
      handle.setAttribute("data-corner", key);
      handle.setAttribute("class", `handle handle-${key}`);
      handle.addEventListener("pointerdown", () => {
        this.dragging = key;
      });
      this.element.appendChild(handle);
      this.handles.set(key, handle);
    }
    this.element.addEventListener("pointermove", (event) => {
      if (this.dragging !== null) {
        const left = this.element.getBoundingClientRect().left;
        this.moveTo(this.dragging, fromX((event as MouseEvent).clientX - left));
      }
    });
    const stop = () => {
      this.dragging = null;
    };
    this.element.addEventListener("pointerup", stop);
    this.element.addEventListener("pointerleave", stop);
    host.appendChild(this.element);
    this.redraw();
  }

  get value(): Trapezoid {
    return { ...this.current };
  }

  setValue(t: Trapezoid): void {
    this.current = { ...t };
    this.redraw();
  }

  /** Programmatic equivalent of dragging one handle; used by drag events
   * and by tests. */
  moveTo(corner: CornerKey, value: number): void {
    this.current = clampCorner(this.current, corner, value);
    this.redraw();
    this.onChange(this.value);
  }

  private redraw(): void {
    this.outline.setAttribute("points", outlinePoints(this.current));
    const base = HEIGHT - PAD;
    const top = PAD;
    for (const key of CORNER_KEYS) {
      const handle = this.handles.get(key)!;
      handle.setAttribute("cx", String(toX(this.current[key])));
      handle.setAttribute("cy", String(key === "b" || key === "c" ? top : base));
    }
  }
}
