/**
 * Minimal SVG assembly: string templates, no DOM.
 *
 * Every renderer builds a flat list of elements and wraps them in a
 * fixed-size document, so identical inputs yield identical markup.
 */

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Serialize one element; children are pre-rendered strings. */
export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = []
): string {
  const parts = Object.entries(attrs).map(([k, v]) => `${k}="${v}"`);
  const open = `<${tag} ${parts.join(" ")}`;
  if (children.length === 0) return `${open}/>`;
  return `${open}>${children.join("")}</${tag}>`;
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("rect", { x: 0, y: 0, width, height, fill: "white" }),
    ...body,
    "</svg>",
  ].join("\n");
}

/** Affine map from a data interval onto a pixel interval. */
export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number
): (v: number) => number {
  const span = d1 - d0;
  // degenerate domains (all values equal) map to the range midpoint
  if (span === 0) return () => (r0 + r1) / 2;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function ticks(d0: number, d1: number, count: number): number[] {
  const out: number[] = [];
  for (let i = 0; i <= count; ++i) out.push(d0 + ((d1 - d0) * i) / count);
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(v.toPrecision(3)));
  }
  return v.toExponential(1);
}

export interface Frame {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Axis lines, tick marks, and tick labels around a plot frame. */
export function axes(
  frame: Frame,
  xDomain: [number, number],
  yDomain: [number, number]
): string[] {
  const sx = linearScale(xDomain[0], xDomain[1], frame.x, frame.x + frame.width);
  const sy = linearScale(yDomain[0], yDomain[1], frame.y + frame.height, frame.y);
  const body: string[] = [
    el("line", {
      x1: frame.x, y1: frame.y + frame.height,
      x2: frame.x + frame.width, y2: frame.y + frame.height,
      stroke: "black", "stroke-width": 1,
    }),
    el("line", {
      x1: frame.x, y1: frame.y,
      x2: frame.x, y2: frame.y + frame.height,
      stroke: "black", "stroke-width": 1,
    }),
  ];
  for (const t of ticks(xDomain[0], xDomain[1], 4)) {
    const px = sx(t);
    body.push(el("line", {
      x1: px, y1: frame.y + frame.height,
      x2: px, y2: frame.y + frame.height + 4,
      stroke: "black", "stroke-width": 1,
    }));
    body.push(el("text", {
      x: px, y: frame.y + frame.height + 16,
      "text-anchor": "middle", "font-size": 10, "font-family": "sans-serif",
    }, [escapeXml(formatTick(t))]));
  }
  for (const t of ticks(yDomain[0], yDomain[1], 4)) {
    const py = sy(t);
    body.push(el("line", {
      x1: frame.x - 4, y1: py, x2: frame.x, y2: py,
      stroke: "black", "stroke-width": 1,
    }));
    body.push(el("text", {
      x: frame.x - 6, y: py + 3,
      "text-anchor": "end", "font-size": 10, "font-family": "sans-serif",
    }, [escapeXml(formatTick(t))]));
  }
  return body;
}

export function title(frame: Frame, text: string): string {
  return el("text", {
    x: frame.x + frame.width / 2, y: frame.y - 8,
    "text-anchor": "middle", "font-size": 12, "font-family": "sans-serif",
  }, [escapeXml(text)]);
}
