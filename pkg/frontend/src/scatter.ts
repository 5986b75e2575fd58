import { num, requireColumns, Row, seriesNames } from "./csv";
import { axes, el, Frame, linearScale, svgDocument, title } from "./svg";
import { RenderResult } from "./types";

const PANEL = 240;
const MARGIN = 52;
const GAP = 28;

function labelColor(label: number): string {
  if (label > 0) return "#2166ac";
  if (label < 0) return "#b2182b";
  return "#777777";
}

/**
 * Side-by-side scatter panels, one per value of the series column.
 *
 * Consumes the scatter CSV schema (series, x0, x1, label) written by
 * the experiment runner.  All panels share one data domain so the
 * regularization effect is visible as geometry, not as rescaling.
 */
export function renderScatter(rows: Row[]): RenderResult {
  requireColumns(rows, ["series", "x0", "x1", "label"], "scatter");
  const names = seriesNames(rows, "series");

  const x0 = rows.map((r) => num(r, "x0"));
  const x1 = rows.map((r) => num(r, "x1"));
  const pad = 0.05 * Math.max(
    Math.max(...x0) - Math.min(...x0),
    Math.max(...x1) - Math.min(...x1),
    1e-12
  );
  const xDomain: [number, number] = [Math.min(...x0) - pad, Math.max(...x0) + pad];
  const yDomain: [number, number] = [Math.min(...x1) - pad, Math.max(...x1) + pad];

  const width = MARGIN + names.length * (PANEL + GAP) + MARGIN - GAP;
  const height = MARGIN + PANEL + MARGIN;
  const body: string[] = [];
  const series = [];

  for (let p = 0; p < names.length; ++p) {
    const frame: Frame = {
      x: MARGIN + p * (PANEL + GAP),
      y: MARGIN,
      width: PANEL,
      height: PANEL,
    };
    const sx = linearScale(xDomain[0], xDomain[1], frame.x, frame.x + frame.width);
    const sy = linearScale(yDomain[0], yDomain[1], frame.y + frame.height, frame.y);
    body.push(...axes(frame, xDomain, yDomain));
    body.push(title(frame, names[p]));

    let count = 0;
    for (const row of rows) {
      if (String(row.series) !== names[p]) continue;
      body.push(el("circle", {
        cx: sx(num(row, "x0")), cy: sy(num(row, "x1")), r: 2,
        fill: labelColor(num(row, "label")),
        "fill-opacity": 0.7,
        class: `point-${names[p]}`,
      }));
      count += 1;
    }
    series.push({ name: names[p], length: count });
  }

  return { svg: svgDocument(width, height, body), series };
}
