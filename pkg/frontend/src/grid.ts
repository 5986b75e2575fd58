import { num, requireColumns, Row, seriesNames } from "./csv";
import { el, escapeXml, svgDocument } from "./svg";
import { RenderResult } from "./types";

const SIDE = 28;
const PIXEL = 3;
const TILE = SIDE * PIXEL;
const GAP = 10;
const MARGIN = 60;

/**
 * Tile 28x28 images row by row, one row per pipeline stage.
 *
 * Consumes the image-grid CSV schema (stage, label, p0..p783) so a raw
 * row and a regularized row sit one above the other for comparison.
 * Pixels are intensities in [0, 1]; only nonzero pixels emit a rect,
 * dark on the white background.
 */
export function renderImageGrid(rows: Row[]): RenderResult {
  const pixelColumns = Array.from({ length: SIDE * SIDE }, (_, i) => `p${i}`);
  requireColumns(rows, ["stage", "label", ...pixelColumns], "image-grid");
  const stages = seriesNames(rows, "stage");

  const perStage = stages.map(
    (s) => rows.filter((r) => String(r.stage) === s)
  );
  const columns = Math.max(...perStage.map((g) => g.length));
  const width = MARGIN + columns * (TILE + GAP) + GAP;
  const height = MARGIN / 2 + stages.length * (TILE + GAP + 18) + GAP;
  const body: string[] = [];

  stages.forEach((stage, si) => {
    const y0 = MARGIN / 2 + si * (TILE + GAP + 18);
    body.push(el("text", {
      x: 8, y: y0 + TILE / 2,
      "font-size": 12, "font-family": "sans-serif",
    }, [escapeXml(stage)]));

    perStage[si].forEach((row, ci) => {
      const x0 = MARGIN + ci * (TILE + GAP);
      body.push(el("rect", {
        x: x0, y: y0, width: TILE, height: TILE,
        fill: "none", stroke: "#cccccc", "stroke-width": 0.5,
      }));
      for (let p = 0; p < SIDE * SIDE; ++p) {
        const v = num(row, `p${p}`);
        if (v <= 0) continue;
        const shade = Math.round(255 * (1 - Math.min(v, 1)));
        body.push(el("rect", {
          x: x0 + (p % SIDE) * PIXEL,
          y: y0 + Math.floor(p / SIDE) * PIXEL,
          width: PIXEL, height: PIXEL,
          fill: `rgb(${shade},${shade},${shade})`,
        }));
      }
      body.push(el("text", {
        x: x0 + TILE / 2, y: y0 + TILE + 13,
        "text-anchor": "middle", "font-size": 11, "font-family": "sans-serif",
        class: "tile-label",
      }, [escapeXml(String(row.label))]));
    });
  });

  const series = stages.map((name, i) => ({ name, length: perStage[i].length }));
  return { svg: svgDocument(width, height, body), series };
}
