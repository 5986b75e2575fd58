import { num, requireColumns, Row } from "./csv";
import { axes, el, escapeXml, Frame, linearScale, svgDocument, title } from "./svg";
import { RenderResult } from "./types";

const WIDTH = 560;
const HEIGHT = 420;
const FRAME: Frame = { x: 60, y: 40, width: 460, height: 320 };

const COMPUTED_COLOR = "#2166ac";
const REFERENCE_COLOR = "#b2182b";

/**
 * Overlay a computed eigenvalue sequence against its reference staircase.
 *
 * Expects the spectrum CSV schema: index, value_matrix_convention and,
 * when the producing run had a closed-form reference, a reference
 * column.  The computed series is drawn as a marked line, the reference
 * as a dashed line; with multiplicities in the reference the dashed
 * line traces the staircase.
 */
export function renderSpectra(rows: Row[]): RenderResult {
  requireColumns(rows, ["index", "value_matrix_convention"], "spectra");
  const hasReference = Object.keys(rows[0]).includes("reference");

  const xs = rows.map((r) => num(r, "index"));
  const computed = rows.map((r) => num(r, "value_matrix_convention"));
  const reference = hasReference ? rows.map((r) => num(r, "reference")) : [];

  const yAll = computed.concat(reference);
  const yMax = Math.max(...yAll, 1e-12);
  const xDomain: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yDomain: [number, number] = [0, yMax * 1.05];

  const sx = linearScale(xDomain[0], xDomain[1], FRAME.x, FRAME.x + FRAME.width);
  const sy = linearScale(yDomain[0], yDomain[1], FRAME.y + FRAME.height, FRAME.y);

  const body = axes(FRAME, xDomain, yDomain);
  body.push(title(FRAME, "Laplacian spectrum"));

  const lineOf = (values: number[]) =>
    xs.map((x, i) => `${sx(x)},${sy(values[i])}`).join(" ");

  if (hasReference) {
    body.push(el("polyline", {
      points: lineOf(reference),
      fill: "none", stroke: REFERENCE_COLOR,
      "stroke-width": 1.5, "stroke-dasharray": "6 3",
      class: "series-reference",
    }));
  }
  body.push(el("polyline", {
    points: lineOf(computed),
    fill: "none", stroke: COMPUTED_COLOR, "stroke-width": 1.5,
    class: "series-computed",
  }));
  for (let i = 0; i < xs.length; ++i) {
    body.push(el("circle", {
      cx: sx(xs[i]), cy: sy(computed[i]), r: 2.5,
      fill: COMPUTED_COLOR, class: "marker-computed",
    }));
  }

  // legend, top-left inside the frame
  const entries: Array<[string, string, string]> = [
    ["computed", COMPUTED_COLOR, "none"],
  ];
  if (hasReference) entries.push(["reference", REFERENCE_COLOR, "6 3"]);
  entries.forEach(([label, color, dash], i) => {
    const y = FRAME.y + 16 + i * 16;
    body.push(el("line", {
      x1: FRAME.x + 10, y1: y, x2: FRAME.x + 34, y2: y,
      stroke: color, "stroke-width": 1.5, "stroke-dasharray": dash,
    }));
    body.push(el("text", {
      x: FRAME.x + 40, y: y + 4,
      "font-size": 11, "font-family": "sans-serif",
    }, [escapeXml(label)]));
  });

  const series = [{ name: "computed", length: computed.length }];
  if (hasReference) series.push({ name: "reference", length: reference.length });
  return { svg: svgDocument(WIDTH, HEIGHT, body), series };
}
