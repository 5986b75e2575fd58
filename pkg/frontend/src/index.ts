export { readCsv, requireColumns, num, seriesNames, Row } from "./csv";
export { renderSpectra } from "./spectra";
export { renderScatter } from "./scatter";
export { renderImageGrid } from "./grid";
export { runCli } from "./cli";
export { RenderResult, RenderedSeries } from "./types";
