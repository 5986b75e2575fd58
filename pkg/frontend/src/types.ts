/** One plotted series: its legend name and how many data points it holds. */
export interface RenderedSeries {
  name: string;
  length: number;
}

/** Renderer output: the SVG markup plus a census of what was plotted. */
export interface RenderResult {
  svg: string;
  series: RenderedSeries[];
}
