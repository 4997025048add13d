export {
  AXES,
  FACET_DIMS,
  METRICS,
  aggregate,
  checkPairing,
  checkSpec,
  defaultBand,
} from "./aggregate.js";
export type {
  AggregateSpec,
  Axis,
  Band,
  FacetDim,
  Metric,
  Panel,
  Series,
  SeriesPoint,
} from "./aggregate.js";
export { RESULT_COLUMNS, parseResultsCsv } from "./csv.js";
export type { ResultRow } from "./csv.js";
export { buildFigure, linearScale, niceTicks, renderFigure, renderSvg } from "./figure.js";
export type {
  FigureModel,
  FigureSpec,
  LinearScale,
  PlacedPanel,
  PlacedPoint,
  PlacedSeries,
} from "./figure.js";
export { run } from "./cli.js";
