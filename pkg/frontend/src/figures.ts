/**
 * Figure renderers. Each figure id accepts exactly one input schema
 * (validated against the CSV metadata and columns) and never recomputes
 * physics: everything drawn comes from the simulator CLI's files.
 */

import {
  Table, SchemaError, numericColumn, booleanColumn, requireMeta,
} from "./csv.js";
import {
  MARGIN, axes, closeSvg, colormap, frame, legendSwatch, line, openSvg,
  polyline, rect, text,
} from "./svg.js";

export type FigureId =
  | "fig3" | "fig4" | "fig5" | "fig6" | "fig7" | "fig8" | "fig9"
  | "fig10" | "fig11";

export const FIGURE_IDS: FigureId[] = [
  "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
];

export interface FigureSpec {
  figureId: FigureId;
  /** primary table: trajectory, heatmap grid, or max-curve */
  main: Table;
  /** per-angle max curve, required by the heatmap figures */
  curve?: Table;
}

/** maximum heatmap resolution; larger grids are stride-decimated */
const HEATMAP_MAX_CELLS = { theta: 160, time: 200 };
/** orange band: |azz| below this fraction of its sweep maximum */
const DEGENERACY_SHADE_FRACTION = 0.02;
/** blue band: transfer counted efficient above this peak population */
const EFFICIENT_THRESHOLD = 0.99;

const TRAJECTORY_SERIES: Record<string, {
  kind: string; series: Array<[string, string]>; target: string;
}> = {
  fig3: {
    kind: "transfer-n",
    series: [["pop_00", "#1f77b4"], ["pop_P0+", "#2ca02c"], ["pop_N", "#d62728"]],
    target: "pop_N",
  },
  fig6: {
    kind: "transfer-p",
    series: [["pop_00", "#1f77b4"], ["pop_P0+", "#2ca02c"], ["pop_P", "#d62728"]],
    target: "pop_P",
  },
};

export function render(spec: FigureSpec): string {
  switch (spec.figureId) {
    case "fig3":
    case "fig6":
      return renderTrajectory(spec.figureId, spec.main);
    case "fig9":
      return renderZeroField(spec.main);
    case "fig4":
    case "fig7":
    case "fig10":
    case "fig11":
      if (!spec.curve) {
        throw new SchemaError(`${spec.figureId} needs map and curve tables`);
      }
      return renderHeatmap(spec.figureId, spec.main, spec.curve);
    case "fig5":
    case "fig8":
      return renderMaxCurve(spec.figureId, spec.main);
    default:
      throw new SchemaError(`unknown figure id ${spec.figureId}`);
  }
}

function checkSweepSchema(figureId: string, table: Table, protocol: string) {
  if (requireMeta(table, "kind") !== "theta_sweep") {
    throw new SchemaError(
      `${figureId} expects a theta_sweep file, got kind=` +
      `${table.meta["kind"]}`);
  }
  if (requireMeta(table, "protocol") !== protocol) {
    throw new SchemaError(
      `${figureId} expects protocol ${protocol}, got ` +
      `${table.meta["protocol"]}`);
  }
}

const SWEEP_PROTOCOL: Record<string, string> = {
  fig4: "N", fig5: "N", fig10: "N",
  fig7: "P", fig8: "P", fig11: "P",
};

function renderTrajectory(figureId: "fig3" | "fig6", table: Table): string {
  const cfg = TRAJECTORY_SERIES[figureId];
  if (requireMeta(table, "kind") !== cfg.kind) {
    throw new SchemaError(
      `${figureId} expects kind=${cfg.kind}, got ${table.meta["kind"]}`);
  }
  const t = numericColumn(table, "t");
  const f = frame(t[0], t[t.length - 1], 0, 1);
  const target = cfg.target.replace("pop_", "");
  let svg = openSvg(
    `${figureId}: transfer to |${target}>  ` +
    `(delta = ${Number(requireMeta(table, "delta")).toFixed(4)})`);
  svg += axes(f, "t  [1/Omega]", "population");
  let ly = MARGIN.top + 14;
  for (const [col, color] of cfg.series) {
    const ys = numericColumn(table, col);
    svg += polyline(t.map(f.sx), ys.map(f.sy), color, 1.6, "",
                    `series-${col.replace("pop_", "")}`);
    svg += legendSwatch(MARGIN.left + 10, ly, color, col.replace("pop_", "|") + ">");
    ly += 16;
  }
  return svg + closeSvg();
}

function renderZeroField(table: Table): string {
  if (requireMeta(table, "kind") !== "zero-field") {
    throw new SchemaError(
      `fig9 expects kind=zero-field, got ${table.meta["kind"]}`);
  }
  const t = numericColumn(table, "t");
  const f = frame(t[0], t[t.length - 1], 0, 1);
  const series: Array<[string, string]> = [
    ["pop_00", "#1f77b4"], ["pop_P0+", "#2ca02c"],
    ["pop_++", "#d62728"], ["pop_--", "#9467bd"],
  ];
  let svg = openSvg("fig9: zero-field double-quantum superposition");
  svg += axes(f, "t  [1/Azz]", "population / DoE");
  let ly = MARGIN.top + 14;
  for (const [col, color] of series) {
    const ys = numericColumn(table, col);
    svg += polyline(t.map(f.sx), ys.map(f.sy), color, 1.6, "",
                    `series-${col.replace("pop_", "")}`);
    svg += legendSwatch(MARGIN.left + 10, ly, color, col.replace("pop_", "|") + ">");
    ly += 16;
  }
  const doe = numericColumn(table, "doe");
  svg += polyline(t.map(f.sx), doe.map(f.sy), "black", 2.0, "6,3", "series-doe");
  svg += legendSwatch(MARGIN.left + 10, ly, "black", "DoE");
  const tDep = Number(requireMeta(table, "depletion_time"));
  svg += line(f.sx(tDep), MARGIN.top, f.sx(tDep), MARGIN.top + f.plotH,
              "#555555", 1.4, "4,4", "depletion-line");
  return svg + closeSvg();
}

function decimate(n: number, maxN: number): number[] {
  if (n <= maxN) return Array.from({ length: n }, (_, i) => i);
  const stride = Math.ceil(n / maxN);
  const idx: number[] = [];
  for (let i = 0; i < n; i += stride) idx.push(i);
  return idx;
}

function renderHeatmap(
  figureId: "fig4" | "fig7" | "fig10" | "fig11", mapTable: Table,
  curveTable: Table,
): string {
  checkSweepSchema(figureId, mapTable, SWEEP_PROTOCOL[figureId]);
  checkSweepSchema(figureId, curveTable, SWEEP_PROTOCOL[figureId]);
  const thetaCol = numericColumn(mapTable, "theta");
  const tCol = numericColumn(mapTable, "t");
  const popCol = numericColumn(mapTable, "population");
  const thetas = [...new Set(thetaCol)];
  const times = [...new Set(tCol)];
  const nTheta = thetas.length;
  const nTime = times.length;
  if (nTheta * nTime !== popCol.length) {
    throw new SchemaError(
      `map table is not a full grid: ${nTheta} x ${nTime} != ${popCol.length}`);
  }
  const pi = Math.PI;
  const f = frame(thetas[0] / pi, thetas[nTheta - 1] / pi, times[0],
                  times[nTime - 1]);
  const tuning = requireMeta(mapTable, "tuning");
  let svg = openSvg(
    `${figureId}: |${SWEEP_PROTOCOL[figureId]}> population over angle and ` +
    `time (${tuning})`);
  const iTheta = decimate(nTheta, HEATMAP_MAX_CELLS.theta);
  const iTime = decimate(nTime, HEATMAP_MAX_CELLS.time);
  const cellW = f.plotW / iTheta.length;
  const cellH = f.plotH / iTime.length;
  for (let a = 0; a < iTheta.length; a++) {
    for (let b = 0; b < iTime.length; b++) {
      const v = popCol[iTheta[a] * nTime + iTime[b]];
      const x = MARGIN.left + a * cellW;
      const y = MARGIN.top + f.plotH - (b + 1) * cellH;
      svg += rect(x, y, cellW + 0.5, cellH + 0.5, colormap(v));
    }
  }
  svg += axes(f, "theta / pi", "t");
  // black line traces the time of the maximum achieved population
  const cTheta = numericColumn(curveTable, "theta");
  const tPeak = numericColumn(curveTable, "t_peak");
  svg += polyline(cTheta.map((th) => f.sx(th / pi)), tPeak.map(f.sy),
                  "black", 2.0, "", "max-curve");
  return svg + closeSvg();
}

interface Band { lo: number; hi: number; }

function contiguousBands(thetas: number[], mask: boolean[]): Band[] {
  const bands: Band[] = [];
  let start = -1;
  for (let i = 0; i < thetas.length; i++) {
    if (mask[i] && start < 0) start = i;
    if ((!mask[i] || i === thetas.length - 1) && start >= 0) {
      const end = mask[i] ? i : i - 1;
      bands.push({ lo: thetas[start], hi: thetas[end] });
      start = -1;
    }
  }
  return bands;
}

function renderMaxCurve(figureId: "fig5" | "fig8", table: Table): string {
  checkSweepSchema(figureId, table, SWEEP_PROTOCOL[figureId]);
  const pi = Math.PI;
  const thetas = numericColumn(table, "theta");
  const pPeak = numericColumn(table, "p_peak");
  const azz = numericColumn(table, "azz");
  const degenerate = booleanColumn(table, "degenerate");
  const f = frame(thetas[0] / pi, thetas[thetas.length - 1] / pi, 0, 1);
  let svg = openSvg(
    `${figureId}: maximum |${SWEEP_PROTOCOL[figureId]}> population vs angle`);
  // orange: zz coupling vanishes and transfer is lost
  const azzMax = Math.max(...azz.map(Math.abs));
  const orangeMask = azz.map(
    (v, i) => Math.abs(v) < DEGENERACY_SHADE_FRACTION * azzMax
      || degenerate[i]);
  for (const band of contiguousBands(thetas, orangeMask)) {
    const x0 = f.sx(band.lo / pi);
    const x1 = f.sx(band.hi / pi);
    svg += rect(x0, MARGIN.top, Math.max(x1 - x0, 2), f.plotH, "#ff8c00",
                0.35, "degeneracy-band");
  }
  // blue: efficient-transfer region
  const blueMask = pPeak.map(
    (v, i) => v > EFFICIENT_THRESHOLD && !orangeMask[i]);
  for (const band of contiguousBands(thetas, blueMask)) {
    const x0 = f.sx(band.lo / pi);
    const x1 = f.sx(band.hi / pi);
    svg += rect(x0, MARGIN.top, Math.max(x1 - x0, 2), f.plotH, "#1f77b4",
                0.18, "efficiency-band");
  }
  svg += axes(f, "theta / pi", "max population");
  svg += polyline(thetas.map((th) => f.sx(th / pi)), pPeak.map(f.sy),
                  "#d62728", 2.0, "", "max-population");
  return svg + closeSvg();
}
