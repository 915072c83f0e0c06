/**
 * Minimal deterministic SVG scene builder. No DOM, no randomness, no
 * timestamps: rendering the same data twice yields byte-identical markup.
 * Numbers are formatted through one fixed-precision helper so output never
 * depends on locale or float printing quirks.
 */

export const WIDTH = 760;
export const HEIGHT = 480;
export const MARGIN = { left: 70, right: 28, top: 44, bottom: 56 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Frame {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
  plotW: number;
  plotH: number;
  sx(v: number): number;
  sy(v: number): number;
}

export function frame(x0: number, x1: number, y0: number, y1: number): Frame {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const dx = x1 - x0 || 1;
  const dy = y1 - y0 || 1;
  return {
    x0, x1, y0, y1, plotW, plotH,
    sx: (v: number) => MARGIN.left + ((v - x0) / dx) * plotW,
    sy: (v: number) => MARGIN.top + plotH - ((v - y0) / dy) * plotH,
  };
}

export function openSvg(title: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
    `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15">` +
    `${escapeText(title)}</text>\n`
  );
}

export function closeSvg(): string {
  return "</svg>\n";
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function polyline(
  xs: number[], ys: number[], stroke: string, width = 1.5,
  dash = "", cls = "",
): string {
  const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  const clsAttr = cls ? ` class="${cls}"` : "";
  return (
    `<polyline${clsAttr} points="${pts}" fill="none" stroke="${stroke}" ` +
    `stroke-width="${width}"${dashAttr}/>\n`
  );
}

export function rect(
  x: number, y: number, w: number, h: number, fill: string,
  opacity = 1, cls = "",
): string {
  const op = opacity === 1 ? "" : ` fill-opacity="${fmt(opacity)}"`;
  const clsAttr = cls ? ` class="${cls}"` : "";
  return (
    `<rect${clsAttr} x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
    `height="${fmt(h)}" fill="${fill}"${op}/>\n`
  );
}

export function text(
  x: number, y: number, s: string, size = 12, anchor = "middle",
  rotate = 0,
): string {
  const tr = rotate !== 0
    ? ` transform="rotate(${rotate} ${fmt(x)} ${fmt(y)})"` : "";
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
    `text-anchor="${anchor}"${tr}>${escapeText(s)}</text>\n`
  );
}

export function line(
  x1: number, y1: number, x2: number, y2: number, stroke: string,
  width = 1, dash = "", cls = "",
): string {
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  const clsAttr = cls ? ` class="${cls}"` : "";
  return (
    `<line${clsAttr} x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
    `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>\n`
  );
}

export function axes(
  f: Frame, xLabel: string, yLabel: string, nTicks = 5,
): string {
  let out = "";
  const yBase = MARGIN.top + f.plotH;
  out += line(MARGIN.left, yBase, MARGIN.left + f.plotW, yBase, "black");
  out += line(MARGIN.left, MARGIN.top, MARGIN.left, yBase, "black");
  for (let i = 0; i <= nTicks; i++) {
    const xv = f.x0 + ((f.x1 - f.x0) * i) / nTicks;
    const yv = f.y0 + ((f.y1 - f.y0) * i) / nTicks;
    const xp = f.sx(xv);
    const yp = f.sy(yv);
    out += line(xp, yBase, xp, yBase + 5, "black");
    out += text(xp, yBase + 18, tickLabel(xv), 11);
    out += line(MARGIN.left - 5, yp, MARGIN.left, yp, "black");
    out += text(MARGIN.left - 8, yp + 4, tickLabel(yv), 11, "end");
  }
  out += text(MARGIN.left + f.plotW / 2, HEIGHT - 14, xLabel, 13);
  out += text(18, MARGIN.top + f.plotH / 2, yLabel, 13, "middle", -90);
  return out;
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000) return v.toExponential(1);
  if (a >= 10) return v.toFixed(0);
  if (a >= 0.01) return v.toFixed(2);
  return v.toExponential(1);
}

/** Fixed five-anchor colormap (dark blue -> teal -> yellow). */
const ANCHORS: Array<[number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export function colormap(v: number): string {
  const t = Math.min(Math.max(v, 0), 1) * (ANCHORS.length - 1);
  const i = Math.min(Math.floor(t), ANCHORS.length - 2);
  const u = t - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * u);
  const [r, g, b] = [0, 1, 2].map((k) => mix(ANCHORS[i][k], ANCHORS[i + 1][k]));
  return `rgb(${r},${g},${b})`;
}

export function legendSwatch(
  x: number, y: number, color: string, label: string,
): string {
  return (
    rect(x, y - 9, 18, 9, color) + text(x + 24, y, label, 11, "start")
  );
}
