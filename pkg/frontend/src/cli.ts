/**
 * Figure rendering command line.
 *
 * Usage:
 *   node dist/cli.js <figureId> --out <file.svg> --input <main.csv> [--curve <curve.csv>]
 *
 * Heatmap figures (fig4/fig7/fig10/fig11) take the sweep's `*_map.csv` as
 * --input and its `*_curve.csv` as --curve; the angle plots (fig5/fig8)
 * take the `*_curve.csv` as --input; trajectory figures take the
 * trajectory CSV.
 */

import { readFileSync, writeFileSync } from "fs";

import { parseCsv, SchemaError } from "./csv.js";
import { FIGURE_IDS, FigureId, render } from "./figures.js";

export interface CliArgs {
  figureId: FigureId;
  out: string;
  input: string;
  curve?: string;
}

export function parseArgs(argv: string[]): CliArgs {
  if (argv.length === 0) {
    throw new UsageError(
      `usage: render <figureId> --out <file.svg> --input <main.csv> ` +
      `[--curve <curve.csv>]; figure ids: ${FIGURE_IDS.join(", ")}`,
    );
  }
  const figureId = argv[0] as FigureId;
  if (!FIGURE_IDS.includes(figureId)) {
    throw new UsageError(`unknown figure id '${argv[0]}'`);
  }
  let out = "";
  let input = "";
  let curve: string | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (val === undefined) throw new UsageError(`missing value for ${key}`);
    if (key === "--out") out = val;
    else if (key === "--input") input = val;
    else if (key === "--curve") curve = val;
    else throw new UsageError(`unknown flag ${key}`);
  }
  if (!out || !input) {
    throw new UsageError("--out and --input are required");
  }
  return { figureId, out, input, curve };
}

export class UsageError extends Error {}

export function runCli(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(err.message);
      return 2;
    }
    throw err;
  }
  try {
    const main = parseCsv(readFileSync(args.input, "utf8"));
    const curve = args.curve
      ? parseCsv(readFileSync(args.curve, "utf8"))
      : undefined;
    const svg = render({ figureId: args.figureId, main, curve });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`io error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("cli.ts")) {
  process.exit(runCli(process.argv.slice(2)));
}
