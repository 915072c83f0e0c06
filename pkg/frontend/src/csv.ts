/**
 * Parser for the simulator CLI's CSV outputs: a `#`-prefixed metadata
 * header (one `key = value` per line) followed by a plain comma-separated
 * table. The metadata block is mandatory — it carries the provenance the
 * figures print and validate against.
 */

export interface Table {
  meta: Record<string, string>;
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const meta: Record<string, string> = {};
  let columns: string[] | null = null;
  const rows: string[][] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trimEnd();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) {
        meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      }
      continue;
    }
    if (columns === null) {
      columns = line.split(",");
      continue;
    }
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `row has ${cells.length} cells, header has ${columns.length}`,
      );
    }
    rows.push(cells);
  }
  if (Object.keys(meta).length === 0) {
    throw new SchemaError("missing metadata block (no # header lines)");
  }
  if (columns === null) {
    throw new SchemaError("missing column header");
  }
  if (rows.length === 0) {
    throw new SchemaError("no data rows");
  }
  return { meta, columns, rows };
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `missing column '${name}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => {
    const v = Number(r[idx]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`non-numeric value '${r[idx]}' in column ${name}`);
    }
    return v;
  });
}

export function booleanColumn(table: Table, name: string): boolean[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column '${name}'`);
  }
  return table.rows.map((r) => r[idx] === "true" || r[idx] === "True");
}

export function requireMeta(table: Table, key: string): string {
  const v = table.meta[key];
  if (v === undefined) {
    throw new SchemaError(`missing metadata key '${key}'`);
  }
  return v;
}
