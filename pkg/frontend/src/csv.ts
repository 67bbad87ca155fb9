// Readers for the solver's output files: header-first CSV tables with
// 17-significant-digit floats, harmonic tables, and key=value sidecars.

export class CsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvError";
  }
}

export interface Table {
  header: string[];
  rows: number[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty csv");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, index) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(`row ${index + 1} has ${cells.length} cells, ` +
        `expected ${header.length}`);
    }
    return cells.map((cell) => {
      const value = Number(cell);
      if (Number.isNaN(value)) {
        throw new CsvError(`non-numeric cell '${cell}' in row ${index + 1}`);
      }
      return value;
    });
  });
  return { header, rows };
}

export function column(table: Table, name: string): number[] {
  const index = table.header.indexOf(name);
  if (index < 0) {
    throw new CsvError(`no column '${name}' in ${table.header.join(",")}`);
  }
  return table.rows.map((row) => row[index]);
}

export interface SeriesPoint {
  t: number;
  value: number;
}

/** Time series files: columns t,<name>. */
export function parseSeries(text: string): SeriesPoint[] {
  const table = parseCsv(text);
  if (table.header.length !== 2 || table.header[0] !== "t") {
    throw new CsvError(`expected a t,value table, got ${table.header.join(",")}`);
  }
  return table.rows.map(([t, value]) => ({ t, value }));
}

export interface HarmonicEntry {
  t: number;
  k: number;
  re: number;
  im: number;
}

/** Harmonic tables: columns t,k,re,im (one row per time node and harmonic). */
export function parseHarmonics(text: string): HarmonicEntry[] {
  const table = parseCsv(text);
  const expected = ["t", "k", "re", "im"];
  if (table.header.join(",") !== expected.join(",")) {
    throw new CsvError(`expected ${expected.join(",")} header`);
  }
  return table.rows.map(([t, k, re, im]) => ({ t, k, re, im }));
}

export interface CompareRow {
  omega: number;
  e0: number;
  e2: number;
  omegaE0: number;
  omega2E2: number;
}

export function parseCompare(text: string): CompareRow[] {
  const table = parseCsv(text);
  const omega = column(table, "omega");
  const e0 = column(table, "E0");
  const e2 = column(table, "E2");
  const omegaE0 = column(table, "omega_E0");
  const omega2E2 = column(table, "omega2_E2");
  return omega.map((w, i) => ({
    omega: w,
    e0: e0[i],
    e2: e2[i],
    omegaE0: omegaE0[i],
    omega2E2: omega2E2[i],
  }));
}

/** Sidecar metadata: key=value lines, numbers left as strings. */
export function parseMeta(text: string): Map<string, string> {
  const out = new Map<string, string>();
  for (const line of text.split(/\r?\n/)) {
    if (!line) continue;
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new CsvError(`malformed metadata line '${line}'`);
    }
    out.set(line.slice(0, eq), line.slice(eq + 1));
  }
  return out;
}
