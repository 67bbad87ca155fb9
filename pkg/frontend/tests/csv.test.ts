import { describe, expect, it } from "vitest";

import {
  column,
  CsvError,
  parseCompare,
  parseCsv,
  parseHarmonics,
  parseMeta,
  parseSeries,
} from "../src/csv.js";

describe("parseCsv", () => {
  it("reads a numeric table", () => {
    const table = parseCsv("a,b\n1,2\n3.5,4e-2\n");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      [1, 2],
      [3.5, 0.04],
    ]);
    expect(column(table, "b")).toEqual([2, 0.04]);
  });

  it("rejects ragged rows and non-numeric cells", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(CsvError);
    expect(() => parseCsv("a,b\n1,x\n")).toThrow(CsvError);
    expect(() => column(parseCsv("a\n1\n"), "b")).toThrow(CsvError);
  });
});

describe("specialised readers", () => {
  it("parses time series", () => {
    const series = parseSeries("t,value\n0,0\n0.5,1.25\n");
    expect(series).toEqual([
      { t: 0, value: 0 },
      { t: 0.5, value: 1.25 },
    ]);
    expect(() => parseSeries("x,y\n1,2\n")).toThrow(CsvError);
  });

  it("parses harmonic tables", () => {
    const rows = parseHarmonics("t,k,re,im\n0,1,0.5,0\n0,2,0,-0.25\n");
    expect(rows[1]).toEqual({ t: 0, k: 2, re: 0, im: -0.25 });
  });

  it("parses sweep tables", () => {
    const rows = parseCompare(
      "omega,E0,E2,omega_E0,omega2_E2\n100,1e-4,1e-6,1e-2,1e-2\n",
    );
    expect(rows[0].omega).toBe(100);
    expect(rows[0].omega2E2).toBeCloseTo(1e-2, 12);
  });

  it("parses metadata sidecars", () => {
    const meta = parseMeta("command=forward\ndt=0.001\n");
    expect(meta.get("command")).toBe("forward");
    expect(Number(meta.get("dt"))).toBeCloseTo(0.001, 12);
    expect(() => parseMeta("broken line")).toThrow(CsvError);
  });
});
