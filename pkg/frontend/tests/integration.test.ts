// End-to-end drive of the solver through its public surfaces only:
// serialized config files in, exit codes and CSV/metadata files out.

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseCompare, parseMeta, parseCsv, column } from "../src/csv.js";
import { cliAvailable, run } from "../src/runner.js";
import type { RunConfig } from "../src/config.js";

const HAVE_CLI = cliAvailable();
const maybe = HAVE_CLI ? describe : describe.skip;

function scratch(): string {
  return mkdtempSync(join(tmpdir(), "wavesource-out-"));
}

maybe("solver round trips", () => {
  it("forward run reproduces the resonant mode value", () => {
    const outDir = scratch();
    const config: RunConfig = {
      problem: { f: "sin(x)", r: "1", T: "pi" },
      discretization: { modes: 4, timeNodes: 400, spaceNodes: 32 },
      sweep: { omega: [100] },
      output: { prefix: "fw" },
    };
    const result = run("forward", config, { outDir });
    expect(result.exitCode).toBe(0);
    const table = parseCsv(
      readFileSync(join(outDir, "fw_u.csv"), "utf-8"),
    );
    const xs = column(table, "x");
    const ts = column(table, "t");
    const us = column(table, "u");
    let best = 0;
    let bestDist = Infinity;
    for (let i = 0; i < xs.length; i += 1) {
      const dist = Math.abs(xs[i] - Math.PI / 2) + Math.abs(ts[i] - Math.PI);
      if (dist < bestDist) {
        bestDist = dist;
        best = i;
      }
    }
    // u = (1 - cos t) sin x peaks at 2 for x = pi/2, t = pi
    expect(us[best]).toBeCloseTo(2, 5);
    const meta = parseMeta(
      readFileSync(join(outDir, "fw_meta.txt"), "utf-8"),
    );
    expect(Number(meta.get("error_estimate"))).toBeLessThan(1e-8);
  }, 120_000);

  it("sweep table shows the second-order remainder decaying", () => {
    const outDir = scratch();
    const config: RunConfig = {
      problem: { f: "sin(x)*(1+t/2)", r: "1+t+cos(tau)", T: 1 },
      discretization: { modes: 8, timeNodes: 400, spaceNodes: 32 },
      sweep: { omega: [100, 200, 400] },
      output: { prefix: "cmp" },
    };
    const result = run("compare", config, { outDir });
    expect(result.exitCode).toBe(0);
    const rows = parseCompare(
      readFileSync(join(outDir, "cmp_compare.csv"), "utf-8"),
    );
    expect(rows.map((row) => row.omega)).toEqual([100, 200, 400]);
    expect(rows[1].omega2E2).toBeLessThan(rows[0].omega2E2);
    expect(rows[2].omega2E2).toBeLessThan(rows[1].omega2E2);
  }, 240_000);

  it("unsolvable spatial data exits with the precondition code", () => {
    const outDir = scratch();
    const config: RunConfig = {
      problem: { r0: "1", T: "pi", t0: "pi", psi: [4, 0.001, 0.22222, 0] },
      discretization: { timeNodes: 20000, spaceNodes: 8 },
      output: { prefix: "sp" },
    };
    const result = run("invert-space", config, { outDir });
    expect(result.exitCode).toBe(3);
    const record = parseMeta(
      readFileSync(join(outDir, "sp_error.txt"), "utf-8"),
    );
    expect(record.get("error_class")).toBe("UnsolvableError");
    expect(record.get("mode")).toBe("2");
  }, 120_000);

  it("rejects configs that fail frontend validation with exit code 2", () => {
    // bypass the frontend's own guard by writing raw text
    const outDir = scratch();
    const cfgPath = join(outDir, "bad.cfg");
    writeFileSync(
      cfgPath,
      '[problem]\nf = "sin(x)"\nr = "1"\nT = pi\n\n[sweep]\nomega = 200 100\n',
      "utf-8",
    );
    const proc = spawnSync("wavesource", ["compare", "--config", cfgPath], {
      encoding: "utf-8",
    });
    expect(proc.status).toBe(2);
    expect(proc.stderr).toContain("ascending");
  }, 60_000);
});

it("reports when the solver CLI is missing", () => {
  expect(cliAvailable("definitely-not-a-real-binary")).toBe(false);
});
