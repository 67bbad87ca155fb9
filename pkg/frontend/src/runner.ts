// Thin wrapper around the solver's command line interface. The frontend
// talks to the solver exclusively through config files, the CLI and its
// CSV/metadata outputs.

import { spawnSync } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { serialize, type RunConfig } from "./config.js";

export type Subcommand =
  | "forward"
  | "asymptotic"
  | "compare"
  | "make-observations"
  | "invert-time"
  | "invert-space"
  | "invert-joint"
  | "extract-demo";

export interface RunResult {
  exitCode: number;
  stdout: string;
  stderr: string;
  configPath: string;
}

export interface RunnerOptions {
  /** Executable name or path; defaults to the installed console script. */
  executable?: string;
  outDir?: string;
}

export function cliAvailable(executable = "wavesource"): boolean {
  const probe = spawnSync(executable, ["selftest", "--help"], {
    encoding: "utf-8",
  });
  return probe.status === 0;
}

/** Write the config to a scratch file and run one subcommand. */
export function run(
  command: Subcommand,
  config: RunConfig,
  options: RunnerOptions = {},
): RunResult {
  const executable = options.executable ?? "wavesource";
  const dir = mkdtempSync(join(tmpdir(), "wavesource-"));
  const configPath = join(dir, "run.cfg");
  writeFileSync(configPath, serialize(config), "utf-8");
  const args = [command, "--config", configPath];
  if (options.outDir) {
    args.push("--out-dir", options.outDir);
  }
  const proc = spawnSync(executable, args, { encoding: "utf-8" });
  if (proc.error) {
    throw proc.error;
  }
  return {
    exitCode: proc.status ?? 1,
    stdout: proc.stdout,
    stderr: proc.stderr,
    configPath,
  };
}
