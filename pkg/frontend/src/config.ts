// Run-configuration authoring and validation for the solver CLI. The file
// format is flat sectioned key = value text; expression values are quoted
// strings over the problem grammar, scalar values may be constant
// expressions like pi/2.

import { containsVar, evaluate, parse, type VarName } from "./expr.js";

export interface RunConfig {
  problem: {
    f?: string;
    r?: string;
    r0?: string;
    chi?: string;
    phi0?: string;
    psi?: number[];
    phi0File?: string;
    chiFile?: string;
    psiFile?: string;
    r0File?: string;
    T?: number | string;
    x0?: number | string;
    t0?: number | string;
  };
  discretization?: {
    modes?: number;
    harmonics?: number;
    timeNodes?: number;
    spaceNodes?: number;
    oversample?: number;
    refine?: number;
  };
  sweep?: { omega: number[] };
  output?: { dir?: string; prefix?: string };
}

export class ConfigError extends Error {
  constructor(message: string, public readonly field?: string) {
    super(message);
    this.name = "ConfigError";
  }
}

const EXPRESSION_KEYS = ["f", "r", "r0", "chi", "phi0"] as const;

function scalar(field: string, value: number | string): number {
  if (typeof value === "number") {
    if (!Number.isFinite(value)) {
      throw new ConfigError(`field '${field}' must be finite`, field);
    }
    return value;
  }
  let tree;
  try {
    tree = parse(value);
  } catch (err) {
    throw new ConfigError(`field '${field}': ${(err as Error).message}`, field);
  }
  for (const name of ["x", "t", "tau"] as VarName[]) {
    if (containsVar(tree, name)) {
      throw new ConfigError(
        `field '${field}' must be a constant expression`,
        field,
      );
    }
  }
  return evaluate(tree);
}

/** Check every cross-field rule the solver's own validation enforces, so
 * mistakes surface before a run is launched. Returns resolved scalars. */
export function validate(config: RunConfig): {
  T?: number;
  x0?: number;
  t0?: number;
} {
  for (const key of EXPRESSION_KEYS) {
    const text = config.problem[key];
    if (text !== undefined) {
      try {
        parse(text);
      } catch (err) {
        throw new ConfigError(
          `field '${key}': ${(err as Error).message}`,
          key,
        );
      }
    }
  }
  const resolved: { T?: number; x0?: number; t0?: number } = {};
  if (config.problem.T !== undefined) {
    resolved.T = scalar("T", config.problem.T);
    if (resolved.T <= 0) {
      throw new ConfigError("field 'T' must be positive", "T");
    }
  }
  if (config.problem.x0 !== undefined) {
    resolved.x0 = scalar("x0", config.problem.x0);
    if (!(resolved.x0 > 0 && resolved.x0 < Math.PI)) {
      throw new ConfigError("field 'x0' must lie in (0, pi)", "x0");
    }
  }
  if (config.problem.t0 !== undefined) {
    resolved.t0 = scalar("t0", config.problem.t0);
    if (resolved.t0 <= 0) {
      throw new ConfigError("field 't0' must be positive", "t0");
    }
    if (resolved.T !== undefined && resolved.t0 > resolved.T + 1e-12) {
      throw new ConfigError("field 't0' must lie in (0, T]", "t0");
    }
  }
  const disc = config.discretization ?? {};
  for (const [key, minimum] of [
    ["modes", 1],
    ["harmonics", 1],
    ["timeNodes", 2],
    ["spaceNodes", 2],
    ["oversample", 20],
    ["refine", 0],
  ] as const) {
    const value = disc[key];
    if (value !== undefined && (!Number.isInteger(value) || value < minimum)) {
      throw new ConfigError(
        `field '${key}' must be an integer >= ${minimum}`,
        key,
      );
    }
  }
  const omegas = config.sweep?.omega ?? [];
  for (const w of omegas) {
    if (!(w > 0)) {
      throw new ConfigError("field 'omega' values must be positive", "omega");
    }
  }
  for (let i = 1; i < omegas.length; i += 1) {
    if (omegas[i] <= omegas[i - 1]) {
      throw new ConfigError("field 'omega' values must be ascending", "omega");
    }
  }
  if (config.problem.psi !== undefined && config.problem.psi.length === 0) {
    throw new ConfigError("field 'psi' is empty", "psi");
  }
  return resolved;
}

const FILE_KEY_NAMES: Record<string, string> = {
  phi0File: "phi0_file",
  chiFile: "chi_file",
  psiFile: "psi_file",
  r0File: "r0_file",
};

const DISC_KEY_NAMES: Record<string, string> = {
  modes: "modes",
  harmonics: "harmonics",
  timeNodes: "time_nodes",
  spaceNodes: "space_nodes",
  oversample: "oversample",
  refine: "refine",
};

/** Serialize to the sectioned text the solver CLI reads. */
export function serialize(config: RunConfig): string {
  validate(config);
  const lines: string[] = ["[problem]"];
  for (const key of EXPRESSION_KEYS) {
    const text = config.problem[key];
    if (text !== undefined) {
      lines.push(`${key} = "${text}"`);
    }
  }
  for (const [attr, name] of Object.entries(FILE_KEY_NAMES)) {
    const value = (config.problem as Record<string, unknown>)[attr];
    if (value !== undefined) {
      lines.push(`${name} = ${value}`);
    }
  }
  if (config.problem.psi !== undefined) {
    lines.push(`psi = ${config.problem.psi.join(" ")}`);
  }
  for (const key of ["T", "x0", "t0"] as const) {
    const value = config.problem[key];
    if (value !== undefined) {
      lines.push(`${key} = ${value}`);
    }
  }
  const disc = config.discretization ?? {};
  const discEntries = Object.entries(DISC_KEY_NAMES).filter(
    ([attr]) => (disc as Record<string, unknown>)[attr] !== undefined,
  );
  if (discEntries.length > 0) {
    lines.push("", "[discretization]");
    for (const [attr, name] of discEntries) {
      lines.push(`${name} = ${(disc as Record<string, unknown>)[attr]}`);
    }
  }
  if (config.sweep && config.sweep.omega.length > 0) {
    lines.push("", "[sweep]", `omega = ${config.sweep.omega.join(" ")}`);
  }
  if (config.output) {
    lines.push("", "[output]");
    if (config.output.dir !== undefined) lines.push(`dir = ${config.output.dir}`);
    if (config.output.prefix !== undefined) {
      lines.push(`prefix = ${config.output.prefix}`);
    }
  }
  lines.push("");
  return lines.join("\n");
}
