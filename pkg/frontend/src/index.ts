export {
  containsVar,
  differentiate,
  evaluate,
  ExprError,
  parse,
  toSource,
} from "./expr.js";
export type { Bindings, Expr, FuncName, VarName } from "./expr.js";
export { ConfigError, serialize, validate } from "./config.js";
export type { RunConfig } from "./config.js";
export {
  column,
  CsvError,
  parseCompare,
  parseCsv,
  parseHarmonics,
  parseMeta,
  parseSeries,
} from "./csv.js";
export type { CompareRow, HarmonicEntry, SeriesPoint, Table } from "./csv.js";
export { cliAvailable, run } from "./runner.js";
export type { RunnerOptions, RunResult, Subcommand } from "./runner.js";
