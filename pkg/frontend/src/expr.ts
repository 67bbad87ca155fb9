// Expression language mirroring the solver's problem grammar: variables
// x, t, tau; constant pi; operators + - * / ^ (^ right-associative, binding
// tighter than unary minus); functions sin, cos, exp. Parsing here lets a
// config be validated (and previewed) without invoking the solver.

export type VarName = "x" | "t" | "tau";
export type FuncName = "sin" | "cos" | "exp";

export type Expr =
  | { kind: "num"; value: number }
  | { kind: "const"; name: "pi" }
  | { kind: "var"; name: VarName }
  | { kind: "neg"; arg: Expr }
  | { kind: "bin"; op: "+" | "-" | "*" | "/" | "^"; left: Expr; right: Expr }
  | { kind: "call"; func: FuncName; arg: Expr };

export class ExprError extends Error {
  constructor(message: string, public readonly position: number) {
    super(`${message} (at position ${position})`);
    this.name = "ExprError";
  }
}

const VARIABLES: readonly string[] = ["x", "t", "tau"];
const FUNCTIONS: readonly string[] = ["sin", "cos", "exp"];

interface Token {
  kind: "num" | "name" | "op" | "end";
  text: string;
  pos: number;
}

const NUM_RE = /^(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?/;
const NAME_RE = /^[A-Za-z_][A-Za-z_0-9]*/;

function tokenize(source: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < source.length) {
    const c = source[i];
    if (/\s/.test(c)) {
      i += 1;
      continue;
    }
    const rest = source.slice(i);
    const num = NUM_RE.exec(rest);
    if (num) {
      tokens.push({ kind: "num", text: num[0], pos: i });
      i += num[0].length;
      continue;
    }
    const name = NAME_RE.exec(rest);
    if (name) {
      tokens.push({ kind: "name", text: name[0], pos: i });
      i += name[0].length;
      continue;
    }
    if ("+-*/^()".includes(c)) {
      tokens.push({ kind: "op", text: c, pos: i });
      i += 1;
      continue;
    }
    throw new ExprError(`unexpected character '${c}'`, i);
  }
  tokens.push({ kind: "end", text: "", pos: source.length });
  return tokens;
}

class Parser {
  private pos = 0;

  constructor(private readonly tokens: Token[]) {}

  private peek(): Token {
    return this.tokens[this.pos];
  }

  private advance(): Token {
    return this.tokens[this.pos++];
  }

  private expectOp(op: string): void {
    const tok = this.peek();
    if (tok.kind === "op" && tok.text === op) {
      this.pos += 1;
      return;
    }
    if (tok.kind === "end") {
      throw new ExprError(`expected '${op}' but input ended`, tok.pos);
    }
    throw new ExprError(`expected '${op}' but found '${tok.text}'`, tok.pos);
  }

  expression(): Expr {
    let node = this.term();
    while (this.peek().kind === "op" && "+-".includes(this.peek().text)) {
      const op = this.advance().text as "+" | "-";
      node = { kind: "bin", op, left: node, right: this.term() };
    }
    return node;
  }

  private term(): Expr {
    let node = this.unary();
    while (this.peek().kind === "op" && "*/".includes(this.peek().text)) {
      const op = this.advance().text as "*" | "/";
      node = { kind: "bin", op, left: node, right: this.unary() };
    }
    return node;
  }

  private unary(): Expr {
    const tok = this.peek();
    if (tok.kind === "op" && tok.text === "-") {
      this.advance();
      return { kind: "neg", arg: this.unary() };
    }
    return this.power();
  }

  private power(): Expr {
    const base = this.atom();
    const tok = this.peek();
    if (tok.kind === "op" && tok.text === "^") {
      this.advance();
      return { kind: "bin", op: "^", left: base, right: this.unary() };
    }
    return base;
  }

  private atom(): Expr {
    const tok = this.advance();
    if (tok.kind === "num") {
      return { kind: "num", value: Number(tok.text) };
    }
    if (tok.kind === "name") {
      if (tok.text === "pi") {
        return { kind: "const", name: "pi" };
      }
      if (VARIABLES.includes(tok.text)) {
        return { kind: "var", name: tok.text as VarName };
      }
      if (FUNCTIONS.includes(tok.text)) {
        this.expectOp("(");
        const arg = this.expression();
        this.expectOp(")");
        return { kind: "call", func: tok.text as FuncName, arg };
      }
      throw new ExprError(`unknown identifier '${tok.text}'`, tok.pos);
    }
    if (tok.kind === "op" && tok.text === "(") {
      const node = this.expression();
      this.expectOp(")");
      return node;
    }
    if (tok.kind === "end") {
      throw new ExprError("unexpected end of input", tok.pos);
    }
    throw new ExprError(`unexpected token '${tok.text}'`, tok.pos);
  }

  finish(node: Expr): Expr {
    const tok = this.peek();
    if (tok.kind !== "end") {
      throw new ExprError(`unexpected token '${tok.text}'`, tok.pos);
    }
    return node;
  }
}

export function parse(source: string): Expr {
  if (!source.trim()) {
    throw new ExprError("empty expression", 0);
  }
  const parser = new Parser(tokenize(source));
  return parser.finish(parser.expression());
}

export interface Bindings {
  x?: number;
  t?: number;
  tau?: number;
}

export function evaluate(expr: Expr, env: Bindings = {}): number {
  const value = evalNode(expr, env);
  if (!Number.isFinite(value)) {
    throw new ExprError("non-finite value during evaluation", 0);
  }
  return value;
}

function evalNode(expr: Expr, env: Bindings): number {
  switch (expr.kind) {
    case "num":
      return expr.value;
    case "const":
      return Math.PI;
    case "var":
      return env[expr.name] ?? 0;
    case "neg":
      return -evalNode(expr.arg, env);
    case "call": {
      const arg = evalNode(expr.arg, env);
      if (expr.func === "sin") return Math.sin(arg);
      if (expr.func === "cos") return Math.cos(arg);
      return Math.exp(arg);
    }
    case "bin": {
      const left = evalNode(expr.left, env);
      const right = evalNode(expr.right, env);
      switch (expr.op) {
        case "+":
          return left + right;
        case "-":
          return left - right;
        case "*":
          return left * right;
        case "/":
          return left / right;
        case "^":
          return Math.pow(left, right);
      }
    }
  }
}

export function containsVar(expr: Expr, name: VarName): boolean {
  switch (expr.kind) {
    case "var":
      return expr.name === name;
    case "neg":
    case "call":
      return containsVar(expr.arg, name);
    case "bin":
      return containsVar(expr.left, name) || containsVar(expr.right, name);
    default:
      return false;
  }
}

const num = (value: number): Expr => ({ kind: "num", value });
const isZero = (e: Expr): boolean => e.kind === "num" && e.value === 0;
const isOne = (e: Expr): boolean => e.kind === "num" && e.value === 1;

function addNode(a: Expr, b: Expr): Expr {
  if (isZero(a)) return b;
  if (isZero(b)) return a;
  return { kind: "bin", op: "+", left: a, right: b };
}

function mulNode(a: Expr, b: Expr): Expr {
  if (isZero(a) || isZero(b)) return num(0);
  if (isOne(a)) return b;
  if (isOne(b)) return a;
  return { kind: "bin", op: "*", left: a, right: b };
}

/** Exact symbolic derivative; exponents must not depend on the variable
 * (the grammar has no logarithm). */
export function differentiate(expr: Expr, name: VarName): Expr {
  switch (expr.kind) {
    case "num":
    case "const":
      return num(0);
    case "var":
      return num(expr.name === name ? 1 : 0);
    case "neg": {
      const inner = differentiate(expr.arg, name);
      return isZero(inner) ? num(0) : { kind: "neg", arg: inner };
    }
    case "call": {
      const du = differentiate(expr.arg, name);
      let outer: Expr;
      if (expr.func === "sin") {
        outer = { kind: "call", func: "cos", arg: expr.arg };
      } else if (expr.func === "cos") {
        outer = { kind: "neg", arg: { kind: "call", func: "sin", arg: expr.arg } };
      } else {
        outer = { kind: "call", func: "exp", arg: expr.arg };
      }
      return mulNode(outer, du);
    }
    case "bin": {
      const da = differentiate(expr.left, name);
      const db = differentiate(expr.right, name);
      switch (expr.op) {
        case "+":
          return addNode(da, db);
        case "-":
          if (isZero(db)) return da;
          if (isZero(da)) return { kind: "neg", arg: db };
          return { kind: "bin", op: "-", left: da, right: db };
        case "*":
          return addNode(mulNode(da, expr.right), mulNode(expr.left, db));
        case "/": {
          const numerator: Expr = {
            kind: "bin",
            op: "-",
            left: mulNode(da, expr.right),
            right: mulNode(expr.left, db),
          };
          const denominator: Expr = {
            kind: "bin",
            op: "^",
            left: expr.right,
            right: num(2),
          };
          return { kind: "bin", op: "/", left: numerator, right: denominator };
        }
        case "^": {
          if (containsVar(expr.right, name)) {
            throw new ExprError(
              `cannot differentiate power with exponent depending on ${name}`,
              0,
            );
          }
          if (isZero(da)) return num(0);
          const lowered: Expr = {
            kind: "bin",
            op: "-",
            left: expr.right,
            right: num(1),
          };
          const powered: Expr = {
            kind: "bin",
            op: "^",
            left: expr.left,
            right:
              expr.right.kind === "num" ? num(expr.right.value - 1) : lowered,
          };
          return mulNode(mulNode(expr.right, powered), da);
        }
      }
    }
  }
}

const PREC: Record<string, number> = {
  "+": 1,
  "-": 1,
  "*": 2,
  "/": 2,
  neg: 3,
  "^": 4,
  atom: 5,
};

function precedence(expr: Expr): number {
  if (expr.kind === "bin") return PREC[expr.op];
  if (expr.kind === "neg") return PREC.neg;
  return PREC.atom;
}

/** Render to source accepted by both this parser and the solver CLI. */
export function toSource(expr: Expr): string {
  switch (expr.kind) {
    case "num":
      return formatNumber(expr.value);
    case "const":
      return "pi";
    case "var":
      return expr.name;
    case "call":
      return `${expr.func}(${toSource(expr.arg)})`;
    case "neg": {
      const inner = toSource(expr.arg);
      return precedence(expr.arg) < PREC.neg ? `-(${inner})` : `-${inner}`;
    }
    case "bin": {
      let left = toSource(expr.left);
      let right = toSource(expr.right);
      const lp = precedence(expr.left);
      const rp = precedence(expr.right);
      if (expr.op === "^") {
        if (lp <= PREC["^"]) left = `(${left})`;
        if (rp < PREC["^"]) right = `(${right})`;
      } else {
        if (lp < PREC[expr.op]) left = `(${left})`;
        if (rp <= PREC[expr.op]) right = `(${right})`;
      }
      return `${left}${expr.op}${right}`;
    }
  }
}

function formatNumber(value: number): string {
  // integers render with a trailing .0 so the text stays unambiguous
  if (Number.isInteger(value) && Math.abs(value) < 1e15) {
    return `${value}.0`;
  }
  return String(value);
}
