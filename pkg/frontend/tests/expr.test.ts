import { describe, expect, it } from "vitest";

import {
  differentiate,
  evaluate,
  ExprError,
  parse,
  toSource,
} from "../src/expr.js";

describe("parse", () => {
  it("builds the product tree for an envelope", () => {
    expect(parse("sin(x)*(1+t/2)")).toEqual({
      kind: "bin",
      op: "*",
      left: { kind: "call", func: "sin", arg: { kind: "var", name: "x" } },
      right: {
        kind: "bin",
        op: "+",
        left: { kind: "num", value: 1 },
        right: {
          kind: "bin",
          op: "/",
          left: { kind: "var", name: "t" },
          right: { kind: "num", value: 2 },
        },
      },
    });
  });

  it("reports the position of an unbalanced parenthesis", () => {
    try {
      parse("sin(x");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ExprError);
      expect((err as ExprError).position).toBe(5);
    }
  });

  it.each(["", "sin()", "2+", "foo(x)", "1 2", "(1+2"])(
    "rejects %j",
    (source) => {
      expect(() => parse(source)).toThrow(ExprError);
    },
  );
});

describe("evaluate", () => {
  it.each([
    ["2^3^2", 512],
    ["-2^2", -4],
    ["2-3-4", -5],
    ["2/4/2", 0.25],
    ["2*-3", -6],
    ["2^-1", 0.5],
  ])("%s = %d", (source, expected) => {
    expect(evaluate(parse(source))).toBeCloseTo(expected, 12);
  });

  it("binds variables and ignores unused ones", () => {
    expect(evaluate(parse("sin(x)"), { x: Math.PI / 2, t: 9 })).toBeCloseTo(
      1,
      12,
    );
    expect(evaluate(parse("t^3"), { t: 2 })).toBeCloseTo(8, 12);
  });

  it("flags non-finite results", () => {
    expect(() => evaluate(parse("1/x"), { x: 0 })).toThrow(ExprError);
  });
});

describe("differentiate", () => {
  it("applies the chain rule", () => {
    const d = differentiate(parse("sin(2*tau)"), "tau");
    expect(evaluate(d, { tau: 0 })).toBeCloseTo(2, 12);
  });

  it("matches centered finite differences on a mixed expression", () => {
    const tree = parse("sin(x)*(1+t/2)+exp(0.3*t)*cos(2*tau)");
    const h = 1e-5;
    for (const name of ["x", "t", "tau"] as const) {
      const d = differentiate(tree, name);
      const point = { x: 0.7, t: 0.9, tau: 2.3 };
      const up = { ...point, [name]: point[name] + h };
      const down = { ...point, [name]: point[name] - h };
      const fd = (evaluate(tree, up) - evaluate(tree, down)) / (2 * h);
      expect(evaluate(d, point)).toBeCloseTo(fd, 6);
    }
  });

  it("rejects variable exponents", () => {
    expect(() => differentiate(parse("2^t"), "t")).toThrow(ExprError);
  });

  it("keeps derivatives of constants at zero", () => {
    const d = differentiate(parse("pi+2"), "x");
    expect(evaluate(d, { x: 1.3 })).toBe(0);
  });
});

describe("toSource", () => {
  it.each([
    "sin(x)*(1+t/2)",
    "cos(tau)+0.5*sin(2*tau)",
    "x*(pi-x)",
    "1+t+(1+t/3)*cos(tau)",
    "2^3^2",
    "-x^2",
    "t-(1-t)",
  ])("round-trips %s through print and parse", (source) => {
    const tree = parse(source);
    expect(parse(toSource(tree))).toEqual(tree);
  });

  it("keeps values identical after a round trip", () => {
    const tree = parse("exp(-t)*sin(2*x)/(1+cos(tau)^2)");
    const reparsed = parse(toSource(tree));
    const point = { x: 1.1, t: 0.4, tau: 5.0 };
    expect(evaluate(reparsed, point)).toBeCloseTo(evaluate(tree, point), 14);
  });
});
