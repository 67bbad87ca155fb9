"""Shared test fixtures: the expression catalog and a random tree generator."""

from __future__ import annotations

import numpy as np
import pytest

from wavesource.expr import Bin, Call, Const, Expr, Neg, Num, Var

# Expressions exercised across the suite.  BC_ENVELOPES additionally satisfy
# the boundary requirements f = f_xx = 0 at x = 0 and x = pi.
CATALOG = [
    "sin(x)",
    "sin(2*x)",
    "sin(x)+0.3*sin(2*x)",
    "sin(x)*(1+t/2)",
    "(1+t)*sin(2*x)",
    "x*(pi-x)",
    "2",
    "cos(tau)",
    "sin(tau)",
    "1+cos(tau)",
    "1+t+cos(tau)",
    "cos(tau)^2",
    "t*sin(2*tau)",
    "cos(tau)+0.5*sin(2*tau)",
    "1+t+(1+t/3)*cos(tau)",
    "exp(-t)*sin(x)",
    "sin(3*x)*cos(t)",
    "t^3",
    "sin(x)*exp(t/2)",
]

BC_ENVELOPES = [
    "sin(x)",
    "sin(2*x)",
    "sin(x)+0.3*sin(2*x)",
    "sin(x)*(1+t/2)",
    "(1+t)*sin(2*x)",
    "exp(-t)*sin(x)",
    "sin(3*x)*cos(t)",
]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250810)


def random_expr(gen: np.random.Generator, depth: int = 3) -> Expr:
    """Random tree over the problem grammar, kept numerically tame:
    exponents are small integer constants and exp arguments are damped."""
    if depth == 0 or gen.random() < 0.3:
        choice = gen.integers(0, 5)
        if choice == 0:
            return Num(round(float(gen.uniform(0.1, 3.0)), 3))
        if choice == 1:
            return Const("pi")
        return Var(("x", "t", "tau")[int(choice - 2)])
    kind = gen.integers(0, 7)
    if kind == 0:
        return Neg(random_expr(gen, depth - 1))
    if kind == 1:
        return Call("sin", random_expr(gen, depth - 1))
    if kind == 2:
        return Call("cos", random_expr(gen, depth - 1))
    if kind == 3:
        return Call("exp", Bin("*", Num(0.3), random_expr(gen, depth - 1)))
    if kind == 4:
        return Bin("^", random_expr(gen, depth - 1),
                   Num(float(gen.integers(2, 4))))
    op = "+-*/"[int(gen.integers(0, 4))]
    return Bin(op, random_expr(gen, depth - 1), random_expr(gen, depth - 1))


def random_point(gen: np.random.Generator) -> dict:
    return {
        "x": float(gen.uniform(0.2, 2.9)),
        "t": float(gen.uniform(0.1, 1.9)),
        "tau": float(gen.uniform(0.2, 6.0)),
    }
