"""Shared test oracles: finite differences, Koszul connection, direct
curvature assembly, and a seeded random-expression generator.

These deliberately re-derive quantities through independent routes (numeric
differencing, textbook formulas with explicit loops) so the engine's closed
forms are checked against something that does not share their code path.
"""

from __future__ import annotations

import random

import numpy as np

from ppc import expr
from ppc.jets import ChartPoint


def fd_gradient(f, p: ChartPoint, h: float = 1e-6) -> np.ndarray:
    base = np.array([p.x, p.y, p.z])
    grad = np.zeros(3)
    for i in range(3):
        hi = base.copy(); hi[i] += h
        lo = base.copy(); lo[i] -= h
        grad[i] = (f(ChartPoint(*hi)) - f(ChartPoint(*lo))) / (2 * h)
    return grad


def fd_hessian(f, p: ChartPoint, h: float = 1e-4) -> np.ndarray:
    base = np.array([p.x, p.y, p.z])
    hess = np.zeros((3, 3))
    f0 = f(p)
    for i in range(3):
        hi = base.copy(); hi[i] += h
        lo = base.copy(); lo[i] -= h
        hess[i, i] = (f(ChartPoint(*hi)) - 2 * f0 + f(ChartPoint(*lo))) / h ** 2
    for i in range(3):
        for j in range(i + 1, 3):
            pp = base.copy(); pp[i] += h; pp[j] += h
            pm = base.copy(); pm[i] += h; pm[j] -= h
            mp = base.copy(); mp[i] -= h; mp[j] += h
            mm = base.copy(); mm[i] -= h; mm[j] -= h
            val = (f(ChartPoint(*pp)) - f(ChartPoint(*pm))
                   - f(ChartPoint(*mp)) + f(ChartPoint(*mm))) / (4 * h ** 2)
            hess[i, j] = hess[j, i] = val
    return hess


def rel_err(got: float, want: float) -> float:
    return abs(got - want) / max(1.0, abs(got), abs(want))


def koszul_connection(C: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Connection of a left-invariant metric from structure constants:
    2 G(nabla_i Ej, Ek) = G([Ei,Ej],Ek) - G([Ej,Ek],Ei) + G([Ek,Ei],Ej)."""
    gamma = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                rhs = (C[i, j] @ G[:, k] - C[j, k] @ G[:, i] + C[k, i] @ G[:, j])
                gamma[i, j, k] = rhs / (2 * G[k, k])
    return gamma


def direct_curvature(C: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """R(E_i, E_j) E_k under R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y],
    written with explicit loops (constant structure functions)."""
    R = np.zeros((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                vec = np.zeros(3)
                for m in range(3):
                    vec += C[i, j, m] * gamma[m, k]
                    vec -= gamma[j, k, m] * gamma[i, m]
                    vec += gamma[i, k, m] * gamma[j, m]
                R[i, j, k] = vec
    return R


# Random expressions over the DSL grammar ----------------------------------------

_FUNCS = ("exp", "log", "sqrt", "sin", "cos", "sinh", "cosh")


def random_ast(rng: random.Random, depth: int, consts: dict):
    leaf_p = 0.35 if depth > 0 else 1.0
    if rng.random() < leaf_p:
        kind = rng.randrange(3)
        if kind == 0:
            return expr.ident(rng.choice("xyz"))
        if kind == 1 and consts:
            return expr.ident(rng.choice(sorted(consts)))
        return expr.num(round(rng.uniform(-3.0, 3.0), 3))
    kind = rng.randrange(6)
    if kind < 3:
        op = rng.choice("+-*")
        return expr.Bin(op, random_ast(rng, depth - 1, consts),
                        random_ast(rng, depth - 1, consts))
    if kind == 3:
        return expr.Bin("/", random_ast(rng, depth - 1, consts),
                        random_ast(rng, depth - 1, consts))
    if kind == 4:
        return expr.powi(random_ast(rng, depth - 1, consts),
                         rng.choice([-2, -1, 2, 3]))
    return expr.call(rng.choice(_FUNCS), random_ast(rng, depth - 1, consts))


def _node_guard_ok(node, p: ChartPoint, env) -> bool:
    """Require every division / log / sqrt / negative power to sit comfortably
    inside its domain at p, so central differences stay well-defined."""
    try:
        jet = expr.eval_jet(node, p, env)
    except Exception:
        return False
    if not np.isfinite(jet.value):
        return False
    if isinstance(node, expr.Bin):
        if node.op == "/" and abs(expr.eval_value(node.right, p, env)) < 0.3:
            return False
        return (_node_guard_ok(node.left, p, env)
                and _node_guard_ok(node.right, p, env))
    if isinstance(node, expr.Pow):
        if node.exponent < 0 and abs(expr.eval_value(node.base, p, env)) < 0.3:
            return False
        return _node_guard_ok(node.base, p, env)
    if isinstance(node, expr.Call):
        if node.fn in ("log", "sqrt") and expr.eval_value(node.arg, p, env) < 0.3:
            return False
        return _node_guard_ok(node.arg, p, env)
    if isinstance(node, expr.Neg):
        return _node_guard_ok(node.arg, p, env)
    return True


def well_scaled_sample(rng: random.Random, consts: dict, depth: int = 3,
                       max_tries: int = 400):
    """A (ast, point) pair where the expression and all its subterms are
    finite, domain-safe and moderately sized at the point."""
    for _ in range(max_tries):
        ast = random_ast(rng, depth, consts)
        p = ChartPoint(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                       rng.uniform(-0.8, 0.8))
        if not _node_guard_ok(ast, p, consts):
            continue
        jet = expr.eval_jet(ast, p, consts)
        if (abs(jet.value) > 50.0 or np.max(np.abs(jet.grad)) > 1e3
                or np.max(np.abs(jet.hess)) > 1e4):
            continue
        return ast, p
    raise AssertionError("could not draw a well-scaled expression")
