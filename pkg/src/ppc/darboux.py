"""Darboux-coordinate paracontact structures and the chart curvature oracle.

In Darboux coordinates (x, y, z) every three-dimensional paracontact metric
structure takes the explicit form

    xi = 2 d/dz,   eta = (1/2)(dz - y dx),

    g = (1/4) [[a, b, -y], [b, c, 0], [-y, 0, 1]],
    phi = [[-b, -c, 0], [a - y^2, b, 0], [-b y, -c y, 0]],

for scalar functions a, b, c subject to a c - b^2 - c y^2 = -1.  This module
builds and validates such structures, computes their h tensor, and provides a
coordinate Christoffel/Ricci oracle (via jet derivatives of the metric
entries) that is independent of the frame-level closed forms.

Exterior derivative convention: d eta (X, Y) = (1/2)(X eta(Y) - Y eta(X)
- eta([X, Y])), so d eta is the constant matrix [[0, 1/4, 0], [-1/4, 0, 0],
[0, 0, 0]] on coordinate fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import expr
from .errors import ConstraintViolated, SingularMetric, ZeroAlpha, ZeroC
from .frame import (Field, FrameRealization, ParacontactFrameSpec, SymBilinear,
                    as_field, _field_jet, _field_value, realized_bracket_coeffs,
                    ricci_iht)
from .jets import ChartPoint

XI_VEC = np.array([0.0, 0.0, 2.0])

# d eta on coordinate fields under the half-convention exterior derivative.
DETA = np.array([[0.0, 0.25, 0.0], [-0.25, 0.0, 0.0], [0.0, 0.0, 0.0]])

HOMOGENEITY_THRESHOLD = 1e-7


def _eta_at(p: ChartPoint) -> np.ndarray:
    return np.array([-p.y / 2.0, 0.0, 0.5])


@dataclass(frozen=True)
class DarbouxStructure:
    a: Field
    b: Field
    c: Field
    bindings: dict

    def constraint_residual(self, p: ChartPoint) -> float:
        """a*c - b^2 - c*y^2 + 1 at p (zero on valid structures)."""
        env = self.bindings
        av = _field_value(self.a, p, env)
        bv = _field_value(self.b, p, env)
        cv = _field_value(self.c, p, env)
        return av * cv - bv * bv - cv * p.y * p.y + 1.0

    def metric_matrix(self, p: ChartPoint) -> np.ndarray:
        env = self.bindings
        av = _field_value(self.a, p, env)
        bv = _field_value(self.b, p, env)
        cv = _field_value(self.c, p, env)
        return 0.25 * np.array([
            [av, bv, -p.y],
            [bv, cv, 0.0],
            [-p.y, 0.0, 1.0],
        ])

    def phi_matrix(self, p: ChartPoint) -> np.ndarray:
        env = self.bindings
        av = _field_value(self.a, p, env)
        bv = _field_value(self.b, p, env)
        cv = _field_value(self.c, p, env)
        y = p.y
        return np.array([
            [-bv, -cv, 0.0],
            [av - y * y, bv, 0.0],
            [-bv * y, -cv * y, 0.0],
        ])

    def metric_field(self) -> "ChartMetricField":
        def quarter(f: Field):
            if isinstance(f, float):
                return f / 4.0
            return expr.div(f, expr.num(4))

        neg_y_quarter = expr.div(expr.neg(expr.ident("y")), expr.num(4))
        return ChartMetricField(entries=(
            (quarter(self.a), quarter(self.b), neg_y_quarter),
            (quarter(self.b), quarter(self.c), 0.0),
            (neg_y_quarter, 0.0, 0.25),
        ), bindings=self.bindings)


def build_darboux(a, b, c, bindings: Optional[dict] = None,
                  points: Sequence[ChartPoint] = (),
                  tol: float = 1e-10) -> DarbouxStructure:
    """Validate the constraint on the sample points and build the structure.

    The constraint is checked, never solved: callers must supply consistent
    a, b, c.
    """
    D = DarbouxStructure(as_field(a), as_field(b), as_field(c),
                         dict(bindings or {}))
    worst = 0.0
    worst_p = None
    for p in points:
        resid = abs(D.constraint_residual(p))
        if resid > worst:
            worst, worst_p = resid, p
    if worst > tol:
        raise ConstraintViolated(
            f"a*c - b^2 - c*y^2 = -1 fails at ({worst_p.x!r}, {worst_p.y!r}, "
            f"{worst_p.z!r}): residual {worst!r}")
    return D


def axioms_check(D: DarbouxStructure, p: ChartPoint,
                 phi: Optional[np.ndarray] = None) -> dict:
    """Residual map of the almost-paracontact axioms at p.

    Keys: phi_squared, metric_compat, fundamental_two_form, eta_xi, phi_xi,
    eta_phi, metric_xi.  ``phi`` overrides the structure's phi matrix (used to
    demonstrate sensitivity to corrupted input).
    """
    g = D.metric_matrix(p)
    ph = D.phi_matrix(p) if phi is None else np.asarray(phi, dtype=float)
    eta = _eta_at(p)
    out = {}
    out["phi_squared"] = float(np.max(np.abs(
        ph @ ph - (np.eye(3) - np.outer(XI_VEC, eta)))))
    out["metric_compat"] = float(np.max(np.abs(
        ph.T @ g @ ph + g - np.outer(eta, eta))))
    out["fundamental_two_form"] = float(np.max(np.abs(g @ ph - DETA)))
    out["eta_xi"] = abs(float(eta @ XI_VEC) - 1.0)
    out["phi_xi"] = float(np.max(np.abs(ph @ XI_VEC)))
    out["eta_phi"] = float(np.max(np.abs(eta @ ph)))
    out["metric_xi"] = float(np.max(np.abs(g @ XI_VEC - eta)))
    return out


@dataclass(frozen=True)
class HMatrices:
    h: np.ndarray
    h2: np.ndarray
    para_sasakian: bool
    nilpotent: bool
    nilpotency_value: float  # b_z^2 - a_z c_z


def h_matrices(D: DarbouxStructure, p: ChartPoint, tol: float = 1e-10) -> HMatrices:
    """h = (1/2) L_xi phi and h^2 in coordinates, with the z-dependence flags."""
    env = D.bindings
    az = float(_field_jet(D.a, p, env).grad[2])
    bz = float(_field_jet(D.b, p, env).grad[2])
    cz = float(_field_jet(D.c, p, env).grad[2])
    y = p.y
    h = np.array([
        [-bz, -cz, 0.0],
        [az, bz, 0.0],
        [-bz * y, -cz * y, 0.0],
    ])
    nil = bz * bz - az * cz
    h2 = nil * np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [y, 0.0, 0.0],
    ])
    return HMatrices(h, h2,
                     para_sasakian=max(abs(az), abs(bz), abs(cz)) <= tol,
                     nilpotent=abs(nil) <= tol,
                     nilpotency_value=nil)


# Chart curvature oracle ----------------------------------------------------------


@dataclass(frozen=True)
class ChartMetricField:
    """Symmetric 3x3 matrix of scalar fields over (x, y, z)."""

    entries: tuple  # 3x3 nested tuple of Field
    bindings: dict

    def __post_init__(self):
        rows = tuple(tuple(as_field(e) for e in row) for row in self.entries)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("metric field must be 3x3")
        object.__setattr__(self, "entries", rows)

    def jets_at(self, p: ChartPoint):
        env = self.bindings
        jets = [[_field_jet(self.entries[i][j], p, env) for j in range(3)]
                for i in range(3)]
        gval = np.array([[jets[i][j].value for j in range(3)] for i in range(3)])
        dg = np.array([[[jets[i][j].grad[m] for j in range(3)] for i in range(3)]
                       for m in range(3)])
        hess = [[jets[i][j].hess_matrix() for j in range(3)] for i in range(3)]
        d2g = np.array([[[[hess[i][j][m, n] for j in range(3)] for i in range(3)]
                         for n in range(3)] for m in range(3)])
        return gval, dg, d2g


def _christoffel_data(gfield: ChartMetricField, p: ChartPoint):
    gval, dg, d2g = gfield.jets_at(p)
    det = np.linalg.det(gval)
    if abs(det) < 1e-12:
        raise SingularMetric(
            f"metric determinant {det!r} at ({p.x!r}, {p.y!r}, {p.z!r})")
    ginv = np.linalg.inv(gval)
    # T[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    T = (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg)
         - np.einsum("lij->lij", dg))
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, T)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dT = (np.einsum("mijl->mlij", d2g) + np.einsum("mjil->mlij", d2g)
          - np.einsum("mlij->mlij", d2g))
    dgamma = 0.5 * (np.einsum("mkl,lij->mkij", dginv, T)
                    + np.einsum("kl,mlij->mkij", ginv, dT))
    return gval, ginv, gamma, dgamma


def chart_christoffel(gfield: ChartMetricField, p: ChartPoint) -> np.ndarray:
    """Christoffel symbols gamma[k, i, j] of the metric field at p."""
    return _christoffel_data(gfield, p)[2]


def chart_ricci(gfield: ChartMetricField, p: ChartPoint):
    """Ricci tensor (coordinate indices) and scalar curvature at p.

    Contraction matches the frame engine's pinned convention, so frame Ricci
    data pushed to coordinates is directly comparable.
    """
    gval, ginv, gamma, dgamma = _christoffel_data(gfield, p)
    term1 = np.einsum("iijk->jk", dgamma)
    term2 = np.einsum("jiik->jk", dgamma)
    contr = np.einsum("iim->m", gamma)
    term3 = np.einsum("mjk,m->jk", gamma, contr)
    term4 = np.einsum("mik,ijm->jk", gamma, gamma)
    rho = term1 - term2 + term3 - term4
    rho_sym = SymBilinear(rho, "ricci")
    r = float(np.einsum("jk,jk->", ginv, rho_sym.matrix))
    return rho_sym, r


def frame_ricci_in_coordinates(spec: ParacontactFrameSpec, p: ChartPoint,
                               tol: float = 1e-9) -> np.ndarray:
    """Push the frame-level Ricci tensor forward to coordinate indices through
    the realized frame (coordinate vectors expanded in the frame)."""
    data = ricci_iht(spec, p, tol=tol)
    V = spec.frame_matrix(p)
    comp = np.linalg.inv(V.T)  # column i: frame components of d/dx_i
    return comp.T @ data.ricci.matrix @ comp


# The explicit inhomogeneous example and its frame -----------------------------------


@dataclass(frozen=True)
class ExampleStructure:
    darboux: DarbouxStructure
    frame: ParacontactFrameSpec
    metric: ChartMetricField
    e_coeffs: tuple
    phie_coeffs: tuple
    bindings: dict


def example_structure(alpha: float, beta: float, gamma: float, f,
                      extra_bindings: Optional[dict] = None) -> ExampleStructure:
    """The explicit chart structure with a = F, b = 1, c = 0 where
    F = f(x) + alpha e^{2z} + beta y + gamma, together with its global
    phi-basis realization and structure functions."""
    if alpha == 0.0:
        raise ZeroAlpha("alpha must be nonzero (alpha = 0 collapses to the "
                        "paraSasakian family)")
    f_ast = expr.as_ast(f)
    bindings = dict(extra_bindings or {})
    bindings.update({"alpha": float(alpha), "beta": float(beta),
                     "gamma": float(gamma)})
    y, z = expr.ident("y"), expr.ident("z")
    F = expr.add(
        expr.add(f_ast,
                 expr.mul(expr.ident("alpha"),
                          expr.call("exp", expr.mul(expr.num(2), z)))),
        expr.add(expr.mul(expr.ident("beta"), y), expr.ident("gamma")))
    darboux = DarbouxStructure(F, 1.0, 0.0, bindings)

    s2 = expr.call("sqrt", expr.num(2))
    two_y2 = expr.mul(expr.num(2), expr.powi(y, 2))
    two_F = expr.mul(expr.num(2), F)
    e_coeffs = (
        expr.div(expr.num(4), s2),
        expr.div(expr.add(expr.sub(two_y2, two_F), expr.num(1)), s2),
        expr.div(expr.mul(expr.num(4), y), s2),
    )
    phie_coeffs = (
        expr.div(expr.num(-4), s2),
        expr.div(expr.add(expr.sub(expr.num(1), two_y2), two_F), s2),
        expr.div(expr.mul(expr.num(-4), y), s2),
    )
    a1 = expr.mul(expr.mul(expr.num(4), expr.ident("alpha")),
                  expr.call("exp", expr.mul(expr.num(2), z)))
    a4 = expr.mul(s2, expr.sub(expr.ident("beta"), expr.mul(expr.num(2), y)))
    frame = ParacontactFrameSpec(
        a1=a1, a2=a1, a3=-1.0, a4=a4, a5=expr.neg(a4),
        mode="chart", bindings=bindings,
        realization=FrameRealization(xi=(0.0, 0.0, 2.0), e=e_coeffs,
                                     phie=phie_coeffs),
        epsilon=1)
    return ExampleStructure(darboux, frame, darboux.metric_field(),
                            e_coeffs, phie_coeffs, bindings)


# Homogeneity probe -------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    variation: float
    homogeneous: bool
    pq_identity_residual: float
    brackets: np.ndarray        # rotated bracket coefficients at the first point
    threshold: float


def homogeneity_probe(alpha: float, beta: float, C: float,
                      points: Sequence[ChartPoint],
                      threshold: float = HOMOGENEITY_THRESHOLD) -> ProbeResult:
    """Probe local homogeneity of the explicit example through the frame gauge
    e = p E + q phi_E, phi_e = q E + p phi_E with p, q the unique z-profile
    (p^2 - q^2 = 1) making the xi-brackets constant.

    Reports the sampled rotated-bracket coefficient tables' total variation;
    a structure passing the probe (variation below threshold) has constant
    rotated brackets, the hallmark of a left-invariant model.
    """
    if C == 0.0:
        raise ZeroC("gauge constant C must be nonzero")
    ex = example_structure(alpha, beta, 0.0, expr.num(0))
    env = dict(ex.bindings)
    env["C"] = float(C)
    p_ast = expr.parse("(exp(z)/C + C*exp(-z))/2")
    q_ast = expr.parse("(exp(z)/C - C*exp(-z))/2")

    def combine(u_ast, v_ast):
        return tuple(expr.add(expr.mul(u_ast, ec), expr.mul(v_ast, pc))
                     for ec, pc in zip(ex.e_coeffs, ex.phie_coeffs))

    rot = FrameRealization(xi=(0.0, 0.0, 2.0), e=combine(p_ast, q_ast),
                           phie=combine(q_ast, p_ast))
    tables = []
    pq_resid = 0.0
    for pt in points:
        values = rot.value_matrix(pt, env)
        jets = rot.jet_rows(pt, env)
        tables.append(realized_bracket_coeffs(values, jets))
        pv = expr.eval_value(p_ast, pt, env)
        qv = expr.eval_value(q_ast, pt, env)
        pq_resid = max(pq_resid, abs(pv * pv - qv * qv - 1.0))
    stack = np.stack(tables)
    variation = float(np.max(stack.max(axis=0) - stack.min(axis=0)))
    return ProbeResult(variation, variation <= threshold, pq_resid,
                       tables[0], threshold)
