"""Headline paracontact verdicts: the Ricci-soliton system, (kappa, mu)
detection, Segre classification of the Ricci operator, and the homogeneous
soliton family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionViolated, ZeroParameter
from .frame import (G, XI, E, PHIE, ChartPoint, ParacontactFrameSpec, RicciIht,
                    SymBilinear, bracket_table, curvature_lie_group,
                    infer_epsilon, lie_metric, ricci_iht)

# Default soliton pass thresholds; chart mode accumulates jet roundoff.
TOL_LIE_GROUP = 1e-12
TOL_CHART = 1e-9

DISC_TOL = 1e-10   # cubic discriminant tolerance for multiplicity decisions
DISC_ZERO = 1e-14  # below this the spectrum is degenerate to machine noise


def default_tol(spec) -> float:
    return TOL_LIE_GROUP if spec.mode == "lie_group" else TOL_CHART


@dataclass(frozen=True)
class SolitonReport:
    lam: float                      # the forced soliton constant, -2
    residual_matrix: SymBilinear    # L_xi g + rho + 2 G at the worst point
    residual_norm: float
    scalar_curvature: float
    A_value: float
    verdict: str                    # soliton | not_soliton | precondition_failed
    best_lambda: float = 0.0        # (1/3) tr(G^-1 (L_xi g + rho)), diagnostic
    worst_point: Optional[ChartPoint] = None
    epsilon: int = 1
    detail: str = ""


@dataclass(frozen=True)
class KappaMu:
    kappa: float
    mu: Optional[float]
    nilpotent_h: bool
    curvature_residual: Optional[float] = None  # lie_group cross-check


@dataclass(frozen=True)
class SegreType:
    label: str                 # diag_distinct | diag_repeated | complex_pair
    #                          | segre_21 | segre_degenerate_21 | segre_3
    eigenvalues: tuple         # up to 3 reals
    borderline: bool = False


def soliton_check(spec: ParacontactFrameSpec, points: Sequence[ChartPoint],
                  tol: Optional[float] = None) -> SolitonReport:
    """Decide whether xi solves the Ricci soliton equation on the sample set.

    The soliton constant is not searched: it is forced to -2, and the check
    evaluates L_xi g + rho + 2 G together with A = 2 a1 and r = -6 at every
    point.  IHT failures are reported as verdict ``precondition_failed``.
    """
    if tol is None:
        tol = default_tol(spec)
    zero = SymBilinear(np.zeros((3, 3)), "soliton_residual")
    try:
        eps = infer_epsilon(spec, points)
    except PreconditionViolated as exc:
        return SolitonReport(-2.0, zero, math.inf, 0.0, 0.0,
                             "precondition_failed", detail=str(exc))
    worst_norm = -1.0
    worst: Optional[tuple] = None
    for p in points:
        try:
            data: RicciIht = ricci_iht(spec, p, tol=tol)
        except PreconditionViolated as exc:
            return SolitonReport(-2.0, zero, math.inf, 0.0, 0.0,
                                 "precondition_failed", epsilon=eps,
                                 worst_point=p, detail=str(exc))
        L = lie_metric(spec, p)
        resid = L.matrix + data.ricci.matrix + 2.0 * G
        norm = float(np.max(np.abs(resid)))
        if norm > worst_norm:
            worst_norm = norm
            best_lambda = float(np.trace(np.linalg.inv(G)
                                         @ (L.matrix + data.ricci.matrix)) / 3.0)
            worst = (resid, data, p, best_lambda)
    resid, data, p, best_lambda = worst
    verdict = "soliton" if worst_norm <= tol else "not_soliton"
    return SolitonReport(-2.0, SymBilinear(resid, "soliton_residual"),
                         worst_norm, data.r, data.A, verdict,
                         best_lambda=best_lambda, worst_point=p, epsilon=data.epsilon)


def kappa_mu_detect(spec: ParacontactFrameSpec, p: ChartPoint,
                    tol: Optional[float] = None) -> KappaMu:
    """(kappa, mu) of a paracontact spec with harmonic Reeb field.

    kappa = -1 always; mu = -eps*A/a1 away from the degenerate locus a1 = 0,
    where mu is undetermined and reported as absent.  In lie_group mode the
    predicted R(xi, .)xi components are cross-checked against the assembled
    curvature and the residual is reported.
    """
    if tol is None:
        tol = default_tol(spec)
    data = ricci_iht(spec, p, tol=tol)
    a1 = spec.value("a1", p)
    a2 = spec.value("a2", p)
    mu = None if abs(a1) < 1e-12 else -data.epsilon * data.A / a1
    curv_resid = None
    if spec.mode == "lie_group":
        R = curvature_lie_group(spec)
        # R(xi, X) xi = kappa (eta(xi) X - eta(X) xi) + mu (eta(xi) hX - eta(X) h xi)
        h_e = np.array([0.0, a1, a2])
        h_phie = np.array([0.0, -a2, -a1])
        mu_eff = 0.0 if mu is None else mu
        pred_e = -np.array([0.0, 1.0, 0.0]) + mu_eff * h_e
        pred_phie = -np.array([0.0, 0.0, 1.0]) + mu_eff * h_phie
        curv_resid = float(max(np.max(np.abs(R[XI, E, XI] - pred_e)),
                               np.max(np.abs(R[XI, PHIE, XI] - pred_phie))))
    return KappaMu(-1.0, mu, nilpotent_h=abs(a1 * a1 - a2 * a2) <= max(tol, 1e-12),
                   curvature_residual=curv_resid)


# Segre classification ----------------------------------------------------------


def _cubic_eigenvalues(Q: np.ndarray):
    """Closed-form eigenvalues of a real 3x3 matrix via the characteristic
    cubic.  Returns (kind, roots, borderline) with kind in
    {'distinct', 'double', 'triple', 'complex'}; for 'complex' only the real
    root is returned, for 'double' roots come as (double, double, simple)."""
    c2 = float(np.trace(Q))
    c1 = float((c2 * c2 - np.trace(Q @ Q)) / 2.0)
    c0 = float(np.linalg.det(Q))
    # depressed cubic t^3 + p t + q with lam = t + c2/3
    pp = c1 - c2 * c2 / 3.0
    qq = -2.0 * c2 ** 3 / 27.0 + c2 * c1 / 3.0 - c0
    shift = c2 / 3.0
    scale = max(1.0, float(np.max(np.abs(Q))))
    disc = -4.0 * pp ** 3 - 27.0 * qq * qq
    disc_n = disc / scale ** 6
    sep_tol = 1e-6 * scale
    if disc_n > DISC_TOL:
        m = 2.0 * math.sqrt(-pp / 3.0)
        arg = 3.0 * qq / (pp * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg) / 3.0
        roots = sorted(m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift
                       for k in range(3))
        borderline = min(roots[1] - roots[0], roots[2] - roots[1]) < sep_tol
        return "distinct", tuple(roots), borderline
    if disc_n < -DISC_TOL:
        half = math.sqrt(qq * qq / 4.0 + pp ** 3 / 27.0)
        u = np.cbrt(-qq / 2.0 + half)
        v = np.cbrt(-qq / 2.0 - half)
        return "complex", (float(u + v + shift),), False
    # |disc| within tolerance: repeated roots; flag the snap when the
    # discriminant is clearly above machine noise
    borderline = abs(disc_n) > DISC_ZERO
    if abs(pp) / scale ** 2 <= DISC_TOL:
        return "triple", (shift, shift, shift), borderline
    t_double = -1.5 * qq / pp   # double root -3q/(2p)
    t_simple = 3.0 * qq / pp    # simple root 3q/p
    roots = (t_double + shift, t_double + shift, t_simple + shift)
    borderline = borderline or abs(t_double - t_simple) < sep_tol
    return "double", roots, borderline


def _rank(M: np.ndarray, scale: float) -> int:
    # the discriminant window snaps eigenvalue gaps below ~1e-5 * scale to a
    # repeated root; rank decisions use the same resolution so borderline
    # inputs land on the nearest degenerate type
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > 1e-5 * max(1.0, scale)))


def segre_classify(ricci: SymBilinear) -> SegreType:
    """Segre type of the Ricci operator Q = G^-1 rho on the Lorentzian frame.

    Self-adjoint operators in signature (+, +, -) fall into the diagonalizable
    types, a complex-conjugate pair, or the Jordan types {2,1} and {3}; the
    degenerate {(2,1)} type has a triple eigenvalue with rank(Q - lam I) = 1.
    """
    Q = np.linalg.inv(G) @ ricci.matrix
    kind, roots, borderline = _cubic_eigenvalues(Q)
    scale = max(1.0, float(np.max(np.abs(Q))))
    if kind == "complex":
        return SegreType("complex_pair", roots, borderline)
    if kind == "distinct":
        return SegreType("diag_distinct", roots, borderline)
    if kind == "double":
        lam = roots[0]
        rank = _rank(Q - lam * np.eye(3), scale)
        label = "diag_repeated" if rank <= 1 else "segre_21"
        return SegreType(label, roots, borderline)
    lam = roots[0]
    rank = _rank(Q - lam * np.eye(3), scale)
    if rank == 0:
        label = "diag_repeated"
    elif rank == 1:
        label = "segre_degenerate_21"
    else:
        label = "segre_3"
    return SegreType(label, roots, borderline)


def ricci_operator(ricci: SymBilinear) -> np.ndarray:
    return np.linalg.inv(G) @ ricci.matrix


def homogeneous_soliton(a1: float) -> ParacontactFrameSpec:
    """The one-parameter family of homogeneous nontrivial solitons: constants
    a2 = a1, a3 = 1, a4 = a5 = 0 with eps = +1, for any a1 != 0."""
    if a1 == 0.0:
        raise ZeroParameter("a1 = 0 degenerates to the paraSasakian case")
    return ParacontactFrameSpec(a1=float(a1), a2=float(a1), a3=1.0, a4=0.0,
                                a5=0.0, mode="lie_group", epsilon=1)


def bracket_span_rank(spec: ParacontactFrameSpec) -> int:
    """Rank of span{[xi,e], [xi,phie], [e,phie]}; 3 means [g, g] = g."""
    C = bracket_table(spec, ChartPoint(0.0, 0.0, 0.0))
    M = np.array([C[XI, E], C[XI, PHIE], C[E, PHIE]])
    return int(np.linalg.matrix_rank(M, tol=1e-10))
