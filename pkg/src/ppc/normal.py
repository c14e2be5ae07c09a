"""Normal almost paracontact metric three-manifolds.

Normal structures have h = 0, i.e. a1 = a2 = 0 in the frame description, and
are governed by the five functions b1, b2, a3, a4, a5:

    [xi, e]     = -b1 e + (a3 - b2) phi_e
    [xi, phi_e] = (a3 - b2) e - b1 phi_e
    [e, phi_e]  = 2 b2 xi + a4 e - a5 phi_e

Here b1 = (1/2) div xi and b2 = (1/2) tr(phi nabla xi) are globally defined.
The module decides the infinitesimal-harmonic, affine-Killing and soliton
systems for xi, builds the Ricci data, and implements the conformal-Killing
rigidity check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionViolated
from .frame import (G, XI, E, PHIE, NaturalFrameSpec, SymBilinear,
                    connection_table, match_epsilon)
from .jets import ChartPoint

TOL_LIE_GROUP = 1e-12
TOL_CHART = 1e-9


class NormalFrameSpec(NaturalFrameSpec):
    """Natural spec with a1 = a2 = 0 enforced (vanishing h tensor)."""

    def __init__(self, b1, b2, a3, a4, a5, mode="lie_group", bindings=None,
                 realization=None, epsilon=None):
        super().__init__(a1=0.0, a2=0.0, a3=a3, a4=a4, a5=a5, b1=b1, b2=b2,
                         mode=mode, bindings=bindings or {},
                         realization=realization, epsilon=epsilon)


def default_tol(spec) -> float:
    return TOL_LIE_GROUP if spec.mode == "lie_group" else TOL_CHART


def normal_jacobi_residual(spec: NormalFrameSpec, p: ChartPoint) -> np.ndarray:
    """The three scalar sides of the Jacobi identity for normal structures."""
    v = spec.values(p)
    b1, b2, a3, a4, a5 = v["b1"], v["b2"], v["a3"], v["a4"], v["a5"]
    D = spec.deriv
    j1 = D(XI, "b2", p) + 2 * b1 * b2
    j2 = (-D(XI, "a4", p) + (D(E, "a3", p) - D(E, "b2", p)) + D(PHIE, "b1", p)
          - b1 * a4 + a5 * (a3 - b2))
    j3 = (D(XI, "a5", p) - D(E, "b1", p) - (D(PHIE, "a3", p) - D(PHIE, "b2", p))
          + b1 * a5 - a4 * (a3 - b2))
    return np.array([j1, j2, j3])


def normal_iht_residual(spec: NormalFrameSpec, p: ChartPoint) -> float:
    """xi(b1) + 2 b1^2; zero iff xi is an infinitesimal harmonic
    transformation."""
    b1 = spec.value("b1", p)
    return spec.deriv(XI, "b1", p) + 2 * b1 * b1


@dataclass(frozen=True)
class NormalKillingReport:
    verdict: str            # killing | not_affine_killing
    structure_class: str    # quasi_para_sasakian | para_cosymplectic | undecided
    worst_residual: float


def normal_affine_killing(spec: NormalFrameSpec, points: Sequence[ChartPoint],
                          tol: Optional[float] = None) -> NormalKillingReport:
    """Affine-Killing test for xi: residuals xi(b1), xi(b2), xi(b1) + 2 b1^2
    all below tol force b1 = 0, so xi is Killing; the class is then split by
    the sign of b2 over the sample set."""
    if tol is None:
        tol = default_tol(spec)
    worst = 0.0
    b2_vals = []
    for p in points:
        resid = max(abs(spec.deriv(XI, "b1", p)), abs(spec.deriv(XI, "b2", p)),
                    abs(normal_iht_residual(spec, p)))
        worst = max(worst, resid)
        b2_vals.append(spec.value("b2", p))
    if worst > tol:
        return NormalKillingReport("not_affine_killing", "undecided", worst)
    if all(abs(v) <= tol for v in b2_vals):
        cls = "para_cosymplectic"
    elif all(v > tol for v in b2_vals) or all(v < -tol for v in b2_vals):
        cls = "quasi_para_sasakian"
    else:
        cls = "undecided"
    return NormalKillingReport("killing", cls, worst)


@dataclass(frozen=True)
class NormalRicciData:
    A_tilde: float
    B_tilde: float
    ricci: SymBilinear
    r: float


def normal_ricci(spec: NormalFrameSpec, p: ChartPoint) -> NormalRicciData:
    """Ricci tensor of a normal structure.

    A~ = xi(b1) + b1^2 + b2^2 and B~ = phi_e(a4) - e(a5) + a4^2 - a5^2
    - b1^2 + b2^2 + 2 b2 a3; the scalar curvature is recovered from
    B~ = 2 A~ + r/2.  xi need not be a Ricci eigenvector: the off-diagonal
    entries are phi_e(b2) - e(b1) and e(b2) - phi_e(b1).
    """
    v = spec.values(p)
    b1, b2, a3, a4, a5 = v["b1"], v["b2"], v["a3"], v["a4"], v["a5"]
    D = spec.deriv
    A = D(XI, "b1", p) + b1 * b1 + b2 * b2
    B = (D(PHIE, "a4", p) - D(E, "a5", p) + a4 * a4 - a5 * a5
         - b1 * b1 + b2 * b2 + 2 * b2 * a3)
    off_e = D(PHIE, "b2", p) - D(E, "b1", p)
    off_phie = D(E, "b2", p) - D(PHIE, "b1", p)
    rho = np.array([
        [-2 * A, off_e, off_phie],
        [off_e, B - A, 0.0],
        [off_phie, 0.0, -B + A],
    ])
    return NormalRicciData(A, B, SymBilinear(rho, "ricci"), 2 * (B - 2 * A))


def normal_lie_metric(spec: NormalFrameSpec, p: ChartPoint) -> SymBilinear:
    b1 = spec.value("b1", p)
    return SymBilinear(np.diag([0.0, 2 * b1, -2 * b1]), "lie_xi_g")


def conformal_factor(spec: NormalFrameSpec, p: ChartPoint) -> float:
    """(L_xi g)(xi, xi) = 2 G(nabla_xi xi, xi).

    Identically zero for every normal spec, which is why a conformal-Killing
    Reeb field is automatically Killing.
    """
    gamma = connection_table(spec, p).gamma
    return 2.0 * float(gamma[XI, XI] @ G @ np.array([1.0, 0.0, 0.0]))


@dataclass(frozen=True)
class NormalSolitonReport:
    verdict: str            # trivial_unsteady | steady | not_soliton
    lam: float
    k: Optional[float]      # sectional curvature on the unsteady branch
    residuals: dict         # worst residual per named equation
    epsilon: Optional[int]
    worst_point: Optional[ChartPoint]
    detail: str = ""


def normal_soliton_check(spec: NormalFrameSpec, lam: float,
                         points: Sequence[ChartPoint],
                         tol: Optional[float] = None) -> NormalSolitonReport:
    """Decide the soliton equation L_xi g + rho = lam g for a normal spec.

    The system forces lam = 2(b1^2 - b2^2) and lam * b1 = 0.  For lam != 0
    only b1 = 0 survives and the structure must be Einstein with sectional
    curvature k = -b2^2 (trivial unsteady branch).  For lam = 0 the steady
    branch requires b2 = eps b1, xi(b1) = -2 b1^2, r = -4 b1 and
    (e - eps phi_e)(b1) = 0.
    """
    if tol is None:
        tol = default_tol(spec)
    res = {"soliton_xi_xi": 0.0, "soliton_trace": 0.0,
           "soliton_off_e": 0.0, "soliton_off_phie": 0.0,
           "lambda_algebra": 0.0, "lambda_b1": 0.0}

    # The forced algebra rejects without any derivative data; a soliton field
    # is necessarily harmonic, so failing it here is always sound.
    for p in points:
        b1 = spec.value("b1", p)
        b2 = spec.value("b2", p)
        res["lambda_algebra"] = max(res["lambda_algebra"],
                                    abs(lam - 2 * (b1 * b1 - b2 * b2)))
        res["lambda_b1"] = max(res["lambda_b1"], abs(lam * b1))
    if res["lambda_b1"] > tol or res["lambda_algebra"] > tol:
        which = ("lambda*b1 != 0" if res["lambda_b1"] > tol
                 else "lambda != 2(b1^2 - b2^2)")
        return NormalSolitonReport("not_soliton", lam, None, res, None,
                                   points[0], detail=which)

    worst_iht = 0.0
    for p in points:
        worst_iht = max(worst_iht, abs(normal_iht_residual(spec, p)))
    if worst_iht > tol:
        raise PreconditionViolated(
            f"xi is not an infinitesimal harmonic transformation: worst "
            f"residual {worst_iht!r}")
    worst_point = points[0]
    worst_total = -1.0
    b1_max = 0.0
    k_worst = None
    per_point = []
    for p in points:
        v = spec.values(p)
        b1, b2 = v["b1"], v["b2"]
        data = normal_ricci(spec, p)
        vals = {
            "soliton_xi_xi": lam + 2 * data.A_tilde,
            "soliton_trace": 2 * b1 + data.A_tilde + data.r / 2.0 - lam,
            "soliton_off_e": data.ricci(XI, E),
            "soliton_off_phie": data.ricci(XI, PHIE),
            "lambda_algebra": lam - 2 * (b1 * b1 - b2 * b2),
            "lambda_b1": lam * b1,
        }
        per_point.append((p, b1, b2))
        b1_max = max(b1_max, abs(b1))
        total = max(abs(x) for x in vals.values())
        for key, x in vals.items():
            res[key] = max(res[key], abs(x))
        if total > worst_total:
            worst_total, worst_point, k_worst = total, p, -b2 * b2

    if abs(lam) > tol:
        if b1_max > tol:
            return NormalSolitonReport("not_soliton", lam, None, res, None,
                                       worst_point,
                                       detail="lambda*b1 != 0 forces b1 = 0")
        ok = worst_total <= tol
        return NormalSolitonReport("trivial_unsteady" if ok else "not_soliton",
                                   lam, k_worst if ok else None, res, None,
                                   worst_point)

    # steady branch
    try:
        eps = match_epsilon([(b1, b2) for _, b1, b2 in per_point],
                            spec.epsilon, what="b2 = eps*b1")
    except PreconditionViolated as exc:
        return NormalSolitonReport("not_soliton", lam, None, res, None,
                                   worst_point, detail=str(exc))
    res.update({"steady_b2": 0.0, "steady_iht": 0.0, "steady_r": 0.0,
                "steady_transverse": 0.0})
    for p, b1, b2 in per_point:
        data = normal_ricci(spec, p)
        res["steady_b2"] = max(res["steady_b2"], abs(b2 - eps * b1))
        res["steady_iht"] = max(res["steady_iht"],
                                abs(spec.deriv(XI, "b1", p) + 2 * b1 * b1))
        res["steady_r"] = max(res["steady_r"], abs(data.r + 4 * b1))
        res["steady_transverse"] = max(
            res["steady_transverse"],
            abs(spec.deriv(E, "b1", p) - eps * spec.deriv(PHIE, "b1", p)))
    ok = max(res.values()) <= tol
    return NormalSolitonReport("steady" if ok else "not_soliton", lam, None,
                               res, eps, worst_point)


def xi_of_scalar_curvature(spec: NormalFrameSpec, p: ChartPoint) -> float:
    """xi(r) evaluated through second frame derivatives of the structure
    functions (r = 2 B~ - 4 A~)."""
    v = spec.values(p)
    b1, b2, a3, a4, a5 = v["b1"], v["b2"], v["a3"], v["a4"], v["a5"]
    D, DD = spec.deriv, spec.second_deriv
    xi_A = (DD(XI, XI, "b1", p) + 2 * b1 * D(XI, "b1", p)
            + 2 * b2 * D(XI, "b2", p))
    xi_B = (DD(XI, PHIE, "a4", p) - DD(XI, E, "a5", p)
            + 2 * a4 * D(XI, "a4", p) - 2 * a5 * D(XI, "a5", p)
            - 2 * b1 * D(XI, "b1", p) + 2 * b2 * D(XI, "b2", p)
            + 2 * D(XI, "b2", p) * a3 + 2 * b2 * D(XI, "a3", p))
    return 2 * xi_B - 4 * xi_A


@dataclass(frozen=True)
class FlatCorollaryReport:
    verdict: str   # flat | constant_curvature | not_applicable
    k: Optional[float]
    xi_r_max: float


def normal_flat_corollary(spec: NormalFrameSpec, lam: float,
                          points: Sequence[ChartPoint],
                          tol: Optional[float] = None) -> FlatCorollaryReport:
    """Constant-scalar-curvature refinement of the soliton verdicts.

    On the unsteady branch the metric has constant sectional curvature
    k = -b2^2 <= 0.  On the steady branch, xi(r) = 0 at all points forces
    b1 = b2 = 0, i.e. a flat metric; otherwise the refinement does not apply.
    """
    if tol is None:
        tol = default_tol(spec)
    report = normal_soliton_check(spec, lam, points, tol=tol)
    if report.verdict not in ("trivial_unsteady", "steady"):
        raise PreconditionViolated(
            f"soliton verdict is {report.verdict!r}; corollary needs a soliton")
    xi_r = max(abs(xi_of_scalar_curvature(spec, p)) for p in points)
    if report.verdict == "trivial_unsteady":
        return FlatCorollaryReport("constant_curvature", report.k, xi_r)
    if xi_r <= tol:
        flat = all(abs(spec.value("b1", p)) <= tol
                   and abs(spec.value("b2", p)) <= tol for p in points)
        return FlatCorollaryReport("flat" if flat else "not_applicable",
                                   0.0 if flat else None, xi_r)
    return FlatCorollaryReport("not_applicable", None, xi_r)
