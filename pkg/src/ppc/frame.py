"""Frame-level geometry of three-dimensional almost paracontact metric
structures.

Everything here works on the pseudo-orthonormal basis (xi, e, phi e) with the
fixed frame metric G = diag(+1, +1, -1), the third vector being time-like.  A
structure is described by seven scalar functions a1..a5, b1, b2: the Lie
brackets of the frame are

    [xi, e]     = -b1 e + (a3 - b2) phi_e
    [xi, phi_e] = (a3 + 2 a1 - b2) e + (2 a2 - b1) phi_e
    [e, phi_e]  = 2 (b2 - a1) xi + a4 e - a5 phi_e

and the Levi-Civita connection, curvature and Ricci data are closed-form in
the same functions and their frame derivatives.  Paracontact structures are
the special case b2 = a1 - 1, b1 = a2.

Two evaluation modes exist.  In ``lie_group`` mode all structure functions are
constants and every field derivative vanishes.  In ``chart`` mode the spec
carries a coordinate realization of the frame and derivatives are evaluated
with second-order jets.

Curvature sign convention: R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y].  The
Ricci contraction is pinned (see :func:`ricci_from_curvature`) as the unique
sign choice giving rho(xi, xi) = -2 on the standard homogeneous soliton; the
acceptance suite asserts this.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence, Union

import numpy as np

from . import expr
from .errors import (FrameNotInvertible, NotApplicable, PreconditionViolated)
from .expr import ExprAst
from .jets import ChartPoint, Jet2

# Frame metric in the order (xi, e, phi e); the last vector is time-like.
G = np.diag([1.0, 1.0, -1.0])
SIG = np.array([1.0, 1.0, -1.0])

XI, E, PHIE = 0, 1, 2

FIELD_NAMES = ("a1", "a2", "a3", "a4", "a5", "b1", "b2")

Field = Union[float, ExprAst]


def as_field(value) -> Field:
    """Coerce a number, expression string or AST into a structure function."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    ast = expr.as_ast(value)
    if isinstance(ast, expr.Num):
        return ast.value
    return ast


def _field_jet(f: Field, p: ChartPoint, env) -> Jet2:
    if isinstance(f, float):
        return Jet2.constant(f)
    return expr.eval_jet(f, p, env)


def _field_value(f: Field, p: ChartPoint, env) -> float:
    if isinstance(f, float):
        return f
    return expr.eval_jet(f, p, env).value


@dataclass(frozen=True)
class FrameRealization:
    """Coordinate realization of the frame: each vector is a triple of
    coefficient fields with respect to (d/dx, d/dy, d/dz)."""

    xi: tuple
    e: tuple
    phie: tuple

    def __post_init__(self):
        for name in ("xi", "e", "phie"):
            coeffs = tuple(as_field(c) for c in getattr(self, name))
            if len(coeffs) != 3:
                raise ValueError(f"realization vector {name} needs 3 components")
            object.__setattr__(self, name, coeffs)

    def rows(self):
        return (self.xi, self.e, self.phie)

    def value_matrix(self, p: ChartPoint, env) -> np.ndarray:
        """3x3 matrix whose row i holds the coordinate components of E_i."""
        return np.array([[_field_value(c, p, env) for c in row] for row in self.rows()])

    def jet_rows(self, p: ChartPoint, env) -> list:
        return [[_field_jet(c, p, env) for c in row] for row in self.rows()]


@dataclass(frozen=True)
class NaturalFrameSpec:
    """Structure functions of a natural almost paracontact metric
    three-manifold on its phi-basis."""

    a1: Field
    a2: Field
    a3: Field
    a4: Field
    a5: Field
    b1: Field
    b2: Field
    mode: str = "lie_group"
    bindings: dict = dc_field(default_factory=dict)
    realization: Optional[FrameRealization] = None
    epsilon: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ("lie_group", "chart"):
            raise ValueError(f"mode must be lie_group or chart, got {self.mode!r}")
        for name in FIELD_NAMES:
            object.__setattr__(self, name, as_field(getattr(self, name)))
        if self.mode == "lie_group":
            for name in FIELD_NAMES:
                if not isinstance(getattr(self, name), float):
                    raise ValueError(
                        f"lie_group mode requires constant structure functions ({name})")
        else:
            if self.realization is None:
                raise ValueError("chart mode requires a frame realization")
        if self.epsilon not in (None, 1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon!r}")

    # field evaluation -------------------------------------------------------

    def value(self, name: str, p: ChartPoint) -> float:
        return _field_value(getattr(self, name), p, self.bindings)

    def values(self, p: ChartPoint) -> dict:
        return {name: self.value(name, p) for name in FIELD_NAMES}

    def jet(self, name: str, p: ChartPoint) -> Jet2:
        return _field_jet(getattr(self, name), p, self.bindings)

    def frame_matrix(self, p: ChartPoint) -> np.ndarray:
        if self.realization is None:
            raise NotApplicable("no frame realization available")
        return self.realization.value_matrix(p, self.bindings)

    def deriv(self, i: int, name: str, p: ChartPoint) -> float:
        """Frame derivative E_i(field) at p; zero in lie_group mode."""
        if self.mode == "lie_group":
            return 0.0
        row = self.frame_matrix(p)[i]
        return float(row @ self.jet(name, p).grad)

    def second_deriv(self, i: int, j: int, name: str, p: ChartPoint) -> float:
        """E_i(E_j(field)) at p via realization jets; zero in lie_group mode."""
        if self.mode == "lie_group":
            return 0.0
        env = self.bindings
        vi = self.realization.value_matrix(p, env)[i]
        jrow_j = self.realization.jet_rows(p, env)[j]
        fj = self.jet(name, p)
        fh = fj.hess_matrix()
        total = 0.0
        for k in range(3):
            inner = 0.0
            for l in range(3):
                inner += jrow_j[l].grad[k] * fj.grad[l] + jrow_j[l].value * fh[k, l]
            total += vi[k] * inner
        return float(total)


class ParacontactFrameSpec(NaturalFrameSpec):
    """Natural spec with the paracontact constraints b2 = a1 - 1, b1 = a2
    enforced structurally."""

    def __init__(self, a1, a2, a3, a4, a5, mode="lie_group", bindings=None,
                 realization=None, epsilon=None):
        a1 = as_field(a1)
        b2 = a1 - 1.0 if isinstance(a1, float) else expr.sub(a1, expr.num(1))
        super().__init__(a1=a1, a2=as_field(a2), a3=a3, a4=a4, a5=a5,
                         b1=as_field(a2), b2=b2, mode=mode,
                         bindings=bindings or {}, realization=realization,
                         epsilon=epsilon)


# Bilinear data --------------------------------------------------------------


@dataclass(frozen=True)
class SymBilinear:
    """Symmetric bilinear form in frame (or coordinate) indices."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", (m + m.T) / 2.0)

    def __call__(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])


@dataclass(frozen=True)
class FrameConnection:
    """Connection coefficients: nabla_{E_i} E_j = sum_k gamma[i, j, k] E_k."""

    gamma: np.ndarray

    def nabla(self, i: int, j: int) -> np.ndarray:
        return self.gamma[i, j]


@dataclass(frozen=True)
class HTensor:
    matrix: np.ndarray  # action on span(e, phi e), columns are images
    tr_h2: float


@dataclass(frozen=True)
class ClassificationFlags:
    contact_form: bool
    paracontact: bool
    h_zero: bool
    xi_killing: bool
    divergence_free: bool
    tr_phi_nabla_xi: float
    div_xi: float


@dataclass(frozen=True)
class RicciIht:
    ricci: SymBilinear
    A: float
    B: float
    r: float
    epsilon: int


# Tables ----------------------------------------------------------------------


def bracket_table(spec: NaturalFrameSpec, p: ChartPoint) -> np.ndarray:
    """Coefficients C[i, j, k] of [E_i, E_j] = sum_k C[i, j, k] E_k."""
    v = spec.values(p)
    a1, a2, a3, a4, a5, b1, b2 = (v[n] for n in FIELD_NAMES)
    C = np.zeros((3, 3, 3))
    C[XI, E] = [0.0, -b1, a3 - b2]
    C[XI, PHIE] = [0.0, a3 + 2 * a1 - b2, 2 * a2 - b1]
    C[E, PHIE] = [2 * (b2 - a1), a4, -a5]
    for i in range(3):
        for j in range(i):
            C[i, j] = -C[j, i]
    return C


def connection_table(spec: NaturalFrameSpec, p: ChartPoint) -> FrameConnection:
    """Levi-Civita connection coefficients on the frame."""
    v = spec.values(p)
    a1, a2, a3, a4, a5, b1, b2 = (v[n] for n in FIELD_NAMES)
    gamma = np.zeros((3, 3, 3))
    gamma[XI, XI] = [0.0, 0.0, 0.0]
    gamma[E, XI] = [0.0, b1, b2]
    gamma[PHIE, XI] = [0.0, b2 - 2 * a1, b1 - 2 * a2]
    gamma[XI, E] = [0.0, 0.0, a3]
    gamma[XI, PHIE] = [0.0, a3, 0.0]
    gamma[E, E] = [-b1, 0.0, a4]
    gamma[PHIE, PHIE] = [b1 - 2 * a2, a5, 0.0]
    gamma[E, PHIE] = [b2, a4, 0.0]
    gamma[PHIE, E] = [2 * a1 - b2, 0.0, a5]
    return FrameConnection(gamma)


def jacobi_residual(spec: NaturalFrameSpec, p: ChartPoint) -> np.ndarray:
    """The three scalar sides of the Jacobi identity for the bracket table.

    For a paracontact spec the first entry is identically zero and the other
    two reduce to the paracontact Jacobi system.
    """
    v = spec.values(p)
    a1, a2, a3, a4, a5, b1, b2 = (v[n] for n in FIELD_NAMES)
    D = spec.deriv
    j1 = (D(XI, "b2", p) - D(XI, "a1", p)) - 2 * (a2 - b1) * (b2 - a1)
    j2 = (D(XI, "a4", p)
          - (D(E, "a3", p) + 2 * D(E, "a1", p) - D(E, "b2", p))
          - D(PHIE, "b1", p)
          - a4 * (2 * a2 - b1) - a5 * (a3 + 2 * a1 - b2))
    j3 = (D(XI, "a5", p)
          + (2 * D(E, "a2", p) - D(E, "b1", p))
          + (D(PHIE, "b2", p) - D(PHIE, "a3", p))
          + a4 * (b2 - a3) + a5 * b1)
    return np.array([j1, j2, j3])


def h_tensor(spec: NaturalFrameSpec, p: ChartPoint) -> HTensor:
    """h = (1/2) L_xi phi restricted to span(e, phi e); h xi = 0."""
    a1 = spec.value("a1", p)
    a2 = spec.value("a2", p)
    return HTensor(np.array([[a1, -a2], [a2, -a1]]), 2 * (a1 * a1 - a2 * a2))


def lie_metric(spec: NaturalFrameSpec, p: ChartPoint) -> SymBilinear:
    """Lie derivative of the metric along xi on the frame."""
    a1 = spec.value("a1", p)
    a2 = spec.value("a2", p)
    b1 = spec.value("b1", p)
    m = np.array([
        [0.0, 0.0, 0.0],
        [0.0, 2 * b1, -2 * a1],
        [0.0, -2 * a1, 2 * (2 * a2 - b1)],
    ])
    return SymBilinear(m, "lie_xi_g")


def classification_flags(spec: NaturalFrameSpec, p: ChartPoint,
                         tol: float = 1e-12) -> ClassificationFlags:
    v = spec.values(p)
    a1, a2, b1, b2 = v["a1"], v["a2"], v["b1"], v["b2"]
    h_zero = abs(a1) <= tol and abs(a2) <= tol
    return ClassificationFlags(
        contact_form=abs(a1 - b2) > tol,
        paracontact=abs(a1 - b2 - 1.0) <= tol,
        h_zero=h_zero,
        xi_killing=h_zero and abs(b1) <= tol,
        divergence_free=abs(a2 - b1) <= tol,
        tr_phi_nabla_xi=2 * (b2 - a1),
        div_xi=2 * (b1 - a2),
    )


# Epsilon handling -------------------------------------------------------------

EPS_REL_TOL = 1e-10


def match_epsilon(pairs: Sequence[tuple], declared: Optional[int],
                  rel_tol: float = EPS_REL_TOL, what: str = "a2 = eps*a1") -> int:
    """Infer the sign eps relating the (base, mate) pairs, requiring it to be
    sample-constant and |mate - eps*base| <= rel_tol * scale at every pair."""
    eps = declared
    for base, mate in pairs:
        if abs(base) >= 1e-12:
            sign = 1 if (mate / base) >= 0 else -1
            if eps is None:
                eps = sign
            elif sign != eps:
                raise PreconditionViolated(
                    f"sign in {what} is not constant over the sample set")
    if eps is None:
        eps = 1  # degenerate locus: both sides vanish, sign immaterial
    for base, mate in pairs:
        resid = abs(mate - eps * base)
        if resid > rel_tol * max(1.0, abs(base), abs(mate)):
            raise PreconditionViolated(
                f"{what} fails: residual {resid!r} exceeds {rel_tol!r}")
    return eps


def infer_epsilon(spec: NaturalFrameSpec, points: Sequence[ChartPoint],
                  rel_tol: float = EPS_REL_TOL) -> int:
    pairs = [(spec.value("a1", p), spec.value("a2", p)) for p in points]
    return match_epsilon(pairs, spec.epsilon, rel_tol)


# Harmonicity, rigidity and Ricci data ------------------------------------------


def iht_system_residual(spec: ParacontactFrameSpec, p: ChartPoint,
                        eps: int) -> np.ndarray:
    """Residuals of the three equations characterizing xi as an infinitesimal
    harmonic transformation (given a2 = eps*a1)."""
    v = spec.values(p)
    a1, a3, a4, a5 = v["a1"], v["a3"], v["a4"], v["a5"]
    D = spec.deriv
    r1 = D(XI, "a4", p) - D(E, "a3", p) + eps * a1 * a4 - a5 * (a3 - a1 + 1)
    r2 = D(XI, "a5", p) - D(PHIE, "a3", p) - eps * a1 * a5 - a4 * (a3 + a1 + 1)
    r3 = (D(E, "a1", p) + eps * D(PHIE, "a1", p)) + 2 * eps * a1 * a4 + 2 * a1 * a5
    return np.array([r1, r2, r3])


def harmonic_residual(spec: ParacontactFrameSpec, p: ChartPoint) -> np.ndarray:
    """Frame components of tr(L_xi nabla) for a paracontact spec.

    The xi component is 4(a1^2 - a2^2) = 2 tr h^2; the e and phi_e components
    are the displayed trace formula with the Jacobi system substituted in, so
    no xi-derivatives of a4, a5 are needed.
    """
    v = spec.values(p)
    a1, a2, a4, a5 = v["a1"], v["a2"], v["a4"], v["a5"]
    D = spec.deriv
    comp_xi = 4 * (a1 * a1 - a2 * a2)
    comp_e = 2 * D(E, "a2", p) + 2 * D(PHIE, "a1", p) + 4 * a1 * a4 + 4 * a2 * a5
    comp_phie = 2 * D(E, "a1", p) + 2 * D(PHIE, "a2", p) + 4 * a2 * a4 + 4 * a1 * a5
    return np.array([comp_xi, comp_e, comp_phie])


def affine_killing_residual(spec: ParacontactFrameSpec, p: ChartPoint) -> np.ndarray:
    """Residuals of the affine-Killing system for xi; vanishing everywhere
    forces a1 = a2 = 0 (xi Killing)."""
    v = spec.values(p)
    a1, a2, a3 = v["a1"], v["a2"], v["a3"]
    xi_a2 = spec.deriv(XI, "a2", p)
    return np.array([
        xi_a2 + 2 * a1 * a3,
        xi_a2 + 2 * a2 * a2 + 2 * a1 * (a3 - a1 + 1),
        xi_a2 - 2 * a2 * a2 + 2 * a1 * (a3 + a1 + 1),
    ])


def ricci_iht(spec: ParacontactFrameSpec, p: ChartPoint,
              tol: float = 1e-9) -> RicciIht:
    """Ricci tensor of a paracontact spec whose Reeb field is an infinitesimal
    harmonic transformation.

    Precondition: a2 = eps*a1 at p and the harmonicity system residuals are
    below tol; violated preconditions raise with the offending residual.
    """
    a1 = spec.value("a1", p)
    a2 = spec.value("a2", p)
    eps = spec.epsilon
    if eps is None:
        eps = match_epsilon([(a1, a2)], None)
    else:
        match_epsilon([(a1, a2)], eps)
    resid = iht_system_residual(spec, p, eps)
    worst = float(np.max(np.abs(resid)))
    if worst > tol:
        raise PreconditionViolated(
            f"xi is not an infinitesimal harmonic transformation at "
            f"({p.x!r}, {p.y!r}, {p.z!r}): residual {worst!r}")
    a3 = spec.value("a3", p)
    a4 = spec.value("a4", p)
    a5 = spec.value("a5", p)
    A = spec.deriv(XI, "a1", p) + 2 * eps * a1 * a3
    B = (spec.deriv(E, "a5", p) - spec.deriv(PHIE, "a4", p)
         + 2 * a3 - a4 * a4 + a5 * a5)
    r = -2.0 - 2.0 * B
    rho = np.array([
        [-2.0, 0.0, 0.0],
        [0.0, -B - eps * A, A],
        [0.0, A, B - eps * A],
    ])
    return RicciIht(SymBilinear(rho, "ricci"), A, B, r, eps)


# Curvature ---------------------------------------------------------------------


def curvature_lie_group(spec: NaturalFrameSpec) -> np.ndarray:
    """Full curvature R[i, j, k, l]: the E_l component of R(E_i, E_j) E_k,
    assembled from the constant bracket and connection tables under the sign
    convention R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y]."""
    if spec.mode != "lie_group":
        raise NotApplicable("full curvature assembly needs constant structure "
                            "functions; use the chart oracle instead")
    origin = ChartPoint(0.0, 0.0, 0.0)
    C = bracket_table(spec, origin)
    gamma = connection_table(spec, origin).gamma
    R = (np.einsum("ijm,mkl->ijkl", C, gamma)
         - np.einsum("jkm,iml->ijkl", gamma, gamma)
         + np.einsum("ikm,jml->ijkl", gamma, gamma))
    return R


def curvature_covariant(R: np.ndarray) -> np.ndarray:
    """(0,4) curvature R(E_i, E_j, E_k, E_v) = G(R(E_i, E_j) E_k, E_v)."""
    return np.einsum("ijkl,lv->ijkv", R, G)


def ricci_from_curvature(R: np.ndarray) -> SymBilinear:
    """Ricci tensor from the full curvature.

    Pinned contraction: rho(X, Y) = -sum_a eps_a G(R(E_a, X) Y, E_a), the sign
    choice that yields rho(xi, xi) = -2 on the homogeneous soliton family.
    """
    rho = -np.einsum("axya->xy", R)
    return SymBilinear(rho, "ricci")


def scalar_curvature(rho: SymBilinear) -> float:
    return float(np.trace(np.linalg.inv(G) @ rho.matrix))


def reconstruct_curvature(rho: SymBilinear, r: float,
                          X, Y, Z, V) -> float:
    """(0,4) curvature value in dimension three from Ricci and scalar
    curvature; arguments are frame-component vectors."""
    X, Y, Z, V = (np.asarray(u, dtype=float) for u in (X, Y, Z, V))
    g = lambda u, w: float(u @ G @ w)
    q = lambda u, w: float(u @ rho.matrix @ w)
    return (g(X, Z) * q(Y, V) - g(Y, Z) * q(X, V)
            + g(Y, V) * q(X, Z) - g(X, V) * q(Y, Z)
            - (r / 2.0) * (g(X, Z) * g(Y, V) - g(Y, Z) * g(X, V)))


# Chart-mode consistency -----------------------------------------------------------


def realized_bracket_coeffs(values: np.ndarray, jets: list) -> np.ndarray:
    """Frame coefficients of the coordinate Lie brackets of a realized frame.

    ``values`` has the frame vectors as rows, ``jets`` the per-coefficient
    jets.  Returns C[i, j, k] with [V_i, V_j] = sum_k C[i, j, k] V_k; raises
    when the vectors are linearly dependent.
    """
    if abs(np.linalg.det(values)) < 1e-12:
        raise FrameNotInvertible("realized frame vectors are linearly dependent")
    C = np.zeros((3, 3, 3))
    basis = values.T  # columns are the frame vectors
    for i in range(3):
        for j in range(i + 1, 3):
            vec = np.array([
                sum(values[i, l] * jets[j][k].grad[l]
                    - values[j, l] * jets[i][k].grad[l] for l in range(3))
                for k in range(3)
            ])
            coeffs = np.linalg.solve(basis, vec)
            C[i, j] = coeffs
            C[j, i] = -coeffs
    return C


def realization_consistency(spec: NaturalFrameSpec, p: ChartPoint) -> float:
    """Max-abs mismatch between the coordinate Lie brackets of the realized
    frame and the bracket table of the structure functions."""
    if spec.mode != "chart":
        raise NotApplicable("realization consistency is a chart-mode check")
    env = spec.bindings
    values = spec.realization.value_matrix(p, env)
    jets = spec.realization.jet_rows(p, env)
    realized = realized_bracket_coeffs(values, jets)
    declared = bracket_table(spec, p)
    return float(np.max(np.abs(realized - declared)))
