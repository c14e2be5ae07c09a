import random

import numpy as np
import pytest

from ppc.errors import PreconditionViolated
from ppc.frame import (G, XI, E, PHIE, FrameRealization, bracket_table,
                       connection_table, lie_metric, realization_consistency)
from ppc.normal import (NormalFrameSpec, conformal_factor,
                        normal_affine_killing, normal_flat_corollary,
                        normal_iht_residual, normal_jacobi_residual,
                        normal_lie_metric, normal_ricci, normal_soliton_check,
                        xi_of_scalar_curvature)
from ppc.jets import ChartPoint
from ppc.sampling import sample_points

P0 = ChartPoint(0.0, 0.0, 0.0)
BOX = ((-1.0, 1.0),) * 3
PTS = sample_points(BOX, 12, seed=8)

# Steady soliton realization: b1 = b2 = 1/(z+3), a3 = -1, a4 = a5 = 0 with
#   e = w/2 + v/2, phi_e = w/2 - v/2,
#   w = (e^{-z/2}/(z+3)) (d/dx + 2 y^2 d/dy + 8 y d/dz), v = e^{z/2} d/dy.
STEADY = NormalFrameSpec(
    b1="1/(z+3)", b2="1/(z+3)", a3=-1.0, a4=0.0, a5=0.0, mode="chart",
    realization=FrameRealization(
        xi=(0.0, 0.0, 2.0),
        e=("exp(-z/2)/(2*(z+3))", "y^2*exp(-z/2)/(z+3) + exp(z/2)/2",
           "4*y*exp(-z/2)/(z+3)"),
        phie=("exp(-z/2)/(2*(z+3))", "y^2*exp(-z/2)/(z+3) - exp(z/2)/2",
              "4*y*exp(-z/2)/(z+3)")))


def make_realized(b1, b2, a3, a4, a5, realization):
    return NormalFrameSpec(b1=b1, b2=b2, a3=a3, a4=a4, a5=a5, mode="chart",
                           realization=realization)


def test_normal_jacobi_trivial_cases():
    spec = NormalFrameSpec(b1=0.0, b2=4.0, a3=0.0, a4=0.0, a5=0.0)
    assert np.all(normal_jacobi_residual(spec, P0) == 0.0)
    spec = NormalFrameSpec(b1=0.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    assert np.all(normal_jacobi_residual(spec, P0) == 0.0)


def test_normal_jacobi_first_equation_violation():
    # b2 = e^{-z}, b1 = 1/2 along xi = 2 d/dz: xi(b2) + 2 b1 b2 = -e^{-z}
    spec = make_realized(0.5, "exp(-z)", 0.0, 0.0, 0.0,
                         FrameRealization(xi=(0, 0, 2), e=(1, 0, 0),
                                          phie=(0, 1, 0)))
    for z in (0.0, 0.5, -0.7):
        p = ChartPoint(0.0, 0.0, z)
        res = normal_jacobi_residual(spec, p)
        assert abs(res[0] - (-np.exp(-z))) <= 1e-12


def test_normal_iht_examples():
    # b1 = 1/(z+3) solves xi(b1) = -2 b1^2
    for p in PTS:
        assert abs(normal_iht_residual(STEADY, p)) <= 1e-12
    spec = NormalFrameSpec(b1=0.0, b2=1.0, a3=0.0, a4=0.0, a5=0.0)
    assert normal_iht_residual(spec, P0) == 0.0
    spec = NormalFrameSpec(b1=1.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    assert normal_iht_residual(spec, P0) == 2.0


def test_steady_realization_is_consistent():
    for p in PTS:
        assert realization_consistency(STEADY, p) <= 1e-12
        assert np.max(np.abs(normal_jacobi_residual(STEADY, p))) <= 1e-12


def test_normal_affine_killing_verdicts():
    quasi = NormalFrameSpec(b1=0.0, b2=3.0, a3=0.0, a4=0.0, a5=0.0)
    rep = normal_affine_killing(quasi, [P0])
    assert rep.verdict == "killing"
    assert rep.structure_class == "quasi_para_sasakian"

    cosym = NormalFrameSpec(b1=0.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    rep = normal_affine_killing(cosym, [P0])
    assert rep.verdict == "killing"
    assert rep.structure_class == "para_cosymplectic"

    not_ak = NormalFrameSpec(b1=1.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    rep = normal_affine_killing(not_ak, [P0])
    assert rep.verdict == "not_affine_killing"
    assert rep.worst_residual == 2.0


def test_normal_affine_killing_mixed_sign_b2_undecided():
    # b1 = 0 with b2 = y changes sign across the box: Killing, class undecided
    spec = make_realized(
        0.0, "y", "y", 0.0, 0.0,
        FrameRealization(xi=(0, 0, 2), e=(0.5, 0.5, "2*y^2"),
                         phie=(0.5, -0.5, "2*y^2")))
    pts = [ChartPoint(0.0, -0.6, 0.0), ChartPoint(0.0, 0.7, 0.0)]
    for p in pts:
        assert realization_consistency(spec, p) <= 1e-12
    rep = normal_affine_killing(spec, pts)
    assert rep.verdict == "killing"
    assert rep.structure_class == "undecided"


def test_normal_ricci_einstein_case():
    # b1 = 0, b2 = c with a3 = -c is Einstein: rho = -2 c^2 G, k = -c^2
    c = 1.5
    spec = NormalFrameSpec(b1=0.0, b2=c, a3=-c, a4=0.0, a5=0.0)
    data = normal_ricci(spec, P0)
    assert data.A_tilde == c * c
    assert np.allclose(data.ricci.matrix, -2 * c * c * G, atol=1e-12)
    assert abs(data.r + 6 * c * c) <= 1e-12
    assert abs(data.B_tilde - (2 * data.A_tilde + data.r / 2.0)) <= 1e-12


def test_normal_ricci_all_zero_flat():
    spec = NormalFrameSpec(b1=0.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    data = normal_ricci(spec, P0)
    assert np.all(data.ricci.matrix == 0.0)
    assert data.r == 0.0


def test_normal_ricci_reduced_form_agrees():
    rng = random.Random(30)
    for _ in range(8):
        spec = NormalFrameSpec(*(round(rng.uniform(-2, 2), 3) for _ in range(5)))
        data = normal_ricci(spec, P0)
        # rho(e,e) = A~ + r/2 and rho(phie,phie) = -A~ - r/2
        assert abs(data.ricci(E, E) - (data.A_tilde + data.r / 2.0)) <= 1e-12
        assert abs(data.ricci(PHIE, PHIE) + (data.A_tilde + data.r / 2.0)) <= 1e-12
        assert abs(data.ricci(XI, XI) + 2 * data.A_tilde) <= 1e-12


def test_normal_ricci_xi_not_an_eigenvector():
    # b2 varying along ker(eta) makes rho(xi, e) nonzero
    spec = make_realized(
        0.0, "1 + y/4", "1 + y/4", 0.0, 0.0,
        FrameRealization(xi=(0, 0, 2),
                         e=(0.5, 0.5, expr_8y := "(8*y + y^2)/2"),
                         phie=(0.5, -0.5, expr_8y)))
    p = ChartPoint(0.2, 0.3, -0.1)
    assert realization_consistency(spec, p) <= 1e-12
    data = normal_ricci(spec, p)
    assert abs(data.ricci(XI, E) + 1.0 / 8.0) <= 1e-12
    assert abs(data.ricci(XI, E)) > 1e-3


def test_normal_connection_invariants():
    rng = random.Random(31)
    for _ in range(6):
        spec = NormalFrameSpec(*(round(rng.uniform(-2, 2), 3) for _ in range(5)))
        gamma = connection_table(spec, P0).gamma
        C = bracket_table(spec, P0)
        assert np.max(np.abs(gamma - np.transpose(gamma, (1, 0, 2)) - C)) <= 1e-12
        for i in range(3):
            S = gamma[i] @ G
            assert np.max(np.abs(S + S.T)) <= 1e-12
        m = lie_metric(spec, P0).matrix
        b1 = spec.value("b1", P0)
        assert np.array_equal(m, np.diag([0.0, 2 * b1, -2 * b1]))
        assert np.array_equal(normal_lie_metric(spec, P0).matrix, m)


def test_unsteady_soliton_einstein():
    c = 1.0
    spec = NormalFrameSpec(b1=0.0, b2=c, a3=-c, a4=0.0, a5=0.0)
    rep = normal_soliton_check(spec, -2 * c * c, [P0])
    assert rep.verdict == "trivial_unsteady"
    assert abs(rep.k + c * c) <= 1e-12
    # Einstein form: L_xi g = 0 and rho = 2 k G
    assert np.all(lie_metric(spec, P0).matrix == 0.0)
    data = normal_ricci(spec, P0)
    assert np.max(np.abs(data.ricci.matrix - 2 * rep.k * G)) <= 1e-10


def test_unsteady_rejects_nonzero_b1():
    spec = NormalFrameSpec(b1=0.3, b2=1.0, a3=-1.0, a4=0.0, a5=0.0)
    rep = normal_soliton_check(spec, 2 * (0.09 - 1.0), [P0])
    assert rep.verdict == "not_soliton"


def test_steady_soliton_accepts_constructed_field():
    rep = normal_soliton_check(STEADY, 0.0, PTS)
    assert rep.verdict == "steady"
    assert rep.epsilon == 1
    assert max(rep.residuals.values()) <= 1e-10
    for p in PTS[:4]:
        data = normal_ricci(STEADY, p)
        b1 = STEADY.value("b1", p)
        assert abs(data.r + 4 * b1) <= 1e-9


def test_soliton_rejects_via_lambda_b1():
    spec = NormalFrameSpec(b1=1.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    rep = normal_soliton_check(spec, 2.0, [P0])
    assert rep.verdict == "not_soliton"
    assert rep.residuals["lambda_b1"] == 2.0


def test_soliton_precondition_raises_without_iht():
    spec = NormalFrameSpec(b1=1.0, b2=1.0, a3=0.0, a4=0.0, a5=0.0)
    with pytest.raises(PreconditionViolated):
        normal_soliton_check(spec, 0.0, [P0])


def test_conformal_factor_identically_zero():
    rng = random.Random(32)
    for _ in range(20):
        spec = NormalFrameSpec(*(rng.uniform(-3, 3) for _ in range(5)))
        assert conformal_factor(spec, P0) == 0.0
    # b1 = 5: the (xi, xi) slot is still exactly zero although xi is far from
    # Killing ((L_xi g)(e, e) = 10)
    spec = NormalFrameSpec(b1=5.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    assert conformal_factor(spec, P0) == 0.0
    assert lie_metric(spec, P0)(E, E) == 10.0
    killing = NormalFrameSpec(b1=0.0, b2=2.0, a3=0.0, a4=0.0, a5=0.0)
    assert np.all(lie_metric(killing, P0).matrix == 0.0)


def test_xi_of_scalar_curvature_steady_family():
    # r = -4 b1 forces xi(r) = -4 xi(b1) = 8 b1^2
    for p in PTS[:6]:
        b1 = STEADY.value("b1", p)
        assert abs(xi_of_scalar_curvature(STEADY, p) - 8 * b1 * b1) <= 1e-9


def test_flat_corollary_verdicts():
    # steady family: xi(r) != 0, corollary not applicable
    rep = normal_flat_corollary(STEADY, 0.0, PTS[:6])
    assert rep.verdict == "not_applicable"

    # flat case
    spec = NormalFrameSpec(b1=0.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    rep = normal_flat_corollary(spec, 0.0, [P0])
    assert rep.verdict == "flat"
    assert rep.k == 0.0

    # constant negative curvature
    spec = NormalFrameSpec(b1=0.0, b2=2.0, a3=-2.0, a4=0.0, a5=0.0)
    rep = normal_flat_corollary(spec, -8.0, [P0])
    assert rep.verdict == "constant_curvature"
    assert abs(rep.k + 4.0) <= 1e-12


def test_flat_corollary_needs_soliton():
    spec = NormalFrameSpec(b1=1.0, b2=0.0, a3=0.0, a4=0.0, a5=0.0)
    with pytest.raises(PreconditionViolated):
        normal_flat_corollary(spec, 2.0, [P0])


def test_homogeneous_nontrivial_normal_soliton_is_unreachable():
    # lie_group mode with b1 != 0 has IHT residual 2 b1^2 > 0
    for b1 in (0.5, -1.0, 2.0):
        spec = NormalFrameSpec(b1=b1, b2=b1, a3=-1.0, a4=0.0, a5=0.0)
        assert normal_iht_residual(spec, P0) == 2 * b1 * b1
        with pytest.raises(PreconditionViolated):
            normal_soliton_check(spec, 0.0, [P0])
