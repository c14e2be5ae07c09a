"""Command-line interface and check orchestration.

Commands::

    ppc check <file>              structural validity (Jacobi, realization,
                                  connection invariants, axioms, flags)
    ppc soliton <file>            Ricci-soliton system and its verdicts
    ppc crossval <file>           frame Ricci vs. coordinate-chart oracle
    ppc probe-homogeneity <file>  frame-gauge homogeneity probe
    ppc report <file>             everything applicable to the variant

Options: --tol T (override residual tolerances), --points N, --seed S,
--format text|json, --skip-singular.  Exit codes: 0 all checks pass, 1 at
least one residual exceeds tolerance, 2 input/schema error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

import numpy as np

from .errors import (DivisionAtSingularPoint, DomainError, FrameNotInvertible,
                     PpcError, PreconditionViolated, SchemaError,
                     SingularMetric, VariantMismatch)
from .frame import (G, NaturalFrameSpec, ParacontactFrameSpec, bracket_table,
                    classification_flags, connection_table, h_tensor,
                    harmonic_residual, jacobi_residual, ricci_iht,
                    realization_consistency)
from .invariants import (default_tol, kappa_mu_detect, ricci_operator,
                         segre_classify, soliton_check)
from .darboux import (axioms_check, chart_christoffel, chart_ricci,
                      frame_ricci_in_coordinates, h_matrices,
                      homogeneity_probe)
from .normal import (NormalFrameSpec, conformal_factor, normal_affine_killing,
                     normal_flat_corollary, normal_iht_residual,
                     normal_jacobi_residual, normal_soliton_check)
from .report import all_passed, check_record, make_report, to_json, to_text
from .specfile import SpecFile, build_darboux_structure, build_frame_spec, load_spec

_SINGULAR = (SingularMetric, DivisionAtSingularPoint, DomainError,
             FrameNotInvertible)

ORACLE_TOL = 1e-8       # frame-vs-chart Ricci agreement
AXIOM_TOL = 1e-10
CONSTRAINT_TOL = 1e-10
TABLE_TOL = 1e-12       # torsion / metric compatibility on exact tables


class _PointScan:
    """Worst-residual scan over sample points."""

    def __init__(self, points):
        self.points = points

    def worst(self, fn):
        worst = -1.0
        worst_p = None
        for p in self.points:
            try:
                value = float(fn(p))
            except _SINGULAR as exc:
                raise type(exc)(f"{exc} [at point ({p.x!r}, {p.y!r}, {p.z!r}); "
                                f"rerun with --skip-singular to drop it]") from None
            if value > worst:
                worst, worst_p = value, p
        if worst_p is None:
            return None, None
        return worst, worst_p


def _filter_singular(points, probes, skip_singular: bool):
    """With --skip-singular, drop points where any probe raises; otherwise
    keep every point (failures surface later with their location)."""
    if not skip_singular:
        return list(points), 0
    usable = []
    for p in points:
        try:
            for probe in probes:
                probe(p)
        except _SINGULAR:
            continue
        usable.append(p)
    if not usable:
        raise PpcError("every sample point hit a singular locus; shrink the "
                       "box or declare exclusions")
    return usable, len(points) - len(usable)


def _frame_probe(spec):
    def probe(p):
        spec.values(p)
        if spec.mode == "chart":
            V = spec.frame_matrix(p)
            if abs(np.linalg.det(V)) < 1e-12:
                raise FrameNotInvertible("degenerate frame")
            spec.realization.jet_rows(p, spec.bindings)
    return probe


def _darboux_probe(D):
    def probe(p):
        D.constraint_residual(p)
        if abs(np.linalg.det(D.metric_matrix(p))) < 1e-12:
            raise SingularMetric("degenerate metric")
    return probe


def _residual_check(name, scan, fn, tol):
    worst, worst_p = scan.worst(fn)
    if worst is None:
        return check_record(name, False, tolerance=tol,
                            detail="no usable sample points")
    if not math.isfinite(worst):
        # keep reports strict-JSON clean: no Infinity/NaN literals
        return check_record(name, False, tolerance=tol, worst_point=worst_p,
                            detail="non-finite residual")
    return check_record(name, worst <= tol, tolerance=tol,
                        worst_residual=worst, worst_point=worst_p)


def _frame_checks(spec: NaturalFrameSpec, scan: _PointScan, tol: float):
    checks = []
    if isinstance(spec, NormalFrameSpec):
        jac = lambda p: float(np.max(np.abs(normal_jacobi_residual(spec, p))))
    else:
        jac = lambda p: float(np.max(np.abs(jacobi_residual(spec, p))))
    checks.append(_residual_check("jacobi_identity", scan, jac, tol))

    def torsion(p):
        C = bracket_table(spec, p)
        g = connection_table(spec, p).gamma
        return float(np.max(np.abs(g - np.transpose(g, (1, 0, 2)) - C)))

    def compat(p):
        g = connection_table(spec, p).gamma
        worst = 0.0
        for i in range(3):
            S = g[i] @ G
            worst = max(worst, float(np.max(np.abs(S + S.T))))
        return worst

    checks.append(_residual_check("torsion_free", scan, torsion, TABLE_TOL))
    checks.append(_residual_check("metric_compatibility", scan, compat, TABLE_TOL))
    if spec.mode == "chart":
        checks.append(_residual_check(
            "realization_consistency", scan,
            lambda p: realization_consistency(spec, p), tol))
    return checks


def _frame_summary(spec: NaturalFrameSpec, scan: _PointScan) -> dict:
    p0 = scan.points[0]
    flags = classification_flags(spec, p0)
    summary = {
        "flags": {
            "contact_form": flags.contact_form,
            "paracontact": flags.paracontact,
            "h_zero": flags.h_zero,
            "xi_killing": flags.xi_killing,
            "divergence_free": flags.divergence_free,
        },
        "tr_phi_nabla_xi": flags.tr_phi_nabla_xi,
        "div_xi": flags.div_xi,
        "tr_h_squared": h_tensor(spec, p0).tr_h2,
    }
    if isinstance(spec, ParacontactFrameSpec):
        worst, _ = scan.worst(
            lambda p: float(np.max(np.abs(harmonic_residual(spec, p)))))
        summary["harmonic_residual"] = worst
    return summary


def _soliton_checks(spec, scan: _PointScan, tol: float):
    checks = []
    summary = {}
    rep = soliton_check(spec, scan.points, tol=tol)
    checks.append(check_record(
        "ricci_soliton", rep.verdict == "soliton", tolerance=tol,
        worst_residual=(None if rep.residual_norm == float("inf")
                        else rep.residual_norm),
        worst_point=rep.worst_point, verdict=rep.verdict, detail=rep.detail))
    summary["soliton"] = {
        "verdict": rep.verdict, "lambda": rep.lam,
        "best_lambda": rep.best_lambda, "scalar_curvature": rep.scalar_curvature,
        "A_value": rep.A_value, "epsilon": rep.epsilon,
        "residual_matrix": rep.residual_matrix.matrix,
    }
    if rep.verdict == "precondition_failed":
        return checks, summary

    mus = []
    absent = 0
    for p in scan.points:
        km = kappa_mu_detect(spec, p, tol=tol)
        if km.mu is None:
            absent += 1
        else:
            mus.append(km.mu)
    summary["kappa_mu"] = {
        "kappa": -1.0,
        "mu_min": min(mus) if mus else None,
        "mu_max": max(mus) if mus else None,
        "mu_undetermined_points": absent,
    }
    data = ricci_iht(spec, scan.points[0], tol=tol)
    seg = segre_classify(data.ricci)
    q = ricci_operator(data.ricci)
    summary["segre"] = {"label": seg.label,
                        "eigenvalues": list(seg.eigenvalues),
                        "borderline": seg.borderline}
    checks.append(check_record(
        "ricci_operator_reeb_eigenvector", True,
        worst_residual=float(np.max(np.abs(q @ np.array([1.0, 0.0, 0.0])
                                           - (-2.0) * np.array([1.0, 0.0, 0.0]))))))
    return checks, summary


def _darboux_checks(D, scan: _PointScan, tol_axioms: float):
    metric = D.metric_field()

    def oracle_selfcheck(p):
        gamma = chart_christoffel(metric, p)
        asym = float(np.max(np.abs(gamma - np.transpose(gamma, (0, 2, 1)))))
        if not np.all(np.isfinite(gamma)):
            raise SingularMetric("non-finite Christoffel symbols")
        return asym

    checks = [
        _residual_check("darboux_constraint", scan,
                        lambda p: abs(D.constraint_residual(p)), CONSTRAINT_TOL),
        _residual_check("paracontact_axioms", scan,
                        lambda p: max(axioms_check(D, p).values()), tol_axioms),
        _residual_check("chart_oracle_selfcheck", scan, oracle_selfcheck,
                        TABLE_TOL),
    ]
    para, nil = True, True
    worst_nil = 0.0
    for p in scan.points:
        hm = h_matrices(D, p)
        para = para and hm.para_sasakian
        nil = nil and hm.nilpotent
        worst_nil = max(worst_nil, abs(hm.nilpotency_value))
    summary = {"h_flags": {"para_sasakian": para, "nilpotent_h": nil,
                           "worst_nilpotency_value": worst_nil}}
    return checks, summary


def _crossval_checks(ex, scan: _PointScan, tol: float):
    def equivalence(p):
        rho_frame = frame_ricci_in_coordinates(ex.frame, p, tol=1e-9)
        rho_chart, _ = chart_ricci(ex.metric, p)
        return float(np.max(np.abs(rho_frame - rho_chart.matrix)))

    def chart_r(p):
        _, r = chart_ricci(ex.metric, p)
        return abs(r + 6.0)

    return [
        _residual_check("oracle_equivalence", scan, equivalence, tol),
        _residual_check("chart_scalar_curvature", scan, chart_r, tol),
    ]


def _probe_checks(sf: SpecFile, scan: _PointScan):
    C = sf.constants.get("C", 1.0)
    pr = homogeneity_probe(sf.constants["alpha"], sf.constants["beta"], C,
                           scan.points)
    checks = [
        check_record("pq_identity", pr.pq_identity_residual <= 1e-12,
                     tolerance=1e-12, worst_residual=pr.pq_identity_residual),
        check_record("homogeneity_probe", True, worst_residual=pr.variation,
                     verdict="homogeneous" if pr.homogeneous else "inhomogeneous"),
    ]
    summary = {"homogeneity": {
        "variation": pr.variation,
        "threshold": pr.threshold,
        "verdict": "homogeneous" if pr.homogeneous else "inhomogeneous",
        "gauge_C": C,
        "rotated_brackets": pr.brackets,
    }}
    return checks, summary


def _normal_checks(spec, scan: _PointScan, tol: float):
    checks = _frame_checks(spec, scan, tol)
    checks.append(_residual_check(
        "conformal_factor_zero", scan,
        lambda p: abs(conformal_factor(spec, p)), 0.0))
    iht_worst, _ = scan.worst(lambda p: abs(normal_iht_residual(spec, p)))
    killing = normal_affine_killing(spec, scan.points, tol=tol)
    summary = _frame_summary(spec, scan)
    summary.pop("harmonic_residual", None)
    summary["iht_residual"] = iht_worst
    summary["affine_killing"] = {"verdict": killing.verdict,
                                 "class": killing.structure_class,
                                 "worst_residual": killing.worst_residual}
    return checks, summary


def _normal_soliton_checks(sf: SpecFile, spec, scan: _PointScan, tol: float):
    if "lambda" not in sf.constants:
        raise SchemaError("missing constant 'lambda' for the normal soliton check")
    lam = sf.constants["lambda"]
    checks = []
    summary = {}
    try:
        rep = normal_soliton_check(spec, lam, scan.points, tol=tol)
    except PreconditionViolated as exc:
        checks.append(check_record("normal_soliton", False, tolerance=tol,
                                   detail=str(exc)))
        summary["normal_soliton"] = {"verdict": "precondition_failed",
                                     "lambda": lam}
        return checks, summary
    ok = rep.verdict in ("steady", "trivial_unsteady")
    checks.append(check_record(
        "normal_soliton", ok, tolerance=tol,
        worst_residual=max(rep.residuals.values()), worst_point=rep.worst_point,
        verdict=rep.verdict, detail=rep.detail))
    summary["normal_soliton"] = {
        "verdict": rep.verdict, "lambda": lam, "k": rep.k,
        "epsilon": rep.epsilon, "residuals": rep.residuals,
    }
    if ok:
        cor = normal_flat_corollary(spec, lam, scan.points, tol=tol)
        summary["flat_corollary"] = {"verdict": cor.verdict, "k": cor.k,
                                     "xi_r_max": cor.xi_r_max}
    return checks, summary


def run_checks(sf: SpecFile, command: str, *, tol: Optional[float] = None,
               points: Optional[int] = None, seed: Optional[int] = None,
               skip_singular: bool = False) -> dict:
    """Run a command over a loaded spec file and return the report dict."""
    if command not in ("check", "soliton", "crossval", "probe-homogeneity",
                       "report"):
        raise SchemaError(f"unknown command {command!r}")
    pts = sf.sampling.generate(points, seed)
    checks: list = []
    summary: dict = {}

    skipped = 0
    if sf.variant in ("natural", "paracontact", "normal"):
        spec = build_frame_spec(sf)
        base_tol = tol if tol is not None else default_tol(spec)
        pts, skipped = _filter_singular(pts, [_frame_probe(spec)], skip_singular)
        scan = _PointScan(pts)
        if command in ("check", "report"):
            if sf.variant == "normal":
                cs, sm = _normal_checks(spec, scan, base_tol)
                checks.extend(cs)
                summary.update(sm)
            else:
                checks.extend(_frame_checks(spec, scan, base_tol))
                summary.update(_frame_summary(spec, scan))
        if command in ("soliton", "report"):
            if sf.variant == "paracontact":
                cs, sm = _soliton_checks(spec, scan, base_tol)
                checks.extend(cs)
                summary.update(sm)
            elif sf.variant == "normal":
                cs, sm = _normal_soliton_checks(sf, spec, scan, base_tol)
                checks.extend(cs)
                summary.update(sm)
            elif command == "soliton":
                raise VariantMismatch("soliton needs a paracontact, normal or "
                                      "darboux-example spec")
        if command in ("crossval", "probe-homogeneity"):
            raise VariantMismatch(f"{command} needs a darboux example spec")
    elif sf.variant == "darboux":
        D, ex = build_darboux_structure(sf)
        probes = [_darboux_probe(D)]
        if ex is not None:
            probes.append(_frame_probe(ex.frame))
        pts, skipped = _filter_singular(pts, probes, skip_singular)
        scan = _PointScan(pts)
        axiom_tol = tol if tol is not None else AXIOM_TOL
        frame_tol = tol if tol is not None else default_tol(ex.frame) if ex else None
        if command in ("check", "report"):
            cs, sm = _darboux_checks(D, scan, axiom_tol)
            checks.extend(cs)
            summary.update(sm)
            if ex is not None:
                checks.extend(_frame_checks(ex.frame, scan, frame_tol))
                summary.update(_frame_summary(ex.frame, scan))
        if command in ("soliton", "report"):
            if ex is None:
                if command == "soliton":
                    raise VariantMismatch("soliton on a darboux spec needs the "
                                          "example shortcut")
            else:
                cs, sm = _soliton_checks(ex.frame, scan,
                                         frame_tol if frame_tol else 1e-9)
                checks.extend(cs)
                summary.update(sm)
        if command in ("crossval", "report"):
            if ex is None:
                if command == "crossval":
                    raise VariantMismatch("crossval needs the darboux example "
                                          "shortcut (chart metric + frame)")
            else:
                checks.extend(_crossval_checks(
                    ex, scan, tol if tol is not None else ORACLE_TOL))
        if command in ("probe-homogeneity", "report"):
            if ex is None:
                if command == "probe-homogeneity":
                    raise VariantMismatch("probe-homogeneity needs the darboux "
                                          "example shortcut")
            else:
                cs, sm = _probe_checks(sf, scan)
                checks.extend(cs)
                summary.update(sm)
    else:  # pragma: no cover
        raise SchemaError(f"unhandled variant {sf.variant!r}")

    if skipped:
        summary["skipped_points"] = skipped
    summary["sample_points"] = len(pts)
    return make_report(command, sf.name, sf.digest, checks, summary)



def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ppc",
        description="Verification engine for three-dimensional (almost) "
                    "paracontact metric geometry.")
    parser.add_argument("command", choices=["check", "soliton", "crossval",
                                            "probe-homogeneity", "report"])
    parser.add_argument("file", help="spec file (TOML-compatible subset)")
    parser.add_argument("--tol", type=float, default=None,
                        help="override residual tolerances")
    parser.add_argument("--points", type=int, default=None,
                        help="override the sample-point count")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the sampling seed")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--skip-singular", action="store_true",
                        help="drop sample points where evaluation is singular")
    args = parser.parse_args(argv)

    try:
        sf = load_spec(args.file)
        report = run_checks(sf, args.command, tol=args.tol, points=args.points,
                            seed=args.seed, skip_singular=args.skip_singular)
    except (PpcError, OSError, ValueError, ArithmeticError) as exc:
        print(f"ppc: error: {exc}", file=sys.stderr)
        return 2
    out = to_json(report) if args.format == "json" else to_text(report)
    sys.stdout.write(out)
    return 0 if all_passed(report) else 1


if __name__ == "__main__":
    raise SystemExit(main())
