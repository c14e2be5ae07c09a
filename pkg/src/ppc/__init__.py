"""Verification engine for three-dimensional (almost) paracontact metric
geometry: frame-level connection, curvature and Ricci data, soliton and
(kappa, mu) verdicts, Darboux-chart structures and an independent coordinate
curvature oracle."""

__version__ = "0.1.0"

from .jets import ChartPoint, Jet2, jet_seed
from .expr import parse, to_source, eval_jet, eval_value
from .frame import (G, FrameRealization, NaturalFrameSpec, ParacontactFrameSpec,
                    SymBilinear, bracket_table, connection_table, h_tensor,
                    jacobi_residual, lie_metric, classification_flags,
                    ricci_iht, harmonic_residual, affine_killing_residual,
                    curvature_lie_group, ricci_from_curvature,
                    reconstruct_curvature, realization_consistency)
from .invariants import (SolitonReport, KappaMu, SegreType, soliton_check,
                         kappa_mu_detect, segre_classify, homogeneous_soliton)
from .darboux import (DarbouxStructure, ChartMetricField, build_darboux,
                      axioms_check, h_matrices, chart_christoffel, chart_ricci,
                      example_structure, homogeneity_probe)
from .normal import (NormalFrameSpec, normal_jacobi_residual,
                     normal_iht_residual, normal_affine_killing, normal_ricci,
                     normal_soliton_check, conformal_factor,
                     normal_flat_corollary)

__all__ = [name for name in dir() if not name.startswith("_")]
