"""Numerical curvature toolkit for warped and twisted product metrics.

Computes curvature, Weyl and (conformal) Jacobi-operator data for
expression-valued metrics at desk scale, classifies pointwise and
conformally Osserman behaviour, and verifies the structural statements
relating product metrics, self-duality and conformal flatness on a preset
zoo of examples.
"""

from .expr import ExprAst, Jet2, eval_jet2, eval_value, parse, to_string
from .linalg import Frame, Signature, SpectrumReport, char_poly, metric_frame, sphere_samples, sym_eigen
from .metric import MetricField, conformal_rescale
from .curvature import (
    Curvature4,
    RicciData,
    christoffel,
    point_curvature,
    ricci_scalar,
    riemann,
    scalar_field_geometry,
    schouten,
    sectional,
    weyl,
)
from .products import (
    ProductSpec,
    adapted_frame,
    build_product,
    compare_oracle,
    max_oracle_residual,
    twisted_oracle,
    twisting_reducibility,
    warped_oracle,
)
from .operators import (
    OppointReport,
    conformal_jacobi,
    conformally_osserman_check,
    jacobi,
    osserman_check,
    rakic_duality_check,
)
from .fourdim import WeylPM, lambda_pm_basis, selfduality_verdict, weyl_pm
from .classify import ClassificationReport, ClassifyConfig, classify, constant_curvature_check
from .specfile import load_manifold, load_manifold_file, load_preset, preset_names

__version__ = "0.1.0"
