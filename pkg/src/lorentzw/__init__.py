"""Minimal Lorentzian surfaces of general type in pseudo-Euclidean 4-space R^4_2.

Surfaces are sums of two null curves, Psi(u, v) = beta(u+v) + theta(u-v).
The package evaluates them, computes their Gauss and normal curvatures,
builds and checks canonical parameters, and verifies the natural PDE system
satisfied by the curvatures.
"""

from .canonical import (
    CanonicalReport,
    ReparamSolution,
    ReparametrizedCurve,
    make_canonical,
    reparametrize_to_canonical,
    verify_canonical,
)
from .catalog import degenerate_one_dim_normal, degenerate_plane, example_5_1, example_5_2
from .config import SurfaceConfig
from .curvature import (
    CanonicalFrame,
    CurvatureSample,
    SurfaceClass,
    classify,
    curvatures_canonical_closed_form,
    curvatures_via_frame,
    deficit_closed_form,
    frame_free_deficit,
)
from .errors import *  # noqa: F401,F403
from .exprlang import differentiate, evaluate, parse, simplify, to_string
from .geometry4 import causal_sign, inner, is_null, normal_rank, norm_sq, vec4
from .nullcurve import NullCurve, convert_case_b_to_a
from .pde import ScalarField, hyperbolic_laplacian, natural_system_residual, solution_from_generators
from .surface import FundamentalForms, WeierstrassSurface

__version__ = "0.1.0"
