"""Exact formal normal forms for real Lagrangian surfaces with a parabolic
complex tangent: the pair of involutions, the normalized linearizing
transformation, and the linearized equation with its divergence certificate."""

from __future__ import annotations

from .errors import ConsistencyError, ParabolicNFError, SurfaceInputError, ThresholdUnreachable
from .exactnum import GaussRational, bernoulli_coeffs
from .fps import MapGerm, Series2
from .involutions import InvolutionPair, pair_from_surface
from .linearized import DivergenceCertificate, divergence_certificate
from .normalform import NormalizedTransform, normalize_pair, perturb_to_large_coeffs
from .surface import Surface, generator_e, metric_d, r_star, validate

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError", "ParabolicNFError", "SurfaceInputError", "ThresholdUnreachable",
    "GaussRational", "bernoulli_coeffs", "MapGerm", "Series2", "InvolutionPair",
    "pair_from_surface", "DivergenceCertificate", "divergence_certificate",
    "NormalizedTransform", "normalize_pair", "perturb_to_large_coeffs", "Surface",
    "generator_e", "metric_d", "r_star", "validate",
]
