"""Segal-Bargmann transform and holomorphic Sobolev spaces on S^1, S^2 and SU(2)."""
from .space_model import SpaceKind, SpaceModel, make_space
from .special_functions import ComplexPoint
from .reports import Verdict, VerificationReport
from .heat_kernels import WeightFamily, WeightFunction, TruncationInsufficient, DeltaNotFound
from .quadrature import LowConfidenceWarning
from .transform import (
    BargmannImage,
    SpectralCoeffs,
    analyze,
    bargmann_forward,
    holo_eval,
    holo_fourier_coeffs,
    synthesize,
)

__all__ = [
    "SpaceKind",
    "SpaceModel",
    "make_space",
    "ComplexPoint",
    "Verdict",
    "VerificationReport",
    "WeightFamily",
    "WeightFunction",
    "TruncationInsufficient",
    "DeltaNotFound",
    "LowConfidenceWarning",
    "BargmannImage",
    "SpectralCoeffs",
    "analyze",
    "bargmann_forward",
    "holo_eval",
    "holo_fourier_coeffs",
    "synthesize",
]

__version__ = "0.1.0"
