"""Expectation thresholds, fractional covers and certified cover constructions."""

__version__ = "0.1.0"

from .certificate import Certificate, JLTarget, VerificationReport, certify, verify_certificate
from .errors import ExpThreshError
from .families import CopyProjection, Explicit, Levels, SingletonLevels, Union, Volume
from .interval import Const, Interval
from .oracles import (expectation_threshold_q, fractional_expectation_threshold_qf,
                      min_cover_weight_fractional, min_cover_weight_integral, thresholds)
from .weights import MonotoneFamily, WeightFunction, threshold_pc

__all__ = [
    "Certificate", "JLTarget", "VerificationReport", "certify", "verify_certificate",
    "ExpThreshError", "CopyProjection", "Explicit", "Levels", "SingletonLevels", "Union", "Volume",
    "Const", "Interval", "expectation_threshold_q", "fractional_expectation_threshold_qf",
    "min_cover_weight_fractional", "min_cover_weight_integral", "thresholds",
    "MonotoneFamily", "WeightFunction", "threshold_pc",
]
