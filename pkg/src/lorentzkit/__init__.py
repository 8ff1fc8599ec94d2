"""Exact toolkit for Lorentzian volume polynomials.

Certifies that a homogeneous polynomial is Lorentzian on a cone, computes
numerical dimensions of nef collections, and evaluates deficit and
stability quantities for pairs of classes, all in exact rational or
certified interval arithmetic.
"""

from .errors import DomainError, InputError, InvariantError, LorentzkitError, PreconditionError
from .intervals import Interval
from .polycore import VolumePolynomial, evaluate, mixed_value, restrict, sequence_sk
from .models import load_model

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InputError",
    "Interval",
    "InvariantError",
    "LorentzkitError",
    "PreconditionError",
    "VolumePolynomial",
    "evaluate",
    "load_model",
    "mixed_value",
    "restrict",
    "sequence_sk",
]
