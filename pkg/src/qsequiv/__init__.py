"""Exact-arithmetic toolkit for twisted superpotentials, their universal
quantum-group presentations, and degree-truncated vanishing certification."""

__version__ = "0.1.0"

from .fields import QQ, PrimeField, parse_field  # noqa: F401
from .superpotential import TwistedSuperpotential, analyze  # noqa: F401
from .ncgb import complete, verdict  # noqa: F401
