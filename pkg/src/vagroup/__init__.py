"""Exact computation in Thompson's group V, Brin's group 𝒜 and the group V𝒜."""

from .dsl import parse_element
from .exact import CantorPoint, Dyadic, parse_point
from .pl import PLMap
from .treepair import TreePair
from .vamap import Germ, VAElement, va_compose, va_eval, va_invert, va_power, va_singularities

__all__ = [
    "CantorPoint",
    "Dyadic",
    "Germ",
    "PLMap",
    "TreePair",
    "VAElement",
    "parse_element",
    "parse_point",
    "va_compose",
    "va_eval",
    "va_invert",
    "va_power",
    "va_singularities",
]
