"""Exact cut-and-project toolkit: model sets, Hadwiger invariants,
bounded-distance decisions and window equidecompositions."""

from . import bdequiv, equidecomp, errors, hadwiger, linear, modelset, scheme, window
from .exactnum import (
    ExactNumber,
    GeneratorContext,
    Opaque,
    Quadratic,
    golden_ratio_context,
    rational_context,
)
from .scheme import Scheme, enumerate_lattice, make_hecke_scheme, make_lattice, member_p2
from .window import IntervalUnion, Parallelogram, Polygon

__all__ = [
    "ExactNumber",
    "GeneratorContext",
    "Quadratic",
    "Opaque",
    "golden_ratio_context",
    "rational_context",
    "Scheme",
    "make_lattice",
    "make_hecke_scheme",
    "member_p2",
    "enumerate_lattice",
    "IntervalUnion",
    "Parallelogram",
    "Polygon",
    "errors",
    "linear",
    "window",
    "scheme",
    "modelset",
    "hadwiger",
    "equidecomp",
    "bdequiv",
]
