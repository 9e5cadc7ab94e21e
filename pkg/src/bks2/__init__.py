"""Valuations on finite ray sets and checks for deterministic hidden-variable models.

Everything is computed exactly over Q(sqrt 2).
"""

__version__ = "0.1.0"

from .exact_algebra import Scalar, SymMatrix, Vec, parse_scalar
from .hypergraph import OrthoHypergraph, Ray, RaySet, build_hypergraph, canonicalize_ray
from .coloring import (
    Valuation,
    count_valuations,
    export_cnf,
    search_valuation,
    verify_valuation,
)
from .catalogs import builtin_catalog

__all__ = [
    "Scalar",
    "SymMatrix",
    "Vec",
    "parse_scalar",
    "OrthoHypergraph",
    "Ray",
    "RaySet",
    "build_hypergraph",
    "canonicalize_ray",
    "Valuation",
    "count_valuations",
    "export_cnf",
    "search_valuation",
    "verify_valuation",
    "builtin_catalog",
]
