"""Shear coordinates on the Farey tesselation, Douady-Earle extensions of circle
homeomorphisms, and sampled distortion metrics between boundary maps."""

from .boundary import (
    BoundaryMap,
    Composition,
    Counterexample,
    HalfPlaneConjugate,
    MoebiusMap,
    PiecewiseAngle,
    from_descriptor,
    identity_map,
    to_descriptor,
    to_halfplane,
)
from .douady_earle import beltrami_at, beltrami_at_origin, extend, origin_coefficients
from .farey import FareyVertex, enumerate_tesselation
from .geom import INF, Moebius, Quadruple, cross_ratio, solve_fourth_point
from .modulus import modulus_from_cross_ratio
from .shear import ShearFunction, characteristic_map, d_AS, d_S, s_pmk, shear_function, shear_norm

__all__ = [
    "BoundaryMap", "Composition", "Counterexample", "HalfPlaneConjugate", "MoebiusMap", "PiecewiseAngle",
    "from_descriptor", "identity_map", "to_descriptor", "to_halfplane",
    "beltrami_at", "beltrami_at_origin", "extend", "origin_coefficients",
    "FareyVertex", "enumerate_tesselation",
    "INF", "Moebius", "Quadruple", "cross_ratio", "solve_fourth_point",
    "modulus_from_cross_ratio",
    "ShearFunction", "characteristic_map", "d_AS", "d_S", "s_pmk", "shear_function", "shear_norm",
]

__version__ = "0.1.0"
