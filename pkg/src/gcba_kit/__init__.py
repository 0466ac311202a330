"""Numerical toolkit for geodesically complete CAT(0)/CAT(1) model spaces."""

__version__ = "0.1.0"

from .spaces import (  # noqa: F401
    ConePoint,
    ConeSpace,
    GraphPoint,
    SphericalGraph,
    TinyBallSpec,
    apex,
    build_space,
    cone_point,
    make_circle,
    make_space,
    make_suspension,
    validate_space,
)

__all__ = [
    "ConePoint", "ConeSpace", "GraphPoint", "SphericalGraph", "TinyBallSpec",
    "apex", "build_space", "cone_point", "make_circle", "make_space",
    "make_suspension", "validate_space",
]
