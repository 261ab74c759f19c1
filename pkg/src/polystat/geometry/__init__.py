"""Exact polyhedral geometry: sets, cones, and the LP/DD engines."""

from .polyhedron import (
    EMPTY,
    ConvexPolyhedron,
    EmptySetType,
    PolyUnion,
    cone_is_trivial,
    union_is_origin,
)
from .lp import LPResult, lp_extreme, lp_feasible, solve_lp
from .ddm import (
    cone_from_generators,
    cone_generators,
    generators,
    polar_cone_hrep,
    vrep_to_hrep,
)
from .cones import (
    ConeUnion,
    PolyCone,
    contains_union,
    limiting_normal_cone,
    minkowski_sum,
    polar_cone,
    regular_normal_cone,
    tangent_cone,
    union_equal,
)

__all__ = [
    "EMPTY",
    "EmptySetType",
    "ConvexPolyhedron",
    "PolyUnion",
    "PolyCone",
    "ConeUnion",
    "LPResult",
    "solve_lp",
    "lp_feasible",
    "lp_extreme",
    "generators",
    "cone_generators",
    "cone_from_generators",
    "polar_cone_hrep",
    "vrep_to_hrep",
    "tangent_cone",
    "polar_cone",
    "regular_normal_cone",
    "limiting_normal_cone",
    "contains_union",
    "union_equal",
    "minkowski_sum",
    "cone_is_trivial",
    "union_is_origin",
]
