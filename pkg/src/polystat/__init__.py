"""polystat: exact stationarity analysis for piecewise polyhedral programs."""

from .exceptions import PolystatError, PreconditionError, ResourceLimitError
from .geometry import (
    EMPTY,
    ConvexPolyhedron,
    PolyUnion,
    contains_union,
    limiting_normal_cone,
    tangent_cone,
    union_equal,
)
from .kernels import KERNEL_BACKEND
from .mappings import PolyMapping, compose
from .problems import (
    BilevelLqInstance,
    CcmpInstance,
    GridOracleConfig,
    build_bilevel_lq,
    build_ccmp,
    build_emop_linear,
    build_example,
    ccmp_cross_check,
    load_instance,
    oracle_relate,
)
from .rational import RATIONAL_BACKEND, rat, rat_str
from .stationarity import (
    ImplicitProgram,
    Objective,
    build_derived,
    check_cq,
    check_stationarity,
    pipeline,
    reverify_stationarity,
    verdict_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "BilevelLqInstance",
    "CcmpInstance",
    "ConvexPolyhedron",
    "EMPTY",
    "GridOracleConfig",
    "ImplicitProgram",
    "KERNEL_BACKEND",
    "Objective",
    "PolyMapping",
    "PolystatError",
    "PolyUnion",
    "PreconditionError",
    "RATIONAL_BACKEND",
    "ResourceLimitError",
    "build_bilevel_lq",
    "build_ccmp",
    "build_derived",
    "build_emop_linear",
    "build_example",
    "ccmp_cross_check",
    "check_cq",
    "check_stationarity",
    "compose",
    "contains_union",
    "limiting_normal_cone",
    "load_instance",
    "oracle_relate",
    "pipeline",
    "rat",
    "rat_str",
    "reverify_stationarity",
    "tangent_cone",
    "union_equal",
    "verdict_from_json",
    "__version__",
]
