"""Certified construction of a skew product on the annulus S^1 x [-2, 2].

The fiber maps are built level by level from boxes around a golden-rotation
orbit; every number the package reports is a dyadic interval enclosure.
"""

from ._kernel import BACKEND
from .boxes import DomainError, FiberInterval, GenericBox, SingularityError, beta, phi
from .circle import Angle, Arc, arc, cyl_distance, omega, orbit_point
from .construction import (
    CERTIFIED,
    EXCLUDED,
    HORIZON_LIMITED,
    BuildConfig,
    ConstructionError,
    ConstructionState,
    CurveValue,
    ExcludedPoint,
    HorizonLimited,
    build,
    check_conditions,
    extend_level,
    gamma_eval,
    init_level0,
    load_state,
    save_state,
)
from .dynamics import MapValue, apply_T, f_limit, fiber_map, fm, g
from .metrics import MetricEstimate, dinf_sampled, hausdorff_sampled
from .scalar import PrecisionError, Scalar, working_precision
from .strata import depth, depth_table, stratum_member
from .verify import VerificationReport, verify_suite

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "Angle", "Arc", "arc", "cyl_distance", "omega", "orbit_point",
    "DomainError", "SingularityError", "FiberInterval", "GenericBox", "beta", "phi",
    "CERTIFIED", "EXCLUDED", "HORIZON_LIMITED", "BuildConfig", "ConstructionError",
    "ConstructionState", "CurveValue", "ExcludedPoint", "HorizonLimited", "build",
    "check_conditions", "extend_level", "gamma_eval", "init_level0", "load_state", "save_state",
    "MapValue", "apply_T", "f_limit", "fiber_map", "fm", "g",
    "MetricEstimate", "dinf_sampled", "hausdorff_sampled",
    "PrecisionError", "Scalar", "working_precision",
    "depth", "depth_table", "stratum_member",
    "VerificationReport", "verify_suite",
]
