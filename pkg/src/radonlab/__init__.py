"""Numerics laboratory for averaging operators over quadratic submanifolds."""

from .poly import (
    MultiPoly,
    PolyVectorField,
    lie_bracket,
    spanning_check,
    wedge_volume,
)
from .models import (
    FramePair,
    IncidenceTriple,
    ModelSurface,
    QuadraticModel,
    SublevelExponents,
    closed_curvature_weight,
    complex_block_det,
    gamma_eval,
    get_model,
    normalized_vol_q,
    vol_q,
)
from .curvature import (
    curvature_maps,
    curvature_weight,
    incidence_distance,
    normalized_curvature,
)

__version__ = "0.1.0"
