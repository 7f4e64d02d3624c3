"""Horosphere laboratory: Kobayashi-type distances, horofunctions and boundary probes on model domains."""

from .domains import (
    BoundaryPoint,
    ConvexPolygon,
    EuclideanBall,
    HalfDisc,
    LatticeDiscComplement,
    Polydisc,
    PuncturedBall,
    Scheme,
    SlitDisc,
    TakagiDomain,
    UnitDisc,
    approach_sequence,
    square,
)
from .errors import (
    BranchCutError,
    ConvergenceError,
    DimensionError,
    GridResolutionError,
    HorolabError,
    InadmissibleSchemeError,
    NotInteriorError,
    PreconditionError,
)
from .metric import MetricBackend, distance, make_backend

__all__ = [
    "BoundaryPoint",
    "BranchCutError",
    "ConvergenceError",
    "ConvexPolygon",
    "DimensionError",
    "EuclideanBall",
    "GridResolutionError",
    "HalfDisc",
    "HorolabError",
    "InadmissibleSchemeError",
    "LatticeDiscComplement",
    "MetricBackend",
    "NotInteriorError",
    "Polydisc",
    "PreconditionError",
    "PuncturedBall",
    "Scheme",
    "SlitDisc",
    "TakagiDomain",
    "UnitDisc",
    "approach_sequence",
    "distance",
    "make_backend",
    "square",
]
