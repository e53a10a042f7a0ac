"""Apollonian packings, Kleinian orbit counting and limit-set dimensions."""
from .descartes import DescartesQuadruple, PackingRun, generate, reflect, root_quadruple_bounded
from .errors import (
    DegenerateData,
    InsufficientData,
    InvalidInput,
    PackingOverflow,
    PacklabError,
)
from .moebius import INF, GeneralizedCircle, H3Point, MoebiusMap

__version__ = "0.1.0"

__all__ = [
    "DescartesQuadruple",
    "PackingRun",
    "generate",
    "reflect",
    "root_quadruple_bounded",
    "MoebiusMap",
    "GeneralizedCircle",
    "H3Point",
    "INF",
    "PacklabError",
    "InvalidInput",
    "PackingOverflow",
    "DegenerateData",
    "InsufficientData",
    "__version__",
]
