"""tropembed - isometric embeddings of metric graphs as balanced tropical curves.

A metric graph is drawn in the plane with straight lines, its crossings are
made orthogonal, and every edge is lengthened by staircase gadgets until its
tropical length is exact. Rays then balance every vertex, and an independent
verifier certifies the result.
"""

from tropembed.audit import verify
from tropembed.balancer import EmbeddingResult, embed_isometric
from tropembed.collections import Collection, CrossingCollection, FailureCollection
from tropembed.creneau import CreneauPath, CreneauSpec, insert_creneau, insert_creneau_lambda
from tropembed.embedder import TropicalEmbedder
from tropembed.exceptions import TropicalError
from tropembed.lattice import (
    BalancedComplex,
    ElementRef,
    EmbeddingMap,
    LatticeRay,
    LatticeSegment,
    PrimitiveVector,
    RationalPoint,
    crossings,
    tropical_length,
)
from tropembed.metric_graph import (
    INFINITY,
    MetricGraph,
    ModificationTrace,
    add_infinite_leaf,
    normalize_simple,
    reverse_subdivide,
    subdivide,
)
from tropembed.models import (
    DrawingMethod,
    EmbeddingConfig,
    Failure,
    FailureCategory,
    LengthPartition,
    Mode,
    Report,
)
from tropembed.planarization import crossing_number_exact, planarize_heuristic
from tropembed.projections import PAFunction, projections
from tropembed.render import RenderOptions, render_svg
from tropembed.serialization import (
    ComplexDocument,
    emit_complex,
    emit_graph,
    load_graph,
    parse_complex,
    parse_graph,
)
from tropembed.value_group import LambdaScalar, ValueGroup

__version__ = "0.1.0"

__all__ = [
    "TropicalEmbedder",
    "EmbeddingResult",
    "embed_isometric",
    "verify",
    "MetricGraph",
    "ModificationTrace",
    "INFINITY",
    "normalize_simple",
    "subdivide",
    "reverse_subdivide",
    "add_infinite_leaf",
    "BalancedComplex",
    "EmbeddingMap",
    "ElementRef",
    "LatticeSegment",
    "LatticeRay",
    "PrimitiveVector",
    "RationalPoint",
    "crossings",
    "tropical_length",
    "CreneauSpec",
    "CreneauPath",
    "insert_creneau",
    "insert_creneau_lambda",
    "crossing_number_exact",
    "planarize_heuristic",
    "ValueGroup",
    "LambdaScalar",
    "PAFunction",
    "projections",
    "EmbeddingConfig",
    "Mode",
    "DrawingMethod",
    "LengthPartition",
    "Report",
    "Failure",
    "FailureCategory",
    "Collection",
    "CrossingCollection",
    "FailureCollection",
    "RenderOptions",
    "render_svg",
    "ComplexDocument",
    "parse_graph",
    "load_graph",
    "emit_graph",
    "emit_complex",
    "parse_complex",
    "TropicalError",
]
