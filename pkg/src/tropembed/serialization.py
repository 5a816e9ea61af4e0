"""JSON documents for metric graphs and embedded complexes.

Every rational is written as a canonical ``"p/q"`` string and every value
group element as a ``{label: "p/q"}`` coefficient map, so files round-trip
exactly and never contain decimal floats.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

from tropembed.exceptions import ParseError, SchemaError, TropicalError
from tropembed.lattice import (
    BalancedComplex,
    ElementRef,
    EmbeddingMap,
    GadgetRecord,
    LatticeRay,
    LatticeSegment,
    PrimitiveVector,
    RationalPoint,
)
from tropembed.metric_graph import (
    INFINITY,
    AddInfiniteLeaf,
    MetricGraph,
    ModificationTrace,
    Move,
    ReverseSubdivide,
    Subdivide,
    is_infinite,
)
from tropembed.models import Report
from tropembed.utils import (
    decode_json_document,
    encode_json_document,
    format_rational,
    parse_rational,
)
from tropembed.value_group import LambdaScalar, Scalar, ValueGroup

logger = logging.getLogger(__name__)

COMPLEX_FORMAT = "tropembed-complex"
FORMAT_VERSION = 1


@dataclass
class ComplexDocument:
    """The contents of a complex file.

    Attributes:
        complex: The balanced complex.
        map: Images of graph edges and vertices.
        report: The report stored with the complex.
        group: Value group, or ``None`` for rational coordinates.
        source: The input graph, when recorded.
        graph: The normalized graph that was embedded, when recorded.
        trace: Moves from ``source`` to ``graph``.
    """

    complex: BalancedComplex
    map: EmbeddingMap
    report: Report
    group: Optional[ValueGroup] = None
    source: Optional[MetricGraph] = None
    graph: Optional[MetricGraph] = None
    trace: ModificationTrace = ModificationTrace()


# Scalars


def encode_scalar(value: Any) -> Union[str, dict[str, str]]:
    """``"p/q"`` for rationals, a coefficient map for value group elements."""
    if isinstance(value, LambdaScalar):
        return value.to_dict()
    if is_infinite(value):
        return "inf"
    return format_rational(Fraction(value))


def decode_scalar(data: Any, group: Optional[ValueGroup], field: str) -> Scalar:
    """Inverse of :func:`encode_scalar`.

    Raises:
        ParseError: If the value is neither a rational string nor a coefficient map.
        SchemaError: If a coefficient map names a label outside ``group``.
    """
    if isinstance(data, Mapping):
        if group is None:
            raise SchemaError("value group element in a document without a value group", field)
        coefficients = {str(k): parse_rational(v, f"{field}.{k}") for k, v in data.items()}
        try:
            return group.element(coefficients)
        except TropicalError as e:
            raise SchemaError(str(e), field) from e
    return parse_rational(data, field)


def _length(data: Any, field: str) -> Any:
    if data == "inf":
        return INFINITY
    return parse_rational(data, field)


def _require(data: Mapping[str, Any], key: str, field: str) -> Any:
    if not isinstance(data, Mapping):
        raise ParseError(f"expected an object, got {type(data).__name__}", field=field)
    if key not in data:
        raise SchemaError(f"missing field {key!r}", f"{field}.{key}" if field else key)
    return data[key]


def _list(data: Any, field: str) -> list[Any]:
    if not isinstance(data, list):
        raise ParseError(f"expected a list, got {type(data).__name__}", field=field)
    return data


def _integer(data: Any, field: str) -> int:
    if isinstance(data, bool) or not isinstance(data, int):
        raise ParseError(f"expected an integer, got {data!r}", field=field)
    return data


# Graphs


def graph_to_dict(graph: MetricGraph, group: Optional[ValueGroup] = None) -> dict[str, Any]:
    """Graph document; value group lengths go to ``lambda.lengths_in_lambda``."""
    edges = []
    in_lambda: dict[str, dict[str, str]] = {}
    for edge in graph.edges:
        entry: dict[str, Any] = {"id": edge.id, "u": edge.u, "v": edge.v}
        if isinstance(edge.length, LambdaScalar):
            in_lambda[edge.id] = edge.length.to_dict()
        else:
            entry["length"] = encode_scalar(edge.length)
        edges.append(entry)
    document: dict[str, Any] = {"vertices": list(graph.vertices), "edges": edges}
    if graph.infinite_vertices:
        document["infinite_vertices"] = sorted(graph.infinite_vertices)
    if group is not None:
        lambda_section = group.to_dict()
        if in_lambda:
            lambda_section["lengths_in_lambda"] = in_lambda
        document["lambda"] = lambda_section
    elif in_lambda:
        raise ValueError("graph has value group lengths but no group was given")
    return document


def graph_from_dict(
    data: Any, precision: int = 256, field: str = "", group: Optional[ValueGroup] = None
) -> tuple[MetricGraph, Optional[ValueGroup]]:
    """Decode a graph document and its optional value group.

    A graph stored inside a complex file passes the file's ``group``, which then
    replaces the one the graph declares.

    Raises:
        ParseError: On malformed values.
        SchemaError: On a document that does not describe a valid graph.
    """
    prefix = f"{field}." if field else ""
    in_lambda: Mapping[str, Any] = {}
    if isinstance(data, Mapping) and data.get("lambda") is not None:
        section = data["lambda"]
        try:
            group = group or ValueGroup.from_dict(section, precision)
        except (TropicalError, KeyError, TypeError) as e:
            raise SchemaError(f"invalid value group: {e}", f"{prefix}lambda") from e
        in_lambda = section.get("lengths_in_lambda") or {}
    vertices = [str(v) for v in _list(_require(data, "vertices", field), f"{prefix}vertices")]
    edges = []
    for i, entry in enumerate(_list(_require(data, "edges", field), f"{prefix}edges")):
        where = f"{prefix}edges[{i}]"
        edge_id = str(_require(entry, "id", where))
        u = str(_require(entry, "u", where))
        v = str(_require(entry, "v", where))
        if edge_id in in_lambda:
            length = decode_scalar(in_lambda[edge_id], group, f"{prefix}lambda.lengths_in_lambda")
        else:
            length = _length(_require(entry, "length", where), f"{where}.length")
        edges.append((edge_id, u, v, length))
    infinite = data.get("infinite_vertices")
    try:
        graph = MetricGraph.build(vertices, edges, infinite)
    except TropicalError as e:
        raise SchemaError(str(e), f"{prefix}edges") from e
    return graph, group


def parse_graph(text: Union[str, bytes], precision: int = 256) -> MetricGraph:
    """Decode a graph file.

    Example:
        >>> graph = parse_graph('{"vertices": ["a", "b"], '
        ...     '"edges": [{"id": "e", "u": "a", "v": "b", "length": "10/3"}]}')
        >>> graph.edge("e").length
        Fraction(10, 3)
    """
    return load_graph(text, precision)[0]


def load_graph(
    text: Union[str, bytes], precision: int = 256
) -> tuple[MetricGraph, Optional[ValueGroup]]:
    """Decode a graph file together with its value group, if it declares one."""
    graph, group = graph_from_dict(decode_json_document(text), precision)
    logger.debug(f"parsed graph with {len(graph.vertices)} vertices, {len(graph.edges)} edges")
    return graph, group


def emit_graph(graph: MetricGraph, group: Optional[ValueGroup] = None) -> str:
    return encode_json_document(graph_to_dict(graph, group))


# Modification traces


def _move_to_dict(move: Move) -> dict[str, Any]:
    if isinstance(move, Subdivide):
        return {
            "move": "subdivide",
            "edge": move.edge,
            "lengths": [encode_scalar(length) for length in move.lengths],
            "vertex": move.vertex,
        }
    if isinstance(move, ReverseSubdivide):
        return {"move": "reverse_subdivide", "vertex": move.vertex}
    return {
        "move": "add_infinite_leaf",
        "vertex": move.vertex,
        "leaf": move.leaf,
        "edge": move.edge,
    }


def _move_from_dict(data: Any, group: Optional[ValueGroup], field: str) -> Move:
    kind = _require(data, "move", field)
    if kind == "subdivide":
        lengths = _list(_require(data, "lengths", field), f"{field}.lengths")
        if len(lengths) != 2:
            raise SchemaError("a subdivision has two lengths", f"{field}.lengths")
        first, second = (decode_scalar(x, group, f"{field}.lengths") for x in lengths)
        edge = str(_require(data, "edge", field))
        return Subdivide(edge, (first, second), str(_require(data, "vertex", field)))
    if kind == "reverse_subdivide":
        return ReverseSubdivide(str(_require(data, "vertex", field)))
    if kind == "add_infinite_leaf":
        return AddInfiniteLeaf(
            str(_require(data, "vertex", field)),
            str(_require(data, "leaf", field)),
            str(_require(data, "edge", field)),
        )
    raise SchemaError(f"unknown move {kind!r}", f"{field}.move")


# Complexes


def _point_to_list(point: RationalPoint) -> list[Any]:
    return [encode_scalar(point.x), encode_scalar(point.y)]


def _point_from_list(data: Any, group: Optional[ValueGroup], field: str) -> RationalPoint:
    pair = _list(data, field)
    if len(pair) != 2:
        raise ParseError(f"expected two coordinates, got {len(pair)}", field=field)
    return RationalPoint(decode_scalar(pair[0], group, field), decode_scalar(pair[1], group, field))


def emit_complex(
    complex_: BalancedComplex,
    map_: EmbeddingMap,
    report: Report,
    group: Optional[ValueGroup] = None,
    source: Optional[MetricGraph] = None,
    graph: Optional[MetricGraph] = None,
    trace: Optional[ModificationTrace] = None,
) -> str:
    """Encode a complex with its embedding map and report.

    Args:
        complex_: The complex.
        map_: Images of graph edges and vertices.
        report: Verification report to store.
        group: Value group of the coordinates, if any.
        source: Input graph, recorded so ``verify`` can replay the trace.
        graph: Normalized graph that was embedded.
        trace: Moves from ``source`` to ``graph``.

    Returns:
        A deterministic JSON document.
    """
    index = complex_.vertex_index
    document: dict[str, Any] = {
        "format": COMPLEX_FORMAT,
        "version": FORMAT_VERSION,
        "value_group": group.to_dict() if group is not None else None,
        "vertices": [_point_to_list(p) for p in complex_.vertices],
        "segments": [
            {"start": index[s.start], "end": index[s.end], "weight": s.weight}
            for s in complex_.segments
        ],
        "rays": [
            {"apex": index[r.apex], "direction": [r.direction.m, r.direction.n], "weight": r.weight}
            for r in complex_.rays
        ],
        "map": {
            "edges": {e: [str(ref) for ref in chain] for e, chain in map_.edge_chains.items()},
            "vertices": dict(map_.vertex_images),
            "gadgets": [
                {
                    "edge": g.edge,
                    "host_start": _point_to_list(g.host_start),
                    "host_end": _point_to_list(g.host_end),
                    "epsilon": encode_scalar(g.epsilon),
                    "target": encode_scalar(g.target),
                    "teeth": g.teeth,
                    "orientation": g.orientation,
                }
                for g in map_.gadgets
            ],
        },
        "source": graph_to_dict(source, group) if source is not None else None,
        "graph": graph_to_dict(graph, group) if graph is not None else None,
        "trace": [_move_to_dict(move) for move in (trace or ModificationTrace())],
        "report": report.to_dict(),
    }
    return encode_json_document(document)


def parse_complex(text: Union[str, bytes], precision: int = 256) -> ComplexDocument:
    """Decode a complex file written by :func:`emit_complex`.

    Raises:
        ParseError: On malformed JSON or values.
        SchemaError: On references to missing vertices or elements.
    """
    data = decode_json_document(text)
    if _require(data, "format", "") != COMPLEX_FORMAT:
        raise SchemaError(f"not a {COMPLEX_FORMAT} document", "format")
    group = None
    if data.get("value_group") is not None:
        try:
            group = ValueGroup.from_dict(data["value_group"], precision)
        except (TropicalError, KeyError, TypeError) as e:
            raise SchemaError(f"invalid value group: {e}", "value_group") from e

    vertices = [
        _point_from_list(p, group, f"vertices[{i}]")
        for i, p in enumerate(_list(_require(data, "vertices", ""), "vertices"))
    ]

    def vertex(entry: Any, key: str, field: str) -> RationalPoint:
        i = _integer(_require(entry, key, field), f"{field}.{key}")
        if not 0 <= i < len(vertices):
            raise SchemaError(f"vertex {i} does not exist", f"{field}.{key}")
        return vertices[i]

    try:
        segments = [
            LatticeSegment(
                vertex(s, "start", f"segments[{i}]"),
                vertex(s, "end", f"segments[{i}]"),
                _integer(s.get("weight", 1), f"segments[{i}].weight"),
            )
            for i, s in enumerate(_list(_require(data, "segments", ""), "segments"))
        ]
        rays = []
        for i, r in enumerate(_list(_require(data, "rays", ""), "rays")):
            m, n = _list(_require(r, "direction", f"rays[{i}]"), f"rays[{i}].direction")
            direction, g = PrimitiveVector.from_integers(
                _integer(m, f"rays[{i}].direction"), _integer(n, f"rays[{i}].direction")
            )
            if g != 1:
                raise SchemaError(f"direction ({m}, {n}) is not primitive", f"rays[{i}].direction")
            weight = _integer(r.get("weight", 1), f"rays[{i}].weight")
            rays.append(LatticeRay(vertex(r, "apex", f"rays[{i}]"), direction, weight))
        complex_ = BalancedComplex(tuple(vertices), tuple(segments), tuple(rays))
    except (TropicalError, ValueError) as e:
        if isinstance(e, (ParseError, SchemaError)):
            raise
        raise SchemaError(str(e), "complex") from e

    map_ = _map_from_dict(_require(data, "map", ""), group)
    source = graph = None
    if data.get("source") is not None:
        source, _ = graph_from_dict(data["source"], precision, "source", group)
    if data.get("graph") is not None:
        graph, _ = graph_from_dict(data["graph"], precision, "graph", group)
    trace = ModificationTrace(
        tuple(
            _move_from_dict(m, group, f"trace[{i}]")
            for i, m in enumerate(_list(data.get("trace", []), "trace"))
        )
    )
    report = Report.from_dict(data.get("report") or {})
    logger.debug(f"parsed complex with {len(segments)} segments and {len(rays)} rays")
    return ComplexDocument(complex_, map_, report, group, source, graph, trace)


def _map_from_dict(data: Any, group: Optional[ValueGroup]) -> EmbeddingMap:
    chains = {}
    for edge_id, refs in dict(_require(data, "edges", "map")).items():
        parsed = []
        for ref in _list(refs, f"map.edges.{edge_id}"):
            try:
                parsed.append(ElementRef.parse(str(ref)))
            except ValueError as e:
                raise ParseError(str(e), field=f"map.edges.{edge_id}") from e
        chains[str(edge_id)] = tuple(parsed)
    images: dict[str, Optional[int]] = {}
    for vertex, image in dict(_require(data, "vertices", "map")).items():
        images[str(vertex)] = None if image is None else _integer(image, f"map.vertices.{vertex}")
    gadgets = []
    for i, g in enumerate(_list(data.get("gadgets", []), "map.gadgets")):
        where = f"map.gadgets[{i}]"
        gadgets.append(
            GadgetRecord(
                edge=str(_require(g, "edge", where)),
                host_start=_point_from_list(_require(g, "host_start", where), group, where),
                host_end=_point_from_list(_require(g, "host_end", where), group, where),
                epsilon=decode_scalar(_require(g, "epsilon", where), group, f"{where}.epsilon"),
                target=decode_scalar(_require(g, "target", where), group, f"{where}.target"),
                teeth=_integer(_require(g, "teeth", where), f"{where}.teeth"),
                orientation=_integer(g.get("orientation", 1), f"{where}.orientation"),
            )
        )
    return EmbeddingMap(chains, images, tuple(gadgets))
