"""SVG pictures of balanced complexes."""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import drawsvg as draw

from tropembed.balancer import Corridor
from tropembed.exceptions import OverlapError
from tropembed.lattice import (
    RAY,
    BalancedComplex,
    ElementRef,
    EmbeddingMap,
    LatticeRay,
    LatticeSegment,
    crossings,
)

logger = logging.getLogger(__name__)

Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class RenderOptions:
    """How a complex is drawn.

    Attributes:
        padding: Margin around the vertices, as a fraction of the larger side
            of their bounding box. Rays are cut where they leave the padded box.
        size: Width of the larger side of the picture, in pixels.
        overlay: Highlight the images of graph edges.
        show_corridors: Outline the corridor of every creneau.
        mark_crossings: Circle crossings between images of graph edges.
    """

    padding: Fraction = Fraction(1, 10)
    size: int = 800
    overlay: bool = True
    show_corridors: bool = False
    mark_crossings: bool = True
    stroke: str = "#222222"
    overlay_stroke: str = "#1f77b4"
    ray_stroke: str = "#888888"
    corridor_fill: str = "#ffbf0040"
    crossing_stroke: str = "#d62728"


def _bounding_box(complex_: BalancedComplex, padding: Fraction) -> Box:
    points = [p.as_floats() for p in complex_.vertices] or [(0.0, 0.0)]
    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    side = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    margin = float(padding) * side
    return min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin


def _ray_exit(ray: LatticeRay, box: Box) -> tuple[float, float]:
    """Where a ray leaves the box."""
    x, y = ray.apex.as_floats()
    m, n = ray.direction.m, ray.direction.n
    xmin, xmax, ymin, ymax = box
    limits = []
    if m:
        limits.append(((xmax if m > 0 else xmin) - x) / m)
    if n:
        limits.append(((ymax if n > 0 else ymin) - y) / n)
    t = max(0.0, min(limits))
    return x + t * m, y + t * n


def render_svg(
    complex_: BalancedComplex,
    map_: Optional[EmbeddingMap] = None,
    options: Optional[RenderOptions] = None,
) -> str:
    """Draw a complex as SVG text.

    Output is deterministic for equal inputs. Segment and ray weights above one
    are written next to the element.

    Args:
        complex_: The complex to draw.
        map_: Embedding map, for the overlay, crossing marks and corridors.
        options: Drawing options; defaults to :class:`RenderOptions`.

    Returns:
        An SVG document.
    """
    options = options or RenderOptions()
    box = _bounding_box(complex_, options.padding)
    xmin, xmax, ymin, ymax = box
    scale = options.size / max(xmax - xmin, ymax - ymin)
    width = math.ceil((xmax - xmin) * scale)
    height = math.ceil((ymax - ymin) * scale)
    unit = options.size / 400

    def px(x: float, y: float) -> tuple[float, float]:
        return round((x - xmin) * scale, 3), round((ymax - y) * scale, 3)

    d = draw.Drawing(width, height)
    d.append(draw.Rectangle(0, 0, width, height, fill="white"))

    if options.show_corridors and map_ is not None:
        for gadget in map_.gadgets:
            corridor = Corridor(LatticeSegment(gadget.host_start, gadget.host_end), gadget.epsilon)
            coordinates: list[float] = []
            for corner in corridor.corners():
                coordinates.extend(px(*corner.as_floats()))
            d.append(
                draw.Lines(*coordinates, close=True, fill=options.corridor_fill, stroke="none")
            )

    gamma: set[ElementRef] = set()
    if map_ is not None and options.overlay:
        gamma = set(map_.gamma_refs(finite_only=False))
    for ref in complex_.refs():
        element = complex_.element(ref)
        start = px(*element.origin.as_floats())
        if isinstance(element, LatticeSegment):
            end = px(*element.end.as_floats())
        else:
            end = px(*_ray_exit(element, box))
        if ref in gamma:
            style = {"stroke": options.overlay_stroke, "stroke_width": 2.5 * unit}
        elif ref.kind == RAY:
            style = {"stroke": options.ray_stroke, "stroke_width": unit, "stroke_dasharray": "4,3"}
        else:
            style = {"stroke": options.stroke, "stroke_width": 1.5 * unit}
        d.append(draw.Line(*start, *end, **style))
        if element.weight > 1:
            d.append(
                draw.Text(
                    str(element.weight),
                    10 * unit,
                    (start[0] + end[0]) / 2,
                    (start[1] + end[1]) / 2,
                    fill=options.stroke,
                    font_family="sans-serif",
                )
            )

    for point in complex_.vertices:
        d.append(draw.Circle(*px(*point.as_floats()), 1.5 * unit, fill=options.stroke))

    if options.mark_crossings:
        refs = map_.gamma_refs() if map_ is not None else None
        try:
            records = crossings(complex_, refs)
        except OverlapError as e:
            logger.warning(f"not marking crossings: {e}")
            records = None
        for record in records or []:
            d.append(
                draw.Circle(
                    *px(*record.point.as_floats()),
                    5 * unit,
                    fill="none",
                    stroke=options.crossing_stroke,
                    stroke_width=unit,
                )
            )

    logger.debug(f"rendered {len(complex_.refs())} elements at {width}x{height}")
    return d.as_svg()
