"""High-level entry point for embedding metric graphs."""

import logging
from pathlib import Path
from typing import Any, Optional, Union

from tropembed.audit import verify
from tropembed.balancer import EmbeddingResult, embed_isometric
from tropembed.exceptions import BudgetExceeded
from tropembed.metric_graph import MetricGraph, normalize_simple
from tropembed.models import EmbeddingConfig, Report
from tropembed.planarization import Planarization, crossing_number_exact, planarize_heuristic
from tropembed.render import RenderOptions, render_svg
from tropembed.serialization import ComplexDocument, emit_complex, load_graph
from tropembed.value_group import ValueGroup

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class TropicalEmbedder:
    """Embeds metric graphs as balanced complexes and checks the results.

    Example:
        >>> with TropicalEmbedder(mode="rational") as embedder:
        ...     graph, _ = embedder.load_graph("triangle.json")
        ...     result = embedder.embed(graph)
        ...     result.report.passed
        True
    """

    def __init__(self, config: Optional[EmbeddingConfig] = None, **overrides: Any):
        """Initialize the embedder.

        Args:
            config: Pipeline settings. Defaults to :class:`EmbeddingConfig`.
            **overrides: Config fields to replace, e.g. ``mode="lambda"``.
                ``None`` values are ignored.

        Raises:
            ValueError: If an override is not a valid config value.
        """
        self.config = (config or EmbeddingConfig()).with_overrides(**overrides)
        self._results: dict[tuple[MetricGraph, Optional[ValueGroup]], EmbeddingResult] = {}

    def __enter__(self) -> "TropicalEmbedder":
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self.clear()

    def clear(self) -> None:
        """Forget cached embeddings."""
        self._results.clear()

    def load_graph(self, path: PathLike) -> tuple[MetricGraph, Optional[ValueGroup]]:
        """Read a graph file and the value group it declares, if any."""
        return load_graph(Path(path).read_bytes(), self.config.precision)

    def embed(self, graph: MetricGraph, group: Optional[ValueGroup] = None) -> EmbeddingResult:
        """Run the embedding pipeline, reusing the result for a graph seen before.

        Raises:
            TropicalError: If the graph cannot be embedded.
        """
        key = (graph, group)
        if key not in self._results:
            self._results[key] = embed_isometric(graph, self.config, group)
        else:
            logger.debug("reusing cached embedding")
        return self._results[key]

    def verify(self, document: ComplexDocument) -> Report:
        """Re-check a stored complex from scratch.

        The graph recorded with the complex is used, together with its
        modification trace when the input graph is also recorded.
        """
        graph = document.graph or document.source
        if graph is None:
            raise ValueError("complex document records no graph")
        return verify(
            document.complex,
            document.map,
            graph,
            expected_crossings=document.report.crossings_expected,
            exact_flag=document.report.crossings_exact_flag,
            group=document.group,
            source=document.source if document.graph is not None else None,
            trace=document.trace if document.graph is not None else None,
            ray_report_limit=self.config.ray_report_limit,
        )

    def crossing_number(self, graph: MetricGraph) -> tuple[int, bool, Planarization]:
        """Crossing number of the finite part of a graph.

        Returns:
            The count, whether it is exact, and the planarization realizing it.
            When the exact search is disabled or exceeds its budget, the count is
            a heuristic upper bound.
        """
        finite = normalize_simple(graph)[0].finite_subgraph()
        if self.config.exact_crossings:
            try:
                k, planarization = crossing_number_exact(finite, self.config.budget)
                return k, True, planarization
            except BudgetExceeded as e:
                logger.warning(f"{e}; reporting a heuristic upper bound")
        k, planarization = planarize_heuristic(finite, self.config.seed)
        return k, False, planarization

    def render(
        self,
        result: Union[EmbeddingResult, ComplexDocument],
        options: Optional[RenderOptions] = None,
    ) -> str:
        return render_svg(result.complex, result.map, options)

    def dumps(self, result: EmbeddingResult) -> str:
        """Complex file text for a pipeline result."""
        return emit_complex(
            result.complex,
            result.map,
            result.report,
            group=result.group,
            source=result.source,
            graph=result.graph,
            trace=result.trace,
        )
