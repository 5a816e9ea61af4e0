"""Tests for error types and failure paths across modules."""

import logging

import pytest

from tropembed import exceptions
from tropembed.balancer import embed_isometric
from tropembed.cli import EXIT_ERROR, main
from tropembed.embedder import TropicalEmbedder
from tropembed.exceptions import (
    BudgetExceeded,
    NeighborhoodConflict,
    OverlapError,
    ParseError,
    SchemaError,
    TangencyError,
    TropicalError,
    UndecidableComparison,
    UnknownVertex,
)
from tropembed.lattice import BalancedComplex, RationalPoint
from tropembed.planarization import crossing_number_exact
from tests.factories import SegmentFactory


@pytest.mark.unit
class TestExceptionHierarchy:
    """Tests for the exception classes."""

    def test_every_error_is_tropical(self):
        """Test that each exported exception derives from TropicalError."""
        classes = [
            value
            for value in vars(exceptions).values()
            if isinstance(value, type) and issubclass(value, Exception)
        ]
        assert len(classes) > 10
        assert all(issubclass(cls, TropicalError) for cls in classes)

    @pytest.mark.parametrize(
        "cls,builtin",
        [
            (ParseError, ValueError),
            (SchemaError, ValueError),
            (UnknownVertex, KeyError),
            (BudgetExceeded, RuntimeError),
            (UndecidableComparison, ArithmeticError),
            (TangencyError, OverlapError),
        ],
    )
    def test_builtin_families(self, cls, builtin):
        """Test that errors can be caught by their builtin family."""
        assert issubclass(cls, builtin)

    def test_parse_error_location(self):
        """Test that the message lists every known location."""
        error = ParseError("bad token", line=3, column=7, field="edges")
        assert str(error) == "bad token (line 3, column 7, field 'edges')"

    def test_schema_error_field(self):
        """Test the field suffix of schema errors."""
        assert str(SchemaError("missing", "vertices")) == "missing (field 'vertices')"
        assert SchemaError("missing").field is None


@pytest.mark.unit
class TestFailurePaths:
    """Tests for errors raised deep inside the library."""

    def test_budget_exceeded_carries_bound(self, complete_five):
        """Test that the exhausted search reports the bound it reached."""
        with pytest.raises(BudgetExceeded) as info:
            crossing_number_exact(complete_five.finite_subgraph(), budget=1)
        assert info.value.best_lower_bound == 1

    def test_complex_with_unlisted_endpoint(self):
        """Test that segments must end at listed vertices."""
        with pytest.raises(UnknownVertex):
            BalancedComplex((RationalPoint(0, 0),), (SegmentFactory.create(),))

    def test_complex_with_duplicate_vertex(self):
        """Test that vertices are listed once."""
        with pytest.raises(ValueError):
            BalancedComplex((RationalPoint(0, 0), RationalPoint(0, 0)))


@pytest.mark.unit
class TestFallbacks:
    """Tests for recovery when a stage gives up."""

    def test_embedder_falls_back_to_heuristic(self, mocker, complete_five, caplog):
        """Test that an exhausted exact search yields a labeled upper bound."""
        mocker.patch(
            "tropembed.embedder.crossing_number_exact",
            side_effect=BudgetExceeded("out of budget", best_lower_bound=1),
        )
        with caplog.at_level(logging.WARNING, logger="tropembed"):
            k, exact, _ = TropicalEmbedder().crossing_number(complete_five)
        assert not exact
        assert k >= 1
        assert "heuristic upper bound" in caplog.text

    def test_pipeline_falls_back_to_heuristic(self, mocker, complete_five):
        """Test that the pipeline flags a heuristic crossing count."""
        mocker.patch(
            "tropembed.balancer.crossing_number_exact",
            side_effect=BudgetExceeded("out of budget", best_lower_bound=1),
        )
        result = embed_isometric(complete_five)
        assert not result.report.crossings_exact_flag
        assert not result.planarization.exact

    def test_cli_reports_pipeline_errors(self, mocker, graph_file, capsys):
        """Test that library errors become exit code 2 with a message."""
        mocker.patch(
            "tropembed.cli.TropicalEmbedder.embed", side_effect=NeighborhoodConflict("no room")
        )
        assert main(["embed", str(graph_file)]) == EXIT_ERROR
        assert capsys.readouterr().err == "tropembed: no room\n"
