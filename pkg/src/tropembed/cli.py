"""Command-line interface: ``tropembed embed|verify|render|crossing-number``."""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Optional

from tropembed import __version__
from tropembed.embedder import TropicalEmbedder
from tropembed.exceptions import TropicalError
from tropembed.metric_graph import normalize_simple
from tropembed.models import (
    DrawingMethod,
    EmbeddingConfig,
    LengthPartition,
    Mode,
    Report,
    describe_scalar,
)
from tropembed.planarization import crossing_lower_bound
from tropembed.render import RenderOptions
from tropembed.serialization import parse_complex
from tropembed.utils import encode_json_document, parse_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CERTIFICATE_FAILED = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropembed",
        description="Embed metric graphs as balanced tropical curves in the plane.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    embed = commands.add_parser("embed", help="embed a graph file")
    embed.add_argument("graph", type=Path, help="graph JSON file")
    embed.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.RATIONAL.value)
    crossing = embed.add_mutually_exclusive_group()
    crossing.add_argument(
        "--exact-crossings", dest="exact_crossings", action="store_true", default=True
    )
    crossing.add_argument("--heuristic", dest="exact_crossings", action="store_false")
    _solver_options(embed)
    embed.add_argument("--epsilon", type=_rational, help="corridor half-width cap, p/q")
    embed.add_argument(
        "--drawing", choices=[m.value for m in DrawingMethod], default=DrawingMethod.GRID.value
    )
    embed.add_argument(
        "--partition",
        choices=[p.value for p in LengthPartition],
        default=LengthPartition.UNIFORM.value,
    )
    embed.add_argument("--precision", type=int, help="max digits for certified comparisons")
    embed.add_argument("--out", type=Path, help="complex JSON output (default: stdout)")
    embed.add_argument("--svg", type=Path, help="also write an SVG picture")

    verify = commands.add_parser("verify", help="re-check an emitted complex")
    verify.add_argument("complex", type=Path, help="complex JSON file")

    render = commands.add_parser("render", help="draw an emitted complex as SVG")
    render.add_argument("complex", type=Path, help="complex JSON file")
    render.add_argument("--out", type=Path, help="SVG output (default: stdout)")
    render.add_argument("--no-overlay", dest="overlay", action="store_false")
    render.add_argument("--show-corridors", action="store_true")
    render.add_argument("--padding", type=_rational, default="1/10", help="margin, p/q")

    solver = commands.add_parser("crossing-number", help="crossing number of a graph file")
    solver.add_argument("graph", type=Path, help="graph JSON file")
    solver.add_argument("--heuristic", dest="exact_crossings", action="store_false")
    _solver_options(solver)
    solver.add_argument("--json", action="store_true", help="print a JSON summary")
    return parser


def _solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, help="planarity tests for the exact search")
    parser.add_argument("--seed", type=int, help="tie-breaking seed for the heuristic")


def _rational(text: str) -> str:
    try:
        parse_rational(text)
    except TropicalError as e:
        raise argparse.ArgumentTypeError(str(e)) from e
    return text


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _write(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")
        logger.info(f"wrote {path}")


def _status(report: Report) -> int:
    if report.passed:
        return EXIT_OK
    for failure in report.failures:
        logger.error(f"{failure.category.value} {failure.subject}: {failure.detail}")
    return EXIT_CERTIFICATE_FAILED


def _embed(args: argparse.Namespace) -> int:
    config = EmbeddingConfig().with_overrides(
        mode=args.mode,
        exact_crossings=args.exact_crossings,
        budget=args.budget,
        epsilon=args.epsilon,
        seed=args.seed,
        drawing_method=args.drawing,
        partition=args.partition,
        precision=args.precision,
    )
    embedder = TropicalEmbedder(config)
    graph, group = embedder.load_graph(args.graph)
    if group is not None and config.mode is not Mode.LAMBDA:
        logger.warning("graph declares a value group; embedding in lambda mode")
        embedder = TropicalEmbedder(config, mode=Mode.LAMBDA)
    result = embedder.embed(graph, group)
    logger.info(
        f"embedded {args.graph} at scale {describe_scalar(result.scale)} "
        f"with {result.planarization.k} crossings"
    )
    _write(embedder.dumps(result), args.out)
    if args.svg is not None:
        _write(embedder.render(result), args.svg)
    return _status(result.report)


def _verify(args: argparse.Namespace) -> int:
    embedder = TropicalEmbedder()
    document = parse_complex(args.complex.read_bytes(), embedder.config.precision)
    report = embedder.verify(document)
    sys.stdout.write(encode_json_document(report.to_dict()))
    return _status(report)


def _render(args: argparse.Namespace) -> int:
    document = parse_complex(args.complex.read_bytes())
    options = RenderOptions(
        padding=parse_rational(args.padding),
        overlay=args.overlay,
        show_corridors=args.show_corridors,
    )
    _write(TropicalEmbedder().render(document, options), args.out)
    return EXIT_OK


def _crossing_number(args: argparse.Namespace) -> int:
    embedder = TropicalEmbedder(
        exact_crossings=args.exact_crossings, budget=args.budget, seed=args.seed
    )
    graph, _ = embedder.load_graph(args.graph)
    k, exact, _ = embedder.crossing_number(graph)
    if args.json:
        summary = {
            "crossing_number": k,
            "exact": exact,
            "lower_bound": crossing_lower_bound(normalize_simple(graph)[0].finite_subgraph()),
        }
        sys.stdout.write(encode_json_document(summary))
    else:
        sys.stdout.write(f"{k}{'' if exact else ' (upper bound)'}\n")
    return EXIT_OK


COMMANDS = {
    "embed": _embed,
    "verify": _verify,
    "render": _render,
    "crossing-number": _crossing_number,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the process exit code.

    Exit code 0 means every certificate passed, 1 that some certificate
    failed, and 2 that the input could not be processed.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except (TropicalError, OSError) as e:
        sys.stderr.write(f"tropembed: {e}\n")
        return EXIT_ERROR
