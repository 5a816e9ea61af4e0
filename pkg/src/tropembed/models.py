"""Configuration, enums and verification report models."""

from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from tropembed.collections import FailureCollection
from tropembed.utils import format_rational, to_fraction


class Mode(str, Enum):
    """Arithmetic used for coordinates and lengths."""

    RATIONAL = "rational"
    LAMBDA = "lambda"


class DrawingMethod(str, Enum):
    """Straight-line drawing algorithm for the planarized graph."""

    GRID = "grid"
    BARYCENTRIC = "barycentric"


class LengthPartition(str, Enum):
    """How an edge length is split among the segments drawing it."""

    UNIFORM = "uniform"
    PROPORTIONAL = "proportional"


class FailureCategory(str, Enum):
    """Kinds of certificate failures reported by verification."""

    STRUCTURE = "structure"
    BALANCE = "balance"
    ISOMETRY = "isometry"
    INFINITE = "infinite"
    WEIGHT = "weight"
    CHAIN = "chain"
    GEOMETRY = "geometry"
    CROSSINGS = "crossings"
    ORTHOGONALITY = "orthogonality"
    LAMBDA = "lambda"
    PROJECTION = "projection"
    MODIFICATION = "modification"


@dataclass
class EmbeddingConfig:
    """Settings for one embedding run.

    Attributes:
        mode: Rational coordinates or value group coordinates.
        exact_crossings: Run the exact crossing number search before falling
            back to the heuristic.
        budget: Maximum number of planarity tests for the exact search.
        epsilon: Optional cap on corridor half-widths, in tropical units of the
            unscaled drawing.
        seed: Tie-breaking seed for the heuristic planarizer.
        drawing_method: Straight-line drawing algorithm.
        partition: Length partition among the segments of an edge image.
        neighborhood_radius: Initial half-width of crossing neighborhoods.
        max_neighborhood_attempts: Number of radius halvings before giving up.
        ray_report_limit: Largest complex (in elements) for which ray crossings
            are computed.
        precision: Maximum decimal digits for certified comparisons.
    """

    mode: Mode = Mode.RATIONAL
    exact_crossings: bool = True
    budget: int = 20000
    epsilon: Optional[Fraction] = None
    seed: Optional[int] = None
    drawing_method: DrawingMethod = DrawingMethod.GRID
    partition: LengthPartition = LengthPartition.UNIFORM
    neighborhood_radius: Fraction = Fraction(1, 4)
    max_neighborhood_attempts: int = 24
    ray_report_limit: int = 4000
    precision: int = 256

    def __post_init__(self) -> None:
        self.mode = Mode(self.mode)
        self.drawing_method = DrawingMethod(self.drawing_method)
        self.partition = LengthPartition(self.partition)
        self.neighborhood_radius = to_fraction(self.neighborhood_radius)
        if self.epsilon is not None:
            self.epsilon = to_fraction(self.epsilon)
            if self.epsilon <= 0:
                raise ValueError("epsilon must be positive")
        if self.neighborhood_radius <= 0:
            raise ValueError("neighborhood_radius must be positive")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EmbeddingConfig":
        """Create a config from a dictionary, ignoring unknown keys."""
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})

    def with_overrides(self, **overrides: Any) -> "EmbeddingConfig":
        """Copy of this config with some fields replaced (None values are ignored)."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class Failure:
    """One failed certificate."""

    category: FailureCategory
    subject: str
    detail: str

    def to_dict(self) -> dict[str, str]:
        return {"category": self.category.value, "subject": self.subject, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Failure":
        return cls(FailureCategory(data["category"]), str(data["subject"]), str(data["detail"]))


@dataclass
class Report:
    """Certificates for an embedded complex.

    Every boolean is re-derived from the complex by the verifier. ``passed`` is
    the conjunction of the certificates about the images of graph edges; ray
    crossings are informational.
    """

    balanced: bool = True
    isometric: bool = True
    infinite_edges_ok: bool = True
    unit_weights: bool = True
    chains_connected: bool = True
    geometry_valid: bool = True
    crossings_on_gamma: int = 0
    crossings_expected: Optional[int] = None
    crossings_exact_flag: bool = True
    orthogonal_crossings: bool = True
    modification_replayed: Optional[bool] = None
    lambda_certified: Optional[bool] = None
    ray_crossings: Optional[int] = None
    ray_conflicts: Optional[int] = None
    failures: FailureCollection = field(default_factory=lambda: FailureCollection([]))

    @property
    def crossings_match(self) -> bool:
        return self.crossings_expected is None or self.crossings_expected == self.crossings_on_gamma

    @property
    def passed(self) -> bool:
        return (
            self.balanced
            and self.isometric
            and self.infinite_edges_ok
            and self.unit_weights
            and self.chains_connected
            and self.geometry_valid
            and self.crossings_match
            and self.orthogonal_crossings
            and self.modification_replayed is not False
            and self.lambda_certified is not False
            and not self.failures.any()
        )

    def add(self, category: FailureCategory, subject: str, detail: str) -> None:
        self.failures.items.append(Failure(category, subject, detail))

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["failures"] = [f.to_dict() for f in self.failures]
        data["passed"] = self.passed
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Report":
        known = {f.name for f in fields(cls)} - {"failures"}
        report = cls(**{k: v for k, v in data.items() if k in known})
        report.failures = FailureCollection(
            [Failure.from_dict(entry) for entry in data.get("failures", [])]
        )
        return report


def describe_scalar(value: Any) -> str:
    """Short exact text for a rational or value group element."""
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)
