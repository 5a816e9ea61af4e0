"""Collection wrappers for crossing records and verification failures.

Provides typed collections with helper methods for filtering, sorting, and grouping.
"""

from collections.abc import Hashable, Iterator
from typing import TYPE_CHECKING, Any, Callable, Generic, Optional, TypeVar, cast

if TYPE_CHECKING:
    from tropembed.lattice import CrossingRecord, RationalPoint
    from tropembed.models import Failure, FailureCategory

T = TypeVar("T")
U = TypeVar("U")
K = TypeVar("K", bound=Hashable)


class Collection(Generic[T]):
    """Base collection class with common operations."""

    def __init__(self, items: list[T]):
        """Initialize collection with items."""
        self._items = items

    def __len__(self) -> int:
        """Return the number of items in the collection."""
        return len(self._items)

    def __iter__(self) -> Iterator[T]:
        """Iterate over items in the collection."""
        return iter(self._items)

    def __getitem__(self, index: int) -> T:
        """Get item by index."""
        return self._items[index]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Collection):
            return self._items == other._items
        if isinstance(other, list):
            return self._items == other
        return NotImplemented

    def __repr__(self) -> str:
        """String representation of the collection."""
        return f"{self.__class__.__name__}({len(self._items)} items)"

    @property
    def items(self) -> list[T]:
        """Get the underlying list of items."""
        return self._items

    def filter(self, predicate: Callable[[T], bool]) -> "Collection[T]":
        """Filter items using a predicate function.

        Args:
            predicate: Function that returns True for items to keep.

        Returns:
            New collection with filtered items.
        """
        return self.__class__([item for item in self._items if predicate(item)])

    def sort(
        self, key: Optional[Callable[[T], Any]] = None, reverse: bool = False
    ) -> "Collection[T]":
        """Sort items in the collection.

        Args:
            key: Optional key function for sorting.
            reverse: If True, sort in reverse order.

        Returns:
            New sorted collection.
        """
        if key is None:
            items = sorted(self._items, reverse=reverse)  # type: ignore[type-var]
        else:
            items = sorted(self._items, key=key, reverse=reverse)
        return self.__class__(items)

    def map(self, func: Callable[[T], U]) -> list[U]:
        """Map items using a function."""
        return [func(item) for item in self._items]

    def group_by(self, key_func: Callable[[T], K]) -> dict[K, "Collection[T]"]:
        """Group items by a key function, keeping first-seen key order.

        Args:
            key_func: Function that returns a hashable key for each item.

        Returns:
            Dictionary mapping keys to collections of items.
        """
        groups: dict[K, list[T]] = {}
        for item in self._items:
            groups.setdefault(key_func(item), []).append(item)
        return {k: self.__class__(v) for k, v in groups.items()}

    def first(self) -> Optional[T]:
        """Get the first item, or None if collection is empty."""
        return self._items[0] if self._items else None

    def any(self, predicate: Optional[Callable[[T], bool]] = None) -> bool:
        """Check if any item matches the predicate.

        Args:
            predicate: Optional predicate function. If None, checks if collection is non-empty.
        """
        if predicate is None:
            return len(self._items) > 0
        return any(predicate(item) for item in self._items)

    def to_list(self) -> list[T]:
        """Convert collection to a plain list."""
        return self._items.copy()


class CrossingCollection(Collection["CrossingRecord"]):
    """Crossing records with lookups by element and by point."""

    def involving(self, key: Hashable) -> "CrossingCollection":
        """Crossings in which ``key`` is one of the two elements."""
        return cast(
            "CrossingCollection", self.filter(lambda r: r.first == key or r.second == key)
        )

    def between(self, keys: set) -> "CrossingCollection":
        """Crossings whose two elements both belong to ``keys``."""
        return cast(
            "CrossingCollection", self.filter(lambda r: r.first in keys and r.second in keys)
        )

    def at_point(self, point: "RationalPoint") -> "CrossingCollection":
        return cast("CrossingCollection", self.filter(lambda r: r.point == point))

    def group_by_point(self) -> dict["RationalPoint", "CrossingCollection"]:
        """Group crossings by location; more than one record at a point means
        three or more elements meet there."""
        return cast(dict["RationalPoint", "CrossingCollection"], self.group_by(lambda r: r.point))

    def multiple_points(self) -> list["RationalPoint"]:
        """Points where more than two elements cross."""
        return [point for point, group in self.group_by_point().items() if len(group) > 1]

    def pairs(self) -> list[tuple[Hashable, Hashable]]:
        return self.map(lambda r: (r.first, r.second))


class FailureCollection(Collection["Failure"]):
    """Verification failures with lookups by category."""

    def by_category(self, category: "FailureCategory") -> "FailureCollection":
        return cast("FailureCollection", self.filter(lambda f: f.category == category))

    def categories(self) -> set["FailureCategory"]:
        return {f.category for f in self._items}

    def subjects(self, category: "FailureCategory") -> list[str]:
        """Subjects of the failures in one category, in report order."""
        return self.by_category(category).map(lambda f: f.subject)
