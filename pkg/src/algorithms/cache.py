"""Thread-safe memo tables for characteristic values, coefficients and joining factors."""

import threading
from typing import Callable, Dict, Generic, Hashable, List, Tuple, TypeVar

T = TypeVar("T")


def complex_key(q: complex) -> Tuple[str, str]:
    """Exact bit-pattern key for a complex parameter (distinguishes -0.0)."""
    q = complex(q)
    return (q.real.hex(), q.imag.hex())


class ResultCache(Generic[T]):
    """Bounded dictionary cache guarded by a lock.

    Values are computed outside the lock; when two threads race on the same
    key the first stored value wins, so every caller observes one result.
    """

    def __init__(self, name: str, max_entries: int = 4096) -> None:
        """Initialize an empty cache.

        Args:
            name: Label used in debugging output
            max_entries: Oldest entries are evicted beyond this size
        """
        self.name = name
        self.max_entries = max_entries
        self._entries: Dict[Hashable, T] = {}
        self._order: List[Hashable] = []
        self._lock = threading.Lock()

    def get_or_compute(self, key: Hashable, factory: Callable[[], T]) -> T:
        """Return the stored value for key, calling factory on a miss.

        Args:
            key: Hashable cache key
            factory: Zero-argument callable producing the value

        Returns:
            The first value stored under key
        """
        with self._lock:
            if key in self._entries:
                return self._entries[key]

        value = factory()

        with self._lock:
            if key in self._entries:
                return self._entries[key]
            self._entries[key] = value
            self._order.append(key)
            while len(self._order) > self.max_entries:
                del self._entries[self._order.pop(0)]
            return value

    def clear(self) -> None:
        """Drop every entry."""
        with self._lock:
            self._entries.clear()
            self._order.clear()

    def __len__(self) -> int:
        """Number of stored entries."""
        with self._lock:
            return len(self._entries)

    def __repr__(self) -> str:
        """Name and fill level, for debugging."""
        return f"ResultCache({self.name}, {len(self)}/{self.max_entries} entries)"
