"""Shared vocabulary: finite integer sets, representation vectors, run parameters.

All counting modules work on a finite window [1, N].  An ``IntegerSet`` is a
strictly increasing set of positive integers together with the window it is
valid on; a ``RepVector`` is one canonical (non-decreasing) representation of
an integer as an ordered sum.  ``Params`` bundles the sampling order h, the
inclusion exponent alpha as an exact rational, the window and the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np


class SidonLabError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SidonLabError, ValueError):
    """Bad input: violates a documented precondition."""


class InternalConsistencyError(SidonLabError, AssertionError):
    """A production-asserted identity failed; indicates a kernel bug."""


class BudgetExceededError(SidonLabError, RuntimeError):
    """An enumeration or solver exceeded its configured budget.

    ``partial`` carries whatever was produced before the budget ran out, so
    callers can fall back to a non-certified lower bound.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegerSet:
    """Strictly increasing set of positive integers on a window [1, window_max].

    Membership is O(1) via a dense boolean table; the sorted element array is
    kept alongside for iteration and slicing.  Instances are immutable.
    """

    __slots__ = ("elements", "window_max", "_mask")

    def __init__(self, elements: np.ndarray, window_max: int, _mask: np.ndarray | None = None):
        self.elements = elements
        self.window_max = int(window_max)
        if _mask is None:
            _mask = np.zeros(self.window_max + 1, dtype=bool)
            _mask[elements] = True
        self._mask = _mask
        self.elements.setflags(write=False)
        self._mask.setflags(write=False)

    def __contains__(self, n: int) -> bool:
        return 1 <= n <= self.window_max and bool(self._mask[n])

    def __len__(self) -> int:
        return int(self.elements.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegerSet):
            return NotImplemented
        return self.window_max == other.window_max and np.array_equal(self.elements, other.elements)

    def __hash__(self) -> int:
        return hash((self.window_max, self.elements.tobytes()))

    def __repr__(self) -> str:
        head = ",".join(str(e) for e in self.elements[:8].tolist())
        tail = ",..." if len(self) > 8 else ""
        return f"IntegerSet({{{head}{tail}}}, |A|={len(self)}, window={self.window_max})"

    @property
    def mask(self) -> np.ndarray:
        """Boolean membership table indexed by value, length window_max + 1."""
        return self._mask

    def min_element(self) -> int:
        if len(self) == 0:
            raise ValidationError("empty set has no minimum")
        return int(self.elements[0])

    def max_element(self) -> int:
        if len(self) == 0:
            raise ValidationError("empty set has no maximum")
        return int(self.elements[-1])

    def tail(self, m: int) -> "IntegerSet":
        """The set minus its prefix: A \\ [1, m], on the same window."""
        keep = self.elements[self.elements > m]
        return IntegerSet(keep.copy(), self.window_max)

    def prefix(self, m: int) -> list[int]:
        """Elements <= m, as a plain list."""
        return self.elements[self.elements <= m].tolist()

    def restrict(self, window_max: int) -> "IntegerSet":
        """Truncate to a smaller window, dropping elements above it."""
        if window_max > self.window_max:
            raise ValidationError("restrict() cannot grow the window")
        keep = self.elements[self.elements <= window_max]
        return IntegerSet(keep.copy(), window_max)

    def with_element(self, value: int) -> "IntegerSet":
        """A new set with one extra element (window grows if needed)."""
        merged = sorted(set(self.elements.tolist()) | {int(value)})
        return make_set(merged, max(self.window_max, int(value)))

    def to_list(self) -> list[int]:
        return self.elements.tolist()


def make_set(elements: Iterable[int], window_max: int) -> IntegerSet:
    """Build a canonical IntegerSet: sorted, deduplicated, validated.

    Rejects nonpositive elements and elements above the window.
    """
    window_max = int(window_max)
    if window_max < 0:
        raise ValidationError(f"window_max must be >= 0, got {window_max}")
    arr = np.unique(np.asarray(list(elements), dtype=np.int64))
    if arr.size:
        if int(arr[0]) < 1:
            raise ValidationError(f"elements must be positive, got {int(arr[0])}")
        if int(arr[-1]) > window_max:
            raise ValidationError(
                f"element {int(arr[-1])} exceeds window_max {window_max}"
            )
    return IntegerSet(arr, window_max)


@dataclass(frozen=True)
class RepVector:
    """One canonical representation: a non-decreasing tuple of h >= 2 positive integers.

    ``support()`` is the deduplicated coordinate set, so a vector with repeated
    coordinates has support strictly smaller than its order.
    """

    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) < 2:
            raise ValidationError("representation order must be >= 2")
        if self.coords[0] < 1:
            raise ValidationError("coordinates must be positive")
        if any(a > b for a, b in zip(self.coords, self.coords[1:])):
            raise ValidationError(f"coordinates must be non-decreasing: {self.coords}")

    @property
    def order(self) -> int:
        return len(self.coords)

    @property
    def total(self) -> int:
        """The represented integer (coordinate sum)."""
        return sum(self.coords)

    def support(self) -> frozenset[int]:
        return frozenset(self.coords)


def support(v: RepVector) -> frozenset[int]:
    """Deduplicated coordinate set of a representation vector."""
    return v.support()


@dataclass(frozen=True)
class Params:
    """Run parameters: order h, exact rational inclusion exponent, window, seed.

    ``preset(h, ...)`` fixes alpha = 2/(4h+1), the value under which the random
    construction works; arbitrary rationals in (0, 1] are allowed for
    exploratory runs.
    """

    h: int
    alpha: Fraction
    N: int
    seed: int = 0

    def __post_init__(self):
        if self.h < 2:
            raise ValidationError(f"h must be >= 2, got {self.h}")
        if not (0 < self.alpha <= 1):
            raise ValidationError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.N < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        if not (0 <= self.seed < 2**64):
            raise ValidationError("seed must fit in 64 bits")

    @classmethod
    def preset(cls, h: int, N: int, seed: int = 0) -> "Params":
        """The canonical parameterization alpha = 2/(4h+1)."""
        return cls(h=h, alpha=Fraction(2, 4 * h + 1), N=N, seed=seed)

    def exponent(self, k: int, s: int = 1) -> Fraction:
        """Exact rational (k*alpha - 1) * s."""
        return (k * self.alpha - 1) * s

    @property
    def is_preset(self) -> bool:
        return self.alpha == Fraction(2, 4 * self.h + 1)
