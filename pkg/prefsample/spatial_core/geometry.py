from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class Point2:
    """A location s = (s1, s2) in the spatial domain"""
    s1: float
    s2: float

    def __post_init__(self):
        if not (np.isfinite(self.s1) and np.isfinite(self.s2)):
            raise ValueError(f"Point coordinates must be finite, got ({self.s1}, {self.s2})")

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2], dtype=float)

    def __str__(self):
        return f"({self.s1:g}, {self.s2:g})"


PointsLike = Union[np.ndarray, Sequence[Point2], Sequence[Sequence[float]]]


def as_points(points: Union[PointsLike, Point2]) -> np.ndarray:
    """
    Convert a Point2, a list of Point2 or any (n, 2) array-like into an (n, 2) float array.
    """
    if isinstance(points, Point2):
        return points.as_array()[None, :]
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        points = list(points)
        if len(points) == 0:
            return np.empty((0, 2))
        if isinstance(points[0], Point2):
            arr = np.array([[p.s1, p.s2] for p in points], dtype=float)
        else:
            arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.shape[0] == 2:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"Expected an (n, 2) array of points, got shape {arr.shape}")
    return arr


def to_point_list(points: np.ndarray) -> list:
    """(n, 2) array -> list of Point2"""
    return [Point2(float(a), float(b)) for a, b in as_points(points)]


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle [min1, max1] x [min2, max2]"""
    min1: float
    max1: float
    min2: float
    max2: float

    def __post_init__(self):
        values = (self.min1, self.max1, self.min2, self.max2)
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"Domain bounds must be finite, got {values}")
        if not (self.max1 > self.min1 and self.max2 > self.min2):
            raise ValueError(f"Domain must have max > min on both axes, got {values}")

    @classmethod
    def unit_square(cls) -> "RectDomain":
        return cls(0.0, 1.0, 0.0, 1.0)

    @property
    def width1(self) -> float:
        return self.max1 - self.min1

    @property
    def width2(self) -> float:
        return self.max2 - self.min2

    @property
    def area(self) -> float:
        return self.width1 * self.width2

    def expand(self, fraction: float) -> "RectDomain":
        """Grow the rectangle by fraction of its width on every side"""
        d1 = fraction * self.width1
        d2 = fraction * self.width2
        return RectDomain(self.min1 - d1, self.max1 + d1, self.min2 - d2, self.max2 + d2)

    def contains(self, points: PointsLike) -> np.ndarray:
        pts = as_points(points)
        return ((pts[:, 0] >= self.min1) & (pts[:, 0] <= self.max1)
                & (pts[:, 1] >= self.min2) & (pts[:, 1] <= self.max2))

    def contains_domain(self, other: "RectDomain") -> bool:
        return (self.min1 <= other.min1 and other.max1 <= self.max1
                and self.min2 <= other.min2 and other.max2 <= self.max2)

    def uniform_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """count points uniformly distributed over the rectangle"""
        u = rng.random((count, 2))
        return np.column_stack([self.min1 + u[:, 0] * self.width1,
                                self.min2 + u[:, 1] * self.width2])


@dataclass(frozen=True)
class RegularGrid:
    """
    n1 x n2 cells covering a domain, represented by the cell centers.
    Centers are ordered with s1 varying fastest: index k = j * n1 + i.
    """
    domain: RectDomain
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError(f"Grid needs at least one cell per axis, got {self.n1}x{self.n2}")

    @classmethod
    def square(cls, domain: RectDomain, size: int) -> "RegularGrid":
        return cls(domain, size, size)

    @property
    def spacing1(self) -> float:
        return self.domain.width1 / self.n1

    @property
    def spacing2(self) -> float:
        return self.domain.width2 / self.n2

    @property
    def cell_area(self) -> float:
        return self.spacing1 * self.spacing2

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    @property
    def axis1(self) -> np.ndarray:
        return self.domain.min1 + (np.arange(self.n1) + 0.5) * self.spacing1

    @property
    def axis2(self) -> np.ndarray:
        return self.domain.min2 + (np.arange(self.n2) + 0.5) * self.spacing2

    @cached_property
    def centers(self) -> np.ndarray:
        c1, c2 = np.meshgrid(self.axis1, self.axis2, indexing="xy")
        return np.column_stack([c1.ravel(), c2.ravel()])

    def as_image(self, values: np.ndarray) -> np.ndarray:
        """Reshape per-center values into an (n2, n1) array (row = s2 index)"""
        values = np.asarray(values)
        if values.shape[0] != self.size:
            raise ValueError(f"Expected {self.size} values, got {values.shape[0]}")
        return values.reshape(self.n2, self.n1)

    def __str__(self):
        return f"RegularGrid({self.n1}x{self.n2} over {self.domain})"
