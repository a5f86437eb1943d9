"""Finite function classes and their image sets.

Members map the sample space into [0, 1], either as lookup tables over a
finite support or as parametric forms on values (threshold ramps and clipped
affine maps). The image of a class at a sample vector x is the finite set
{ (f(x_1), ..., f(x_n)) : f in class }, one row per member with duplicates
retained; complexity averages act on that set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rng import as_stream
from .spaces import FINITE, SampleSpace, SampleVector

_INTERVAL_GRID = 1000


@dataclass(frozen=True, eq=False)
class LookupMember:
    """Table of one value in [0, 1] per support point of a finite space."""

    label: str
    table: tuple[float, ...]

    def apply(self, values: np.ndarray, indices: np.ndarray | None) -> np.ndarray:
        if indices is None:
            raise DomainError(f"lookup member {self.label!r} needs a finite sample space")
        return np.asarray(self.table, dtype=np.float64)[indices]

    def on_support(self, space: SampleSpace) -> np.ndarray:
        if len(self.table) != space.size:
            raise DomainError(f"lookup member {self.label!r} does not match the support")
        return np.asarray(self.table, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class ThresholdMember:
    """x -> clamp((x - theta) / width, 0, 1); a ramp starting at theta."""

    label: str
    theta: float
    width: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise DomainError("threshold width must be positive")

    def apply(self, values: np.ndarray, indices: np.ndarray | None) -> np.ndarray:
        return np.clip((values - self.theta) / self.width, 0.0, 1.0)

    def on_support(self, space: SampleSpace) -> np.ndarray:
        return self.apply(space.support_values, None)


@dataclass(frozen=True, eq=False)
class AffineClippedMember:
    """x -> clamp(slope * x + intercept, 0, 1)."""

    label: str
    slope: float
    intercept: float

    def apply(self, values: np.ndarray, indices: np.ndarray | None) -> np.ndarray:
        return np.clip(self.slope * values + self.intercept, 0.0, 1.0)

    def on_support(self, space: SampleSpace) -> np.ndarray:
        return self.apply(space.support_values, None)


def lookup_member(label: str, space: SampleSpace, mapping: dict) -> LookupMember:
    """Build a lookup table from a label -> value mapping covering the support."""
    if space.kind != FINITE:
        raise DomainError("lookup members exist only on finite spaces")
    missing = [lab for lab in space.labels if lab not in mapping]
    if missing:
        raise DomainError(f"lookup table for {label!r} misses support labels {missing}")
    extra = [lab for lab in mapping if lab not in space.labels]
    if extra:
        raise DomainError(f"lookup table for {label!r} names unknown labels {extra}")
    return LookupMember(label, tuple(float(mapping[lab]) for lab in space.labels))


def constant_member(label: str, value: float) -> AffineClippedMember:
    return AffineClippedMember(label, 0.0, float(value))


def identity_member(label: str = "identity") -> AffineClippedMember:
    return AffineClippedMember(label, 1.0, 0.0)


@dataclass(frozen=True, eq=False)
class FunctionClass:
    """A finite, explicitly enumerable class of [0, 1]-valued functions."""

    space: SampleSpace
    members: tuple

    def __post_init__(self):
        if len(self.members) == 0:
            raise DomainError("a function class needs at least one member")
        labels = [m.label for m in self.members]
        if len(set(labels)) != len(labels):
            raise DomainError("member labels must be unique")
        # Range check: exhaustive on finite supports, on a grid for the interval.
        if self.space.kind == FINITE:
            for m in self.members:
                out = m.on_support(self.space)
                if np.any(out < 0.0) or np.any(out > 1.0):
                    raise DomainError(f"member {m.label!r} leaves [0, 1] on the support")
        else:
            grid = np.linspace(0.0, 1.0, _INTERVAL_GRID + 1)
            for m in self.members:
                if isinstance(m, LookupMember):
                    raise DomainError("lookup members exist only on finite spaces")
                out = m.apply(grid, None)
                if np.any(out < 0.0) or np.any(out > 1.0):
                    raise DomainError(f"member {m.label!r} leaves [0, 1] on the grid")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def image_matrix(self, x: SampleVector) -> np.ndarray:
        """(|class|, n) matrix of member images at x."""
        if x.space != self.space:
            raise DomainError("sample vector lives in a different sample space")
        return np.stack([m.apply(x.values, x.indices) for m in self.members])

    def support_matrix(self) -> np.ndarray:
        """(|class|, support size) member values per support point."""
        if self.space.kind != FINITE:
            raise DomainError("support matrix exists only for finite spaces")
        return np.stack([m.on_support(self.space) for m in self.members])

    def subclass(self, labels) -> "FunctionClass":
        wanted = list(labels)
        by_label = {m.label: m for m in self.members}
        missing = [lab for lab in wanted if lab not in by_label]
        if missing:
            raise DomainError(f"unknown member labels {missing}")
        return FunctionClass(self.space, tuple(by_label[lab] for lab in wanted))


@dataclass(frozen=True, eq=False)
class ClassImage:
    """The image set F(x): one row per member, labels retained."""

    vectors: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.labels):
            raise DomainError("image matrix must have one row per label")


def class_image(fc: FunctionClass, x: SampleVector) -> ClassImage:
    """Image set of the class at x; duplicates retained with their labels."""
    return ClassImage(fc.image_matrix(x), fc.labels)


def separation_labels(group_sizes) -> np.ndarray:
    """Sign matrix for the class-separation functional.

    Entry (i, j) is +1 when i and j fall in the same group block and -1
    across blocks; the diagonal is unused and set to +1.
    """
    sizes = [int(g) for g in group_sizes]
    if len(sizes) == 0:
        raise DomainError("group sizes must be a non-empty list")
    if any(g < 1 for g in sizes):
        raise DomainError("group sizes must be positive")
    n = sum(sizes)
    r = -np.ones((n, n), dtype=np.float64)
    start = 0
    for g in sizes:
        r[start : start + g, start : start + g] = 1.0
        start += g
    return r


def random_lookup_class(space: SampleSpace, count: int, seed) -> FunctionClass:
    """``count`` lookup tables with independent uniform [0, 1] entries."""
    if space.kind != FINITE:
        raise DomainError("random lookup classes need a finite space")
    if count < 1:
        raise DomainError("count must be positive")
    rng = as_stream(seed, "random-lookup-class")
    tables = rng.random((count, space.size))
    width = max(2, len(str(count - 1)))
    members = tuple(
        LookupMember(f"f{j:0{width}d}", tuple(float(v) for v in tables[j]))
        for j in range(count)
    )
    return FunctionClass(space, members)
