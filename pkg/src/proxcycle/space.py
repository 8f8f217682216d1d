"""Normed-space primitives.

Vectors are sparse index -> value maps so the same type serves finite
dimensional spaces and summable sequence spaces.  A space spec pins the
norm, the mode (dense with a dimension bound, or unbounded sequence) and,
for dense mode, the dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

# Global inequality slack.  Every check that compares two real quantities
# accepts an override; this is only the default.
TOL_NUM = 1e-9

NORMS = ("l1", "l2", "lp", "linf")
MODES = ("dense", "sequence")


class SpaceError(ValueError):
    pass


class DimensionMismatch(SpaceError):
    pass


class ModulusUnavailable(SpaceError):
    pass


def _clean(items: Iterable[tuple[int, float]]) -> tuple[tuple[int, float], ...]:
    out = []
    for i, v in items:
        i = int(i)
        v = float(v)
        if i < 0:
            raise SpaceError(f"negative coordinate index {i}")
        if v != 0.0:
            out.append((i, v))
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class Vector:
    """Sparse vector: sorted (index, value) pairs, no explicit zeros."""

    coords: tuple[tuple[int, float], ...] = ()

    @staticmethod
    def from_map(m: Mapping[int, float]) -> "Vector":
        return Vector(_clean(m.items()))

    @staticmethod
    def dense(values: Iterable[float]) -> "Vector":
        return Vector(_clean(enumerate(values)))

    @staticmethod
    def zero() -> "Vector":
        return Vector(())

    def as_map(self) -> dict[int, float]:
        return dict(self.coords)

    def value_at(self, i: int) -> float:
        for j, v in self.coords:
            if j == i:
                return v
        return 0.0

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coords)

    def max_index(self) -> int:
        return self.coords[-1][0] if self.coords else -1

    def __add__(self, other: "Vector") -> "Vector":
        m = dict(self.coords)
        for i, v in other.coords:
            m[i] = m.get(i, 0.0) + v
        return Vector(_clean(m.items()))

    def __sub__(self, other: "Vector") -> "Vector":
        m = dict(self.coords)
        for i, v in other.coords:
            m[i] = m.get(i, 0.0) - v
        return Vector(_clean(m.items()))

    def scale(self, c: float) -> "Vector":
        return Vector(_clean((i, c * v) for i, v in self.coords))

    def __mul__(self, c: float) -> "Vector":
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self) -> "Vector":
        return self.scale(-1.0)


def basis(i: int) -> Vector:
    """Canonical basis vector with a single 1 at index i."""
    return Vector.from_map({i: 1.0})


@dataclass(frozen=True)
class NormedSpaceSpec:
    """Which norm, dense or sequence mode, and the dense dimension bound."""

    norm: str = "l2"
    mode: str = "dense"
    dimension: int | None = 1
    p: float | None = None

    def __post_init__(self):
        if self.norm not in NORMS:
            raise SpaceError(f"unknown norm {self.norm!r}")
        if self.mode not in MODES:
            raise SpaceError(f"unknown mode {self.mode!r}")
        if self.mode == "dense":
            if self.dimension is None or self.dimension < 1:
                raise SpaceError("dense mode needs dimension >= 1")
        elif self.dimension is not None:
            raise SpaceError("sequence mode takes no dimension bound")
        if self.norm == "lp":
            if self.p is None or not (1.0 < self.p < math.inf):
                raise SpaceError("lp norm needs finite p > 1")
        elif self.p is not None:
            raise SpaceError("p is only meaningful for the lp norm")

    @property
    def modulus_available(self) -> bool:
        # uniformly convex: l2 and lp for 1 < p < inf; l1 and linf are not
        return self.norm in ("l2", "lp")

    def validate(self, v: Vector) -> None:
        if self.mode == "dense" and v.max_index() >= self.dimension:
            raise DimensionMismatch(
                f"index {v.max_index()} out of range for dimension {self.dimension}"
            )


def norm(space: NormedSpaceSpec, v: Vector) -> float:
    """Norm of v under the space's declared norm.

    Dense mode rejects vectors whose support exceeds the dimension bound.
    """
    space.validate(v)
    vals = [v for _, v in v.coords]
    if not vals:
        return 0.0
    if space.norm == "l1":
        return float(sum(abs(x) for x in vals))
    if space.norm == "l2":
        return math.hypot(*vals)
    if space.norm == "linf":
        return float(max(abs(x) for x in vals))
    # scale by the largest entry so x**p cannot under- or overflow
    m = max(abs(x) for x in vals)
    if m == 0.0:
        return 0.0
    return float(m * sum((abs(x) / m) ** space.p for x in vals) ** (1.0 / space.p))


@dataclass(frozen=True)
class ProductPoint:
    """Ordered pair (first, second) of vectors in the same underlying space."""

    first: Vector
    second: Vector

    def __sub__(self, other: "ProductPoint") -> "ProductPoint":
        return ProductPoint(self.first - other.first, self.second - other.second)

    def swap(self) -> "ProductPoint":
        return ProductPoint(self.second, self.first)


def product_norm(space: NormedSpaceSpec, pair: ProductPoint) -> float:
    """Max norm on the product: max of the component norms."""
    return max(norm(space, pair.first), norm(space, pair.second))


def pair_distance(space: NormedSpaceSpec, p: ProductPoint, q: ProductPoint) -> float:
    return product_norm(space, p - q)


def convexity_modulus(space: NormedSpaceSpec, eps: float) -> float:
    """Modulus of uniform convexity delta(eps) for eps in (0, 2].

    Only the l2 modulus ships in exact form.  l1 and linf are not uniformly
    convex; lp with p != 2 is uniformly convex but no exact modulus is
    bundled, so both cases raise ModulusUnavailable.
    """
    if not (0.0 < eps <= 2.0):
        raise SpaceError(f"modulus argument {eps} outside (0, 2]")
    if space.norm == "l2":
        return 1.0 - math.sqrt(1.0 - (eps / 2.0) ** 2)
    if space.norm == "lp":
        raise ModulusUnavailable("no exact modulus bundled for lp with p != 2")
    raise ModulusUnavailable(f"{space.norm} is not uniformly convex")


def midpoint_defect_check(
    space: NormedSpaceSpec,
    x: Vector,
    y: Vector,
    z: Vector,
    r: float,
    R: float,
    tol: float = TOL_NUM,
) -> bool:
    """Uniform-convexity midpoint bound.

    With ||x-z|| <= R, ||y-z|| <= R and ||x-y|| >= r, uniform convexity
    forces the midpoint of x and y within (1 - delta(r/R)) * R of z.
    Returns whether that bound holds (with tol slack).  Precondition
    violations raise, naming the failed bound.
    """
    if not space.modulus_available:
        raise ModulusUnavailable(f"{space.norm} has no convexity modulus")
    if not (0.0 < r <= 2.0 * R):
        raise SpaceError(f"need 0 < r <= 2R, got r={r}, R={R}")
    dxz = norm(space, x - z)
    dyz = norm(space, y - z)
    dxy = norm(space, x - y)
    if dxz > R + tol:
        raise SpaceError(f"precondition ||x-z|| <= R failed: {dxz} > {R}")
    if dyz > R + tol:
        raise SpaceError(f"precondition ||y-z|| <= R failed: {dyz} > {R}")
    if dxy < r - tol:
        raise SpaceError(f"precondition ||x-y|| >= r failed: {dxy} < {r}")
    mid = (x + y).scale(0.5)
    bound = (1.0 - convexity_modulus(space, r / R)) * R
    return norm(space, mid - z) <= bound + tol
