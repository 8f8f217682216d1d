"""Cyclic maps on a pair of convex sets, with sampled inequality checks.

A cyclic map sends A x B into B and B x A into A.  The checkers sample
point pairs and test the contraction-style inequalities that the
iteration and certification layers rely on; each returns a CheckReport
whose violations carry printable witnesses.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .report import CheckReport, Violation, conclude, render_pair, render_vector
from .sets import Box, ConvexSet, contains, l1_example_sets, sample
from .space import (
    TOL_NUM,
    NormedSpaceSpec,
    ProductPoint,
    Vector,
    norm,
    pair_distance,
    product_norm,
)

SIDE_AB = "AB"
SIDE_BA = "BA"


class MapsError(ValueError):
    pass


class DomainError(MapsError):
    """Input (or iterate) left the set it is required to lie in."""


def flip_side(side: str) -> str:
    if side == SIDE_AB:
        return SIDE_BA
    if side == SIDE_BA:
        return SIDE_AB
    raise MapsError(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# phi specifications

@dataclass(frozen=True)
class PhiSpec:
    """Strictly increasing gauge phi: [0, inf) -> [0, inf).

    variant "linear": phi(t) = (1 - lam) * t for a contraction constant
    lam in [0, 1).  variant "half": phi(t) = t / 2.  variant "custom":
    piecewise-linear interpolation of a strictly increasing breakpoint
    table starting at t = 0, extrapolated with the final slope.
    """

    variant: str
    lam: float | None = None
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.variant == "linear":
            if self.lam is None or not (0.0 <= self.lam < 1.0):
                raise MapsError("linear phi needs lam in [0, 1)")
        elif self.variant == "half":
            pass
        elif self.variant == "custom":
            if len(self.table) < 2:
                raise MapsError("custom phi needs at least two breakpoints")
            if self.table[0][0] != 0.0:
                raise MapsError("custom phi table must start at t = 0")
            if self.table[0][1] < 0.0:
                raise MapsError("phi must be nonnegative")
            for (t0, f0), (t1, f1) in zip(self.table, self.table[1:]):
                if t1 <= t0 or f1 <= f0:
                    raise MapsError("custom phi table must be strictly increasing")
        else:
            raise MapsError(f"unknown phi variant {self.variant!r}")

    @staticmethod
    def linear(lam: float) -> "PhiSpec":
        return PhiSpec("linear", lam=lam)

    @staticmethod
    def half() -> "PhiSpec":
        return PhiSpec("half")

    @staticmethod
    def custom(table) -> "PhiSpec":
        return PhiSpec("custom", table=tuple((float(t), float(f)) for t, f in table))

    def __call__(self, t: float) -> float:
        if t < 0.0:
            raise MapsError(f"phi argument {t} < 0")
        if self.variant == "linear":
            return (1.0 - self.lam) * t
        if self.variant == "half":
            return 0.5 * t
        pts = self.table
        if t >= pts[-1][0]:
            (t0, f0), (t1, f1) = pts[-2], pts[-1]
            return f1 + (t - t1) * (f1 - f0) / (t1 - t0)
        for (t0, f0), (t1, f1) in zip(pts, pts[1:]):
            if t <= t1:
                return f0 + (t - t0) * (f1 - f0) / (t1 - t0)
        return pts[-1][1]


# ---------------------------------------------------------------------------
# map specification

@dataclass(frozen=True)
class CyclicMapSpec:
    label: str
    space: NormedSpaceSpec
    A: ConvexSet
    B: ConvexSet
    evaluator: Callable[[Vector, Vector, str], Vector]
    declared_class: str = "none"
    declared_dist: float | None = None
    phi: PhiSpec | None = None

    def domain_sets(self, side: str) -> tuple[ConvexSet, ConvexSet]:
        return (self.A, self.B) if side == SIDE_AB else (self.B, self.A)


def eval_map(T: CyclicMapSpec, x: Vector, y: Vector, side: str,
             tol: float = TOL_NUM, check_domain: bool = True) -> Vector:
    """Evaluate T(x, y) on the given side.

    side "AB" requires (x, y) in A x B, side "BA" requires (x, y) in B x A.
    Image membership is not re-verified here; see check_cyclic_invariance.
    """
    if check_domain:
        SX, SY = T.domain_sets(side)
        if not contains(SX, T.space, x, tol):
            raise DomainError(f"{render_vector(x)} not in the {side[0]} set")
        if not contains(SY, T.space, y, tol):
            raise DomainError(f"{render_vector(y)} not in the {side[1]} set")
    return T.evaluator(x, y, side)


def coupled_image(T: CyclicMapSpec, p: ProductPoint, side: str,
                  check_domain: bool = False) -> ProductPoint:
    """(T(x, y), T(y, x)) for p = (x, y) on the given side."""
    return ProductPoint(
        eval_map(T, p.first, p.second, side, check_domain=check_domain),
        eval_map(T, p.second, p.first, flip_side(side), check_domain=check_domain),
    )


def displacement(T: CyclicMapSpec, p: ProductPoint, side: str) -> float:
    """Product distance from p to its coupled image."""
    return pair_distance(T.space, p, coupled_image(T, p, side))


def _sample_side(T: CyclicMapSpec, side: str, n: int, seed: int) -> list[ProductPoint]:
    SX, SY = T.domain_sets(side)
    xs = sample(SX, T.space, n, seed=seed)
    ys = sample(SY, T.space, n, seed=seed + 7919)
    return [ProductPoint(x, y) for x, y in zip(xs, ys)]


# ---------------------------------------------------------------------------
# checkers

def check_cyclic_invariance(T: CyclicMapSpec, n_samples: int = 200, seed: int = 0,
                            tol: float = TOL_NUM) -> CheckReport:
    """T must send A x B into B and B x A into A (sampled)."""
    violations: list[Violation] = []
    checked = 0
    for side, target_label in ((SIDE_AB, "B"), (SIDE_BA, "A")):
        target = T.B if side == SIDE_AB else T.A
        for p in _sample_side(T, side, n_samples, seed):
            img = eval_map(T, p.first, p.second, side, check_domain=False)
            checked += 1
            if not contains(target, T.space, img, tol):
                violations.append(Violation(
                    (render_pair(p), render_vector(img)),
                    1.0, 0.0, 1.0,
                    note=f"{side}-side image left the {target_label} set",
                ))
    return conclude("cyclic_invariance", checked, violations)


def _phi_pair_violations(T: CyclicMapSpec, phi: PhiSpec, p: ProductPoint, side: str,
                         q: ProductPoint, d: float, tol: float) -> list[Violation]:
    # q lies on the flipped side; both component images obey the same bound
    other = flip_side(side)
    delta = pair_distance(T.space, p, q)
    rhs = delta - phi(delta) + phi(d)
    out = []
    pairs = (
        (eval_map(T, p.first, p.second, side, check_domain=False),
         eval_map(T, q.first, q.second, other, check_domain=False), "first"),
        (eval_map(T, p.second, p.first, other, check_domain=False),
         eval_map(T, q.second, q.first, side, check_domain=False), "second"),
    )
    for img_p, img_q, component in pairs:
        lhs = norm(T.space, img_p - img_q)
        if lhs > rhs + tol:
            out.append(Violation(
                (render_pair(p), render_pair(q)),
                lhs, rhs, lhs - rhs,
                note=f"{component}-component image pair broke the phi bound",
            ))
    return out


def _require_dist(T: CyclicMapSpec) -> float:
    if T.declared_dist is None:
        raise MapsError("this check needs the pair distance declared on the map spec")
    return T.declared_dist


def check_phi_contraction(T: CyclicMapSpec, phi: PhiSpec, n_samples: int = 1000,
                          seed: int = 0, quantification: str = "all_cross_pairs",
                          n_starts: int = 5, n_steps: int = 20,
                          tol: float = TOL_NUM) -> CheckReport:
    """Sampled phi-contraction inequality.

    For a pair p in A x B and q in B x A the image distance must not
    exceed ||p - q|| - phi(||p - q||) + phi(dist(A, B)).  Quantification
    "all_cross_pairs" samples independent cross-side pairs;
    "consecutive_iterates" restricts to consecutive points of sampled
    trajectories, which is the weaker reading.
    """
    d = _require_dist(T)
    violations: list[Violation] = []
    checked = 0
    if quantification == "all_cross_pairs":
        ps = _sample_side(T, SIDE_AB, n_samples, seed)
        qs = _sample_side(T, SIDE_BA, n_samples, seed + 104729)
        for p, q in zip(ps, qs):
            violations.extend(_phi_pair_violations(T, phi, p, SIDE_AB, q, d, tol))
            checked += 2
    elif quantification == "consecutive_iterates":
        starts = _sample_side(T, SIDE_AB, n_starts, seed)
        for p in starts:
            side = SIDE_AB
            for _ in range(n_steps):
                q = coupled_image(T, p, side)
                violations.extend(_phi_pair_violations(T, phi, p, side, q, d, tol))
                checked += 2
                p, side = q, flip_side(side)
    else:
        raise MapsError(f"unknown quantification {quantification!r}")
    return conclude("phi_contraction", checked, violations,
                    detail=f"quantification={quantification}")


def check_kannan(T: CyclicMapSpec, n_samples: int = 1000, seed: int = 0,
                 tol: float = TOL_NUM) -> CheckReport:
    """Kannan-type nonexpansiveness on sampled same-side and cross-side pairs.

    Image distance of two inputs must not exceed half the sum of their
    coupled displacements.
    """
    violations: list[Violation] = []
    checked = 0
    half = n_samples // 2
    combos = [
        (SIDE_AB, SIDE_BA, n_samples - half),  # cross side
        (SIDE_AB, SIDE_AB, half - half // 2),  # same side
        (SIDE_BA, SIDE_BA, half // 2),
    ]
    for side1, side2, count in combos:
        ps = _sample_side(T, side1, count, seed)
        qs = _sample_side(T, side2, count, seed + 15485863)
        for p, q in zip(ps, qs):
            lhs = norm(T.space,
                       eval_map(T, p.first, p.second, side1, check_domain=False)
                       - eval_map(T, q.first, q.second, side2, check_domain=False))
            rhs = 0.5 * (displacement(T, p, side1) + displacement(T, q, side2))
            checked += 1
            if lhs > rhs + tol:
                violations.append(Violation(
                    (render_pair(p), render_pair(q)), lhs, rhs, lhs - rhs,
                    note=f"sides {side1}/{side2}",
                ))
    return conclude("kannan", checked, violations)


def check_kannan_strict_hypothesis(T: CyclicMapSpec, n_samples: int = 500,
                                   seed: int = 0, tol: float = TOL_NUM) -> CheckReport:
    """Strict displacement decrease away from the pair distance.

    Whenever a sampled point's coupled displacement exceeds dist(A, B),
    the displacement of its coupled image must be strictly smaller.
    """
    d = _require_dist(T)
    violations: list[Violation] = []
    checked = 0
    for side in (SIDE_AB, SIDE_BA):
        for p in _sample_side(T, side, n_samples // 2, seed):
            d0 = displacement(T, p, side)
            if d0 <= d + tol:
                continue
            q = coupled_image(T, p, side)
            d1 = displacement(T, q, flip_side(side))
            checked += 1
            if d1 >= d0 - tol:
                violations.append(Violation(
                    (render_pair(p),), d1, d0, d1 - d0,
                    note="coupled image displacement failed to decrease strictly",
                ))
    return conclude("kannan_strict_hypothesis", checked, violations)


# ---------------------------------------------------------------------------
# builtin map registry

def interval_contraction() -> CyclicMapSpec:
    """Linear contraction between [1, 2] and [-2, -1] on the real line."""
    space = NormedSpaceSpec(norm="l2", mode="dense", dimension=1)
    A = Box((1.0,), (2.0,))
    B = Box((-2.0,), (-1.0,))

    def ev(x: Vector, y: Vector, side: str) -> Vector:
        u, v = x.value_at(0), y.value_at(0)
        shift = 0.5 if side == SIDE_BA else -0.5
        return Vector.dense([(v - u) / 4.0 + shift])

    return CyclicMapSpec("interval_contraction", space, A, B, ev,
                         declared_class="phi_contraction", declared_dist=2.0,
                         phi=PhiSpec.linear(0.5))


def overlap_contraction() -> CyclicMapSpec:
    """Contraction on a single interval (A = B), distance zero."""
    space = NormedSpaceSpec(norm="l2", mode="dense", dimension=1)
    box = Box((0.0,), (1.0,))

    def ev(x: Vector, y: Vector, side: str) -> Vector:
        return Vector.dense([(x.value_at(0) + y.value_at(0)) / 4.0])

    return CyclicMapSpec("overlap_contraction", space, box, box, ev,
                         declared_class="phi_contraction", declared_dist=0.0,
                         phi=PhiSpec.linear(0.5))


def l1_kannan() -> CyclicMapSpec:
    """Constant-by-side map between the paired-block hulls in l1.

    Kannan-type nonexpansive; its best proximity points are not unique.
    """
    from .space import basis

    space = NormedSpaceSpec(norm="l1", mode="sequence", dimension=None)
    A, B, _declared = l1_example_sets()
    to_b = basis(2) + basis(3)
    to_a = basis(1) + basis(2)

    def ev(x: Vector, y: Vector, side: str) -> Vector:
        return to_b if side == SIDE_AB else to_a

    return CyclicMapSpec("l1_kannan", space, A, B, ev,
                         declared_class="kannan", declared_dist=2.0)


def flip_map() -> CyclicMapSpec:
    """Negative control: cyclic but not contractive (T(u, v) = -u)."""
    space = NormedSpaceSpec(norm="l2", mode="dense", dimension=1)
    A = Box((1.0,), (2.0,))
    B = Box((-2.0,), (-1.0,))

    def ev(x: Vector, y: Vector, side: str) -> Vector:
        return Vector.dense([-x.value_at(0)])

    return CyclicMapSpec("flip", space, A, B, ev,
                         declared_class="none", declared_dist=2.0)


def non_cyclic_control() -> CyclicMapSpec:
    """Negative control: T(u, v) = u keeps each side in place, breaking cyclicity."""
    space = NormedSpaceSpec(norm="l2", mode="dense", dimension=1)
    A = Box((1.0,), (2.0,))
    B = Box((-2.0,), (-1.0,))

    def ev(x: Vector, y: Vector, side: str) -> Vector:
        return x

    return CyclicMapSpec("non_cyclic", space, A, B, ev,
                         declared_class="none", declared_dist=2.0)


BUILTIN_MAPS: dict[str, Callable[[], CyclicMapSpec]] = {
    "interval_contraction": interval_contraction,
    "overlap_contraction": overlap_contraction,
    "l1_kannan": l1_kannan,
    "flip": flip_map,
    "non_cyclic": non_cyclic_control,
}


def builtin(name: str) -> CyclicMapSpec:
    try:
        factory = BUILTIN_MAPS[name]
    except KeyError:
        raise MapsError(
            f"unknown builtin map {name!r}; available: {', '.join(sorted(BUILTIN_MAPS))}"
        ) from None
    return factory()
