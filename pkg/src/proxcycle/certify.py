"""Certification of coupled best proximity points and uniqueness probing.

A candidate (x, y) in A x B is a coupled best proximity point when both
residuals ||x - T(x, y)|| and ||y - T(y, x)|| equal dist(A, B); when the
sets meet (dist = 0) that degenerates to a coupled fixed point.

solve_and_certify drives the iteration from a batch of starts.  A start
that already certifies is kept as its own limit rather than iterated:
the iteration is a search procedure, and a found point is found.  This
matters for maps whose solution set is larger than the attractor of the
iteration, where limits alone would hide the non-uniqueness.
"""
from __future__ import annotations

from dataclasses import dataclass

from .iterate import StopRule, Trajectory, run
from .maps import SIDE_AB, SIDE_BA, CyclicMapSpec, DomainError, coupled_image, eval_map
from .report import (
    FAILED,
    NOT_APPLICABLE,
    PASSED,
    CheckReport,
    Violation,
    render_pair,
    render_vector,
)
from .sets import ConvexSet, DeclaredDistance, contains, dist as set_dist
from .space import (
    TOL_NUM,
    NormedSpaceSpec,
    ProductPoint,
    Vector,
    norm,
    pair_distance,
)

VERDICT_BPP = "coupled_bpp"
VERDICT_FIXED = "coupled_fixed_point"
VERDICT_REJECTED = "rejected"

CERT_TOL = 1e-8


class CertifyError(ValueError):
    pass


class PremiseNotMet(CertifyError):
    """A harness premise failed; the message names which one and where."""


@dataclass(frozen=True)
class Certificate:
    candidate: ProductPoint
    residual_x: float
    residual_y: float
    dist_used: float
    verdict: str
    tolerance: float
    reason: str = ""

    @property
    def accepted(self) -> bool:
        return self.verdict != VERDICT_REJECTED

    def to_json(self) -> dict:
        return {
            "candidate": render_pair(self.candidate),
            "residual_x": self.residual_x,
            "residual_y": self.residual_y,
            "dist_used": self.dist_used,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "reason": self.reason,
        }


def certify(T: CyclicMapSpec, candidate: ProductPoint, d: float | None = None,
            tol: float = CERT_TOL) -> Certificate:
    """Certify candidate = (x, y) with x in A, y in B.

    Verdict "coupled_bpp" when both residuals match the pair distance
    within tol, "coupled_fixed_point" when additionally the distance
    itself is below tol, "rejected" otherwise (with a reason).
    """
    d = T.declared_dist if d is None else d
    if d is None:
        raise CertifyError("certification needs the pair distance")
    x, y = candidate.first, candidate.second
    if not contains(T.A, T.space, x, tol):
        return Certificate(candidate, float("nan"), float("nan"), d,
                           VERDICT_REJECTED, tol, reason="x is not in the A set")
    if not contains(T.B, T.space, y, tol):
        return Certificate(candidate, float("nan"), float("nan"), d,
                           VERDICT_REJECTED, tol, reason="y is not in the B set")
    rx = norm(T.space, x - eval_map(T, x, y, SIDE_AB, check_domain=False))
    ry = norm(T.space, y - eval_map(T, y, x, SIDE_BA, check_domain=False))
    miss = max(abs(rx - d), abs(ry - d))
    if miss <= tol:
        verdict = VERDICT_FIXED if d <= tol else VERDICT_BPP
        return Certificate(candidate, rx, ry, d, verdict, tol)
    return Certificate(candidate, rx, ry, d, VERDICT_REJECTED, tol,
                       reason=f"residuals miss the pair distance by {miss!r}")


@dataclass(frozen=True)
class SolveRecord:
    start: ProductPoint
    limit: ProductPoint | None
    certificate: Certificate | None
    trajectory: Trajectory | None
    reason: str = ""


@dataclass(frozen=True)
class UniquenessReport:
    starts: tuple[ProductPoint, ...]
    limits: tuple[ProductPoint | None, ...]
    max_pairwise_limit_distance: float
    unique_within_tol: bool
    tolerance: float

    def to_json(self) -> dict:
        return {
            "n_starts": len(self.starts),
            "limits": [None if p is None else render_pair(p) for p in self.limits],
            "max_pairwise_limit_distance": self.max_pairwise_limit_distance,
            "unique_within_tol": self.unique_within_tol,
            "tolerance": self.tolerance,
        }


def solve_and_certify(
    T: CyclicMapSpec,
    starts: list[tuple[Vector, Vector]],
    rule: StopRule = StopRule(),
    tol: float = CERT_TOL,
) -> tuple[list[SolveRecord], UniquenessReport]:
    """Iterate from each start, certify, and compare the limits.

    Starts that already certify are their own limits (no iteration).
    Runs ending in a domain error contribute no limit.  Uniqueness holds
    when all limits found agree within 10 * t_tol.
    """
    if not starts:
        raise CertifyError("need at least one start")
    records: list[SolveRecord] = []
    for x0, y0 in starts:
        p0 = ProductPoint(x0, y0)
        c0 = certify(T, p0, tol=tol)
        if c0.accepted:
            records.append(SolveRecord(p0, p0, c0, None, "start already certifies"))
            continue
        traj = run(T, x0, y0, rule)
        if traj.stop_reason == "domain_error":
            records.append(SolveRecord(
                p0, None, None, traj,
                f"iterate left its set at step {traj.error_index}"))
            continue
        limit = traj.final_even_point()
        records.append(SolveRecord(p0, limit, certify(T, limit, tol=tol), traj))

    limits = [r.limit for r in records]
    found = [p for p in limits if p is not None]
    worst = 0.0
    for i in range(len(found)):
        for j in range(i + 1, len(found)):
            worst = max(worst, pair_distance(T.space, found[i], found[j]))
    u_tol = 10.0 * (rule.t_tol if rule.t_tol is not None else 1e-8)
    report = UniquenessReport(
        starts=tuple(r.start for r in records),
        limits=tuple(limits),
        max_pairwise_limit_distance=worst,
        unique_within_tol=worst <= u_tol,
        tolerance=u_tol,
    )
    return records, report


def second_iterate_check(T: CyclicMapSpec, candidate: ProductPoint,
                         tol: float = CERT_TOL) -> CheckReport:
    """Second-iterate identity at a certified candidate.

    For (x, y) certified in a uniformly convex space the coupled image of
    the coupled image returns to (x, y).  Not applicable when the space
    has no convexity modulus.
    """
    if not T.space.modulus_available:
        return CheckReport("second_iterate", 0, status=NOT_APPLICABLE,
                           detail=f"{T.space.norm} has no convexity modulus")
    p1 = coupled_image(T, candidate, SIDE_AB)
    p2 = coupled_image(T, p1, SIDE_BA)
    dx = norm(T.space, p2.first - candidate.first)
    dy = norm(T.space, p2.second - candidate.second)
    violations = [
        Violation((render_pair(candidate), render_vector(got)), err, tol, err - tol,
                  note=f"second iterate moved the {label} component")
        for label, err, got in (("x", dx, p2.first), ("y", dy, p2.second))
        if err > tol
    ]
    status = PASSED if not violations else FAILED
    return CheckReport("second_iterate", 2, tuple(violations), status,
                       detail=f"|x2 - x| = {dx!r}, |y2 - y| = {dy!r}")


def proximal_squeeze_check(
    space: NormedSpaceSpec,
    A: ConvexSet,
    B: ConvexSet,
    seq_xy: list[ProductPoint],
    seq_wz: list[ProductPoint],
    seq_uv: list[ProductPoint],
    d: float | None = None,
    declared: DeclaredDistance | None = None,
    tol: float = CERT_TOL,
) -> CheckReport:
    """Squeeze argument for uniformly convex spaces.

    seq_xy and seq_wz live in A x B, seq_uv in B x A.  When both product
    distances to seq_uv approach dist(A, B) (the premises), uniform
    convexity forces seq_xy and seq_wz together: the final gap must fall
    below 10 * tol.  Refuses spaces without a convexity modulus; raises
    PremiseNotMet when a premise fails, naming it.
    """
    if not space.modulus_available:
        from .space import ModulusUnavailable
        raise ModulusUnavailable(
            f"squeeze argument needs a convexity modulus; {space.norm} has none")
    if not (len(seq_xy) == len(seq_wz) == len(seq_uv)) or len(seq_xy) < 2:
        raise CertifyError("need three equal-length sequences with >= 2 entries")
    if d is None:
        if declared is not None:
            d = declared.value
        elif space.norm == "l2":
            d = set_dist(A, B, space).value
        else:
            raise CertifyError("provide the pair distance for this space")
    for label, seq in (("xy-uv", seq_xy), ("wz-uv", seq_wz)):
        final = pair_distance(space, seq[-1], seq_uv[-1])
        if abs(final - d) > tol:
            raise PremiseNotMet(
                f"premise {label} not met at index {len(seq) - 1}: "
                f"product distance {final!r} is not within {tol} of dist {d!r}")
    gap = pair_distance(space, seq_xy[-1], seq_wz[-1])
    bound = 10.0 * tol
    detail = f"final squeeze gap = {gap!r}, bound = {bound!r}"
    if gap < bound:
        return CheckReport("proximal_squeeze", len(seq_xy), (), PASSED, detail)
    return CheckReport(
        "proximal_squeeze", len(seq_xy),
        (Violation(("final gap",), gap, bound, gap - bound,
                   note="sequences failed to collapse together"),),
        FAILED, detail)
