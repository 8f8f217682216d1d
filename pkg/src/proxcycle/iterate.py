"""Coupled Picard iteration and trajectory diagnostics.

From a start (x0, y0) in A x B the iteration produces
x_n = T(x_(n-1), y_(n-1)) and y_n = T(y_(n-1), x_(n-1)), so the pair
alternates between A x B (even n) and B x A (odd n).  The recorded
t-series is the product distance between consecutive pairs; for the
maps this package targets it decreases to dist(A, B).

Diagnostics never raise on mathematical failure: they return reports.
A bound that fails on a budget-exhausted trajectory is inconclusive,
since more iterations might have met the tolerance; the same bound
failing after a converged stop is a genuine failure.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

from .maps import SIDE_AB, SIDE_BA, CyclicMapSpec, DomainError, coupled_image, flip_side
from .report import FAILED, INCONCLUSIVE, PASSED, CheckReport, Violation, conclude
from .sets import contains
from .space import TOL_NUM, NormedSpaceSpec, ProductPoint, Vector, norm, pair_distance

STOP_BUDGET = "budget"
STOP_CONVERGED_T = "converged_t"
STOP_CONVERGED_GAP = "converged_gap"
STOP_DOMAIN_ERROR = "domain_error"


@dataclass(frozen=True)
class StopRule:
    """Iteration budget plus optional tolerance triggers.

    t_tol stops once |t_n - dist| < t_tol (needs a declared distance);
    gap_tol stops once the latest even and odd gaps both fall below it.
    Either tolerance may be None to disable that trigger.
    """

    max_iters: int = 1000
    t_tol: float | None = 1e-8
    gap_tol: float | None = 1e-8

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for label, tol in (("t_tol", self.t_tol), ("gap_tol", self.gap_tol)):
            if tol is not None and tol <= 0.0:
                raise ValueError(f"{label} must be positive when given")


@dataclass(frozen=True)
class Trajectory:
    space: NormedSpaceSpec
    points: tuple[ProductPoint, ...]
    t_series: tuple[float, ...]
    even_gap_x: tuple[float, ...]
    even_gap_y: tuple[float, ...]
    odd_gap_x: tuple[float, ...]
    odd_gap_y: tuple[float, ...]
    stop_reason: str
    rule: StopRule
    dist_used: float | None
    error_index: int | None = None

    def side_of(self, n: int) -> str:
        return SIDE_AB if n % 2 == 0 else SIDE_BA

    def final_even_point(self) -> ProductPoint:
        last = len(self.points) - 1
        return self.points[last if last % 2 == 0 else last - 1]


def run(T: CyclicMapSpec, x0: Vector, y0: Vector, rule: StopRule = StopRule(),
        tol: float = TOL_NUM) -> Trajectory:
    """Iterate T from (x0, y0) in A x B until a stop rule fires.

    Raises DomainError if the start itself is outside A x B.  An iterate
    leaving its required set mid-run ends the trajectory with
    stop_reason "domain_error" instead (the bad point is not recorded).
    """
    if not contains(T.A, T.space, x0, tol):
        raise DomainError("start x0 is not in the A set")
    if not contains(T.B, T.space, y0, tol):
        raise DomainError("start y0 is not in the B set")

    points = [ProductPoint(x0, y0)]
    t_series: list[float] = []
    gaps: dict[str, list[float]] = {"even_x": [], "even_y": [], "odd_x": [], "odd_y": []}
    stop_reason = STOP_BUDGET
    error_index = None
    d = T.declared_dist

    for n in range(1, rule.max_iters + 1):
        side = SIDE_AB if (n - 1) % 2 == 0 else SIDE_BA
        new = coupled_image(T, points[-1], side, check_domain=False)
        SX, SY = T.domain_sets(flip_side(side))
        if not (contains(SX, T.space, new.first, tol)
                and contains(SY, T.space, new.second, tol)):
            stop_reason = STOP_DOMAIN_ERROR
            error_index = n
            break
        points.append(new)
        t_series.append(pair_distance(T.space, points[-2], points[-1]))
        if n >= 2:
            prev = points[n - 2]
            key = "even" if n % 2 == 0 else "odd"
            gaps[key + "_x"].append(norm(T.space, new.first - prev.first))
            gaps[key + "_y"].append(norm(T.space, new.second - prev.second))

        if rule.t_tol is not None and d is not None and abs(t_series[-1] - d) < rule.t_tol:
            stop_reason = STOP_CONVERGED_T
            break
        if rule.gap_tol is not None and gaps["even_x"] and gaps["odd_x"]:
            latest = max(gaps["even_x"][-1], gaps["even_y"][-1],
                         gaps["odd_x"][-1], gaps["odd_y"][-1])
            if latest < rule.gap_tol:
                stop_reason = STOP_CONVERGED_GAP
                break

    return Trajectory(
        space=T.space,
        points=tuple(points),
        t_series=tuple(t_series),
        even_gap_x=tuple(gaps["even_x"]),
        even_gap_y=tuple(gaps["even_y"]),
        odd_gap_x=tuple(gaps["odd_x"]),
        odd_gap_y=tuple(gaps["odd_y"]),
        stop_reason=stop_reason,
        rule=rule,
        dist_used=d,
        error_index=error_index,
    )


# ---------------------------------------------------------------------------
# diagnostics

def _budget_status(traj: Trajectory) -> str:
    return INCONCLUSIVE if traj.stop_reason == STOP_BUDGET else FAILED


def diagnose_monotone_t(traj: Trajectory, tol: float = TOL_NUM) -> CheckReport:
    """t_n must be non-increasing along the whole trajectory."""
    if len(traj.t_series) < 2:
        return CheckReport("monotone_t", 0, status=INCONCLUSIVE,
                           detail="need at least two t values")
    violations = []
    for k in range(len(traj.t_series) - 1):
        a, b = traj.t_series[k], traj.t_series[k + 1]
        if b > a + tol:
            violations.append(Violation(
                (f"t[{k}]={a!r}", f"t[{k + 1}]={b!r}"), b, a, b - a,
                note="t series increased",
            ))
    return conclude("monotone_t", len(traj.t_series) - 1, violations)


def diagnose_t_limit(traj: Trajectory, d: float | None = None,
                     tol: float | None = None, floor_tol: float = TOL_NUM) -> CheckReport:
    """Final t value must sit within tol of dist(A, B).

    Also verifies the floor: no t value may undercut dist - floor_tol.
    """
    d = traj.dist_used if d is None else d
    if d is None:
        return CheckReport("t_limit", 0, status=INCONCLUSIVE,
                           detail="no pair distance available")
    if not traj.t_series:
        return CheckReport("t_limit", 0, status=INCONCLUSIVE, detail="empty t series")
    if tol is None:
        tol = traj.rule.t_tol if traj.rule.t_tol is not None else 1e-8
    violations = []
    for k, t in enumerate(traj.t_series):
        if t < d - floor_tol:
            violations.append(Violation(
                (f"t[{k}]={t!r}",), d, t, d - t,
                note="t value undercut the pair distance",
            ))
    final = traj.t_series[-1]
    detail = f"final t = {final!r}, dist = {d!r}"
    if violations:
        return CheckReport("t_limit", len(traj.t_series), tuple(violations), FAILED, detail)
    if abs(final - d) < tol:
        return CheckReport("t_limit", len(traj.t_series), (), PASSED, detail)
    miss = Violation((f"t[{len(traj.t_series) - 1}]={final!r}",), abs(final - d), tol,
                     abs(final - d) - tol, note="final t missed dist")
    return CheckReport("t_limit", len(traj.t_series), (miss,), _budget_status(traj), detail)


def _product_gaps(gx: tuple[float, ...], gy: tuple[float, ...]) -> list[float]:
    return [max(a, b) for a, b in zip(gx, gy)]


def diagnose_even_gaps(traj: Trajectory, tol: float | None = None) -> CheckReport:
    """Final even-index and odd-index gaps must both fall below tol."""
    if len(traj.points) < 4:
        return CheckReport("even_gaps", 0, status=INCONCLUSIVE,
                           detail="need at least four points")
    if tol is None:
        tol = traj.rule.gap_tol if traj.rule.gap_tol is not None else 1e-8
    even = _product_gaps(traj.even_gap_x, traj.even_gap_y)
    odd = _product_gaps(traj.odd_gap_x, traj.odd_gap_y)
    checked = len(even) + len(odd)
    detail = f"final even gap = {even[-1]!r}, final odd gap = {odd[-1]!r}"
    violations = []
    for label, series in (("even", even), ("odd", odd)):
        if series[-1] >= tol:
            violations.append(Violation(
                (f"final {label} gap",), series[-1], tol, series[-1] - tol,
                note="subsequence gap did not vanish",
            ))
    if not violations:
        return CheckReport("even_gaps", checked, (), PASSED, detail)
    return CheckReport("even_gaps", checked, tuple(violations), _budget_status(traj), detail)


def diagnose_interleaved(traj: Trajectory, eps_list=(0.5, 0.1, 0.01),
                         d: float | None = None, tol: float = TOL_NUM) -> CheckReport:
    """Interleaved closeness: for each eps some tail index N bounds every
    cross distance ||u_2m - u_(2n+1)|| with m > n >= N by dist + eps."""
    d = traj.dist_used if d is None else d
    if d is None:
        return CheckReport("interleaved", 0, status=INCONCLUSIVE,
                           detail="no pair distance available")
    evens = traj.points[0::2]
    odds = traj.points[1::2]
    if len(evens) < 2 or len(odds) < 1:
        return CheckReport("interleaved", 0, status=INCONCLUSIVE, detail="too short")
    checked = 0
    violations = []
    tails = []
    for eps in eps_list:
        worst_n = -1
        for m in range(1, len(evens)):
            for n in range(min(m, len(odds))):
                checked += 1
                if pair_distance(traj.space, evens[m], odds[n]) >= d + eps + tol:
                    worst_n = max(worst_n, n)
        N = worst_n + 1
        # a valid tail needs at least one admissible pair m > n >= N
        if N + 1 < len(evens) and N < len(odds):
            tails.append((eps, N))
        else:
            violations.append(Violation(
                (f"eps={eps}",), float(N), float(len(odds)), 1.0,
                note="no tail index leaves the cross distances under dist + eps",
            ))
    detail = "tails " + ", ".join(f"eps={e}: N={n}" for e, n in tails)
    if not violations:
        return CheckReport("interleaved", checked, (), PASSED, detail)
    return CheckReport("interleaved", checked, tuple(violations), _budget_status(traj), detail)


def diagnose_cauchy(traj: Trajectory, k: int = 10, tol: float | None = None) -> CheckReport:
    """Max pairwise product distance among the last k even (and odd) points."""
    if len(traj.points) < 6:
        return CheckReport("cauchy", 0, status=INCONCLUSIVE,
                           detail="need at least six points")
    if tol is None:
        tol = traj.rule.gap_tol if traj.rule.gap_tol is not None else 1e-8
    checked = 0
    worst = {"even": 0.0, "odd": 0.0}
    for label, seq in (("even", traj.points[0::2]), ("odd", traj.points[1::2])):
        tail = seq[-min(k, len(seq)):]
        for i in range(len(tail)):
            for j in range(i + 1, len(tail)):
                checked += 1
                worst[label] = max(worst[label], pair_distance(traj.space, tail[i], tail[j]))
    detail = f"even spread = {worst['even']!r}, odd spread = {worst['odd']!r}"
    violations = [
        Violation((f"last-{k} {label} points",), spread, tol, spread - tol,
                  note="tail subsequence is not settling")
        for label, spread in worst.items() if spread >= tol
    ]
    if not violations:
        return CheckReport("cauchy", checked, (), PASSED, detail)
    return CheckReport("cauchy", checked, tuple(violations), _budget_status(traj), detail)


# ---------------------------------------------------------------------------
# trace export

def format_vector(space: NormedSpaceSpec, v: Vector) -> str:
    """Stable text form: dense coordinates joined by ';', sparse as i:value."""
    if space.mode == "dense":
        return ";".join(repr(v.value_at(i)) for i in range(space.dimension))
    return ";".join(f"{i}:{val!r}" for i, val in v.coords)


def trajectory_to_csv(traj: Trajectory, path: str) -> None:
    """Write the trace: one row per point, gaps attached to their later index."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "x", "y", "t", "even_gap", "odd_gap"])
        even = _product_gaps(traj.even_gap_x, traj.even_gap_y)
        odd = _product_gaps(traj.odd_gap_x, traj.odd_gap_y)
        for n, p in enumerate(traj.points):
            t = repr(traj.t_series[n]) if n < len(traj.t_series) else ""
            eg = og = ""
            if n >= 2 and n % 2 == 0:
                eg = repr(even[n // 2 - 1])
            if n >= 3 and n % 2 == 1:
                og = repr(odd[(n - 3) // 2])
            w.writerow([n, format_vector(traj.space, p.first),
                        format_vector(traj.space, p.second), t, eg, og])
