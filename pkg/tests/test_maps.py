"""Map evaluation and the sampled inequality checkers.

The interval family is small enough for an exhaustive grid oracle over
cross quadruples, so the sampled checker is validated against a complete
enumeration at desk scale.
"""
import pytest
from hypothesis import given, settings, strategies as st

from proxcycle import (
    SIDE_AB,
    SIDE_BA,
    CyclicMapSpec,
    DomainError,
    MapsError,
    NormedSpaceSpec,
    PhiSpec,
    ProductPoint,
    Vector,
    basis,
    builtin,
    check_cyclic_invariance,
    check_kannan,
    check_kannan_strict_hypothesis,
    check_phi_contraction,
    coupled_image,
    displacement,
    eval_map,
    flip_side,
)
from proxcycle.sets import Box

INTERVAL = builtin("interval_contraction")
FLIP = builtin("flip")
HALF = PhiSpec.linear(0.5)


def grid(lo, hi, step):
    n = round((hi - lo) / step)
    return [lo + k * step for k in range(n + 1)]


def phi_rhs(phi, delta, d):
    return delta - phi(delta) + phi(d)


def cross_quadruples(step):
    """All (A x B, B x A) pairs on a grid: x1, y2 in A = [1,2]; y1, x2 in B."""
    a = grid(1.0, 2.0, step)
    b = grid(-2.0, -1.0, step)
    for x1 in a:
        for y1 in b:
            for x2 in b:
                for y2 in a:
                    yield x1, y1, x2, y2


def image_pair_distances(T, x1, y1, x2, y2):
    p = ProductPoint(Vector.dense([x1]), Vector.dense([y1]))
    q = ProductPoint(Vector.dense([x2]), Vector.dense([y2]))
    i1 = coupled_image(T, p, SIDE_AB)
    i2 = coupled_image(T, q, SIDE_BA)
    return (abs(i1.first.value_at(0) - i2.first.value_at(0)),
            abs(i1.second.value_at(0) - i2.second.value_at(0)))


# ----------------------------------------------------------- grid oracles

def test_interval_phi_inequality_exhaustive_grid():
    # 9^4 = 6561 cross quadruples, zero violations expected
    bad = []
    for x1, y1, x2, y2 in cross_quadruples(0.125):
        delta = max(abs(x1 - x2), abs(y1 - y2))
        rhs = phi_rhs(HALF, delta, 2.0)
        for lhs in image_pair_distances(INTERVAL, x1, y1, x2, y2):
            if lhs > rhs + 1e-9:
                bad.append((x1, y1, x2, y2, lhs, rhs))
    assert bad == []


def test_sampled_checker_agrees_with_grid_on_interval():
    rep = check_phi_contraction(INTERVAL, HALF, n_samples=1000, seed=3)
    assert rep.status == "passed"
    assert rep.checked == 2000
    rep2 = check_phi_contraction(INTERVAL, HALF, n_samples=200, seed=3,
                                 quantification="consecutive_iterates")
    assert rep2.status == "passed"


def test_flip_violates_phi_on_grid_with_known_witness():
    worst, hits = None, 0
    for x1, y1, x2, y2 in cross_quadruples(0.25):
        delta = max(abs(x1 - x2), abs(y1 - y2))
        rhs = phi_rhs(HALF, delta, 2.0)
        for lhs in image_pair_distances(FLIP, x1, y1, x2, y2):
            if lhs > rhs + 1e-9:
                hits += 1
                if worst is None or lhs - rhs > worst[0]:
                    worst = (lhs - rhs, x1, y1, x2, y2)
    assert hits > 0
    # extreme corners: images at distance 4 while the bound allows 3
    assert worst[0] == pytest.approx(1.0)
    # the argmax is tied across corners; check the hand-picked one attains it
    delta = 4.0
    rhs = phi_rhs(HALF, delta, 2.0)
    corner = [lhs - rhs for lhs in image_pair_distances(FLIP, 2.0, -2.0, -2.0, 2.0)]
    assert max(corner) == pytest.approx(worst[0])


def test_sampled_checker_flags_flip():
    rep = check_phi_contraction(FLIP, HALF, n_samples=400, seed=3)
    assert rep.status == "failed"
    assert len(rep.violations) > 0
    v = rep.violations[0]
    assert v.lhs > v.rhs + 1e-9
    assert len(v.inputs) == 2  # the two offending product points


def test_linear_phi_matches_inline_lambda_form_on_grid():
    # with phi(t) = (1-lam) t the bound collapses to lam*Delta + (1-lam)*d;
    # for lam = 0.5 both forms are dyadic-exact, so decisions must agree
    lam = 0.5
    phi = PhiSpec.linear(lam)
    for T in (INTERVAL, FLIP):
        for x1, y1, x2, y2 in cross_quadruples(0.25):
            delta = max(abs(x1 - x2), abs(y1 - y2))
            rhs_phi = phi_rhs(phi, delta, 2.0)
            rhs_lam = lam * delta + (1.0 - lam) * 2.0
            assert rhs_phi == rhs_lam
            for lhs in image_pair_distances(T, x1, y1, x2, y2):
                assert (lhs > rhs_phi + 1e-9) == (lhs > rhs_lam + 1e-9)


# ------------------------------------------------------------------- phi

def test_phi_linear_values():
    phi = PhiSpec.linear(0.25)
    assert phi(0.0) == 0.0
    assert phi(2.0) == pytest.approx(1.5)


def test_phi_custom_interpolates_and_extrapolates():
    phi = PhiSpec.custom([(0.0, 0.0), (1.0, 0.5), (3.0, 0.6)])
    assert phi(0.0) == 0.0
    assert phi(0.5) == pytest.approx(0.25)
    assert phi(2.0) == pytest.approx(0.55)
    # beyond the table: continue at the final slope 0.05
    assert phi(4.0) == pytest.approx(0.65)


def test_phi_validation():
    with pytest.raises(MapsError):
        PhiSpec.linear(1.0)
    with pytest.raises(MapsError):
        PhiSpec.linear(-0.1)
    with pytest.raises(MapsError):
        PhiSpec.custom([(1.0, 0.5), (2.0, 0.6)])  # must start at t = 0
    with pytest.raises(MapsError):
        PhiSpec.custom([(0.0, 0.0), (1.0, 0.5), (2.0, 0.5)])  # not increasing


@settings(max_examples=100)
@given(st.lists(st.floats(min_value=1e-3, max_value=10.0), min_size=2,
                max_size=6, unique=True),
       st.floats(min_value=0.01, max_value=5.0))
def test_phi_custom_strictly_increasing(increments, probe):
    ts, fs, t, f = [0.0], [0.0], 0.0, 0.0
    for inc in increments:
        t, f = t + inc, f + inc * 0.3
        ts.append(t)
        fs.append(f)
    phi = PhiSpec.custom(list(zip(ts, fs)))
    assert phi(probe) < phi(probe + 0.5)


# ----------------------------------------------------------------- kannan

def test_l1_builtin_passes_kannan_checks():
    T = builtin("l1_kannan")
    assert check_kannan(T, n_samples=1000, seed=0).status == "passed"
    assert check_kannan_strict_hypothesis(T, n_samples=400, seed=0).status == "passed"


def mirror_map():
    # T(u, v) = 1 - u on A = B = [0,1]: kannan holds with equality but the
    # displacement |2u - 1| never decreases, so the strict hypothesis fails
    sp = NormedSpaceSpec("l2", "dense", 1)
    S = Box((0.0,), (1.0,))

    def ev(u, v, side):
        return Vector.dense([1.0 - u.value_at(0)])

    return CyclicMapSpec("mirror", sp, S, S, ev, "kannan", 0.0, None)


def test_mirror_map_kannan_but_not_strict():
    T = mirror_map()
    assert check_cyclic_invariance(T, 100, seed=1).status == "passed"
    assert check_kannan(T, n_samples=500, seed=1).status == "passed"
    rep = check_kannan_strict_hypothesis(T, n_samples=300, seed=1)
    assert rep.status == "failed"
    assert rep.violations


# ------------------------------------------------------- evaluation rules

def test_eval_map_checks_domain():
    with pytest.raises(DomainError):
        eval_map(INTERVAL, Vector.dense([5.0]), Vector.dense([-1.5]), SIDE_AB)
    with pytest.raises(DomainError):
        eval_map(INTERVAL, Vector.dense([1.5]), Vector.dense([-1.5]), SIDE_BA)
    out = eval_map(INTERVAL, Vector.dense([5.0]), Vector.dense([-1.5]), SIDE_AB,
                   check_domain=False)
    assert out.value_at(0) == pytest.approx((-1.5 - 5.0) / 4.0 - 0.5)


def test_eval_map_frozen_values():
    out = eval_map(INTERVAL, Vector.dense([2.0]), Vector.dense([-2.0]), SIDE_AB)
    assert out.value_at(0) == -1.5
    back = eval_map(INTERVAL, Vector.dense([-2.0]), Vector.dense([2.0]), SIDE_BA)
    assert back.value_at(0) == 1.5


def test_coupled_image_and_displacement():
    p = ProductPoint(Vector.dense([2.0]), Vector.dense([-2.0]))
    img = coupled_image(INTERVAL, p, SIDE_AB)
    assert img.first.value_at(0) == -1.5
    assert img.second.value_at(0) == 1.5
    assert displacement(INTERVAL, p, SIDE_AB) == 3.5
    star = ProductPoint(Vector.dense([1.0]), Vector.dense([-1.0]))
    assert displacement(INTERVAL, star, SIDE_AB) == 2.0


def test_flip_side_round_trip():
    assert flip_side(SIDE_AB) == SIDE_BA
    assert flip_side(SIDE_BA) == SIDE_AB
    with pytest.raises(MapsError):
        flip_side("XY")


def test_unknown_quantification_rejected():
    with pytest.raises(MapsError):
        check_phi_contraction(INTERVAL, HALF, quantification="everywhere")


def test_unknown_builtin_rejected():
    with pytest.raises(MapsError):
        builtin("does_not_exist")


def test_non_cyclic_control_fails_invariance():
    rep = check_cyclic_invariance(builtin("non_cyclic"), 100, seed=0)
    assert rep.status == "failed"
    assert any("left the B set" in v.note for v in rep.violations)


def test_l1_constant_map_images():
    T = builtin("l1_kannan")
    x, y = basis(1) + basis(2), basis(2) + basis(3)
    assert eval_map(T, x, y, SIDE_AB) == basis(2) + basis(3)
    assert eval_map(T, y, x, SIDE_BA) == basis(1) + basis(2)
