import math
from fractions import Fraction

import numpy as np
import pytest

from radonlab.knapp import (
    AsymmetricTube,
    BallSet,
    ConvolutionTube,
    DimensionTriple,
    KnappFamily,
    KnappRow,
    RieszTriangle,
    admissible_region,
    default_epsilons,
    knapp_sets,
    knapp_sweep,
    knapp_vertex,
    sharpness_verdict,
    slope_fit,
    to_operator_point,
    unit_ball_volume,
)
from radonlab.models import ModelError, get_model


# ---------------------------------------------------------------------------
# exact rational geometry
# ---------------------------------------------------------------------------

def test_vertex_values_all_required_triples():
    cases = {
        (5, 5, 3): (Fraction(5, 8), Fraction(5, 8)),
        (10, 10, 6): (Fraction(5, 8), Fraction(5, 8)),
        (8, 8, 5): (Fraction(8, 13), Fraction(8, 13)),
    }
    for d_r in range(1, 7):
        cases[(2 * d_r, d_r + 1, d_r)] = (
            Fraction(d_r + 1, d_r + 2), Fraction(2, d_r + 2))
    for dims, want in cases.items():
        assert knapp_vertex(DimensionTriple(*dims)) == want


def test_vertex_on_both_constraint_lines():
    for dims in [(5, 5, 3), (10, 10, 6), (8, 8, 5), (4, 3, 2), (6, 4, 3), (12, 7, 6)]:
        d = DimensionTriple(*dims)
        region = admissible_region(d)
        x, y = knapp_vertex(d)
        c1 = region.constraint_l
        c2 = region.constraint_r
        assert c1[0] * x + c1[1] * y == 1
        assert c2[0] * x + c2[1] * y == 1


def test_operator_coordinates():
    assert to_operator_point(knapp_vertex(DimensionTriple(5, 5, 3))) == \
        (Fraction(5, 8), Fraction(3, 8))
    assert to_operator_point(knapp_vertex(DimensionTriple(8, 8, 5))) == \
        (Fraction(8, 13), Fraction(5, 13))


def test_center_point_admissible_for_all_models():
    for dims in [(5, 5, 3), (10, 10, 6), (8, 8, 5), (4, 3, 2)]:
        region = admissible_region(DimensionTriple(*dims))
        assert region.contains((Fraction(1, 2), Fraction(1, 2)))


def test_region_classification():
    region = admissible_region(DimensionTriple(5, 5, 3))
    assert region.classify((Fraction(3, 4), Fraction(3, 4))) == "exterior"
    assert region.classify((Fraction(5, 8), Fraction(5, 8))) == "boundary"
    assert region.classify((Fraction(13, 24), Fraction(13, 24))) == "interior"
    assert region.classify((Fraction(1, 4), Fraction(1, 4))) == "exterior"


def test_triangle_vertex_must_be_interior():
    with pytest.raises(ValueError):
        RieszTriangle((Fraction(1), Fraction(1, 2)))
    with pytest.raises(ValueError):
        DimensionTriple(5, 5, 5)


# ---------------------------------------------------------------------------
# adapted set pairs
# ---------------------------------------------------------------------------

def test_knapp_sets_rejects_large_eps(models):
    with pytest.raises(ModelError):
        knapp_sets(models["maximal_r5"], 1.0)


def test_ball_measure_scale_free(models):
    m = models["maximal_r5"]
    ratios = []
    for eps in [2.0 ** (-j) for j in range(3, 8)]:
        pair = knapp_sets(m, eps)
        ratios.append(pair.f.measure / eps ** m.n_l)
    assert max(ratios) / min(ratios) < 1.10
    assert ratios[0] == pytest.approx(unit_ball_volume(5), rel=0.15)


def test_high_dimension_ball_is_exact(models):
    pair = knapp_sets(models["harmonic_r8"], 0.125)
    assert isinstance(pair.f, BallSet)
    assert pair.f.measure == pytest.approx(unit_ball_volume(8) * 0.125 ** 8, rel=1e-12)


def test_tube_measure_bounded_ratio(models):
    m = models["maximal_r5"]
    ratios = []
    for eps in [2.0 ** (-j) for j in range(3, 7)]:
        pair = knapp_sets(m, eps, measure_budget=200000)
        ratios.append(pair.g.measure / eps ** m.ell)
    assert max(ratios) / min(ratios) < 1.6
    print(f"\n  tube measure / eps^ell across eps: {[round(r, 2) for r in ratios]}")


def test_tube_distance_agrees_with_grid_minimum(models):
    m = models["maximal_r5"]
    eps = 2.0 ** (-4)
    tube = ConvolutionTube(m, eps)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.4, 0.4, size=(400, 5))
    refined = tube.surface_distance(pts)
    gridded = tube.grid_min_distance(pts, spacing=eps / 4)
    # near the tube the refinement reaches the true minimum, which the grid
    # only upper-bounds; membership decisions must coincide
    near = gridded <= 2 * eps
    assert np.all(refined[near] <= gridded[near] + 1e-9)
    both = (refined <= eps * 1.05)
    grid = (gridded <= eps * 1.05)
    assert np.mean(both == grid) > 0.97


def test_asymmetric_tube_exact_membership(models):
    m = models["asymmetric:2"]
    tube = AsymmetricTube(m, 0.1)
    pts = np.array([
        [0.2, 0.05, 0.05],    # |y| = 0.0707 <= 0.105 sqrt(1.04)
        [0.2, 0.2, 0.2],      # |y| = 0.283, outside
        [0.9, 0.0, 0.0],      # |t| > subdomain
    ])
    assert tube.contains(pts).tolist() == [True, False, False]
    # closed-form measure for d_R = 2: pi (eps tol)^2 int (1 + t^2) dt
    want = math.pi * (0.1 * 1.05) ** 2 * (1.0 + 2 * 0.5 ** 3 / 3)
    assert tube.measure == pytest.approx(want, rel=1e-6)


def test_family_validation(models):
    with pytest.raises(ValueError):
        KnappFamily(models["maximal_r5"], (0.5, 0.25))
    with pytest.raises(ValueError):
        KnappFamily(models["maximal_r5"], (0.125, 0.125))
    fam = KnappFamily(models["maximal_r5"], default_epsilons(models["maximal_r5"]))
    assert len(fam.epsilons) == 5


# ---------------------------------------------------------------------------
# slope fitting and verdicts
# ---------------------------------------------------------------------------

def test_slope_fit_exact_powers():
    eps = [0.5, 0.25, 0.125, 0.0625]
    slope, r2 = slope_fit(eps, [e ** 2 for e in eps])
    assert slope == pytest.approx(2.0) and r2 == pytest.approx(1.0)
    slope, _ = slope_fit(eps, [3.0 * e ** 5 for e in eps])
    assert slope == pytest.approx(5.0)


def test_slope_fit_validation():
    with pytest.raises(ValueError):
        slope_fit([0.5, 0.25], [1.0, 2.0])
    with pytest.raises(ValueError):
        slope_fit([0.5, 0.25, 0.125, 0.0625], [1.0, -2.0, 1.0, 1.0])


def synthetic_rows(n_l, ell, c_b=2.0):
    eps = [2.0 ** (-j) for j in range(3, 8)]
    return [KnappRow(e, e ** n_l, 3.0 * e ** ell, 0.0, c_b * e ** n_l, 0.0, 0)
            for e in eps]


def test_sharpness_verdict_synthetic(models):
    m = models["maximal_r5"]
    rows = synthetic_rows(5, 3)
    exterior = sharpness_verdict(m, Fraction(3, 4), Fraction(3, 4), rows)
    assert exterior.verdict == "violated" and exterior.ratio_slope < -0.1
    interior = sharpness_verdict(m, Fraction(1, 2), Fraction(1, 2), rows)
    assert interior.verdict == "consistent"
    boundary = sharpness_verdict(m, Fraction(5, 8), Fraction(5, 8), rows)
    assert boundary.verdict == "boundary" and abs(boundary.ratio_slope) <= 0.15


@pytest.mark.slow
def test_mini_sweep_slopes(models):
    m = models["maximal_r5"]
    rows = knapp_sweep(m, [2 ** -3, 2 ** -4, 2 ** -5, 2 ** -6],
                       budget=150000, seed=5)
    eps = [r.eps for r in rows]
    s_f, _ = slope_fit(eps, [r.meas_f for r in rows])
    s_g, _ = slope_fit(eps, [r.meas_g for r in rows])
    s_b, _ = slope_fit(eps, [r.pairing for r in rows])
    assert s_f == pytest.approx(5.0, abs=0.05)
    assert s_g == pytest.approx(3.0, abs=0.4)
    assert s_b == pytest.approx(5.0, abs=0.4)
