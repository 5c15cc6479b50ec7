import math
from fractions import Fraction
from math import inf

import numpy as np
import pytest

from radonlab.lattice import LatticeSet
from radonlab.models import SublevelExponents, get_model
from radonlab.transforms import (
    AveragingOperator,
    SetPair,
    TrivialPairError,
    bilinear_form,
    check_generalized_ttt,
    exponents_from_sublevel,
    refine,
    rwt_constant,
    sublevel_sharpness_criterion,
    ttt_form,
)


class ConstantKernelModel:
    """Degenerate test surface with gamma identically zero: T multiplies by
    the parameter-box volume, so every form has a closed form."""

    family = "convolution"

    def __init__(self, n: int, k: int = 2, box_half: float = 0.5):
        self.n_l = self.n_r = n
        self.k = k
        self.ell = n - k
        self.model_id = f"constant:{n}:{k}"
        self._half = box_half

    def left_param_box(self, ambient_half=2.0):
        return np.array([[-self._half, self._half]] * self.k)

    def right_param_box(self):
        return np.array([[-self._half, self._half]] * self.k)

    def param_mask(self, t):
        return np.ones(np.atleast_2d(t).shape[0], dtype=bool)

    def left_point_mask(self, u):
        return np.ones(np.atleast_2d(u).shape[0], dtype=bool)

    def left_chart_project_right(self, u, s):
        return np.atleast_2d(np.asarray(u, float)).copy()

    def right_chart_project_left(self, xr, s):
        return np.atleast_2d(np.asarray(xr, float)).copy()


def unit_cube(dim, spacing=0.25, shift=0.0):
    box = np.array([[shift, shift + 1.0]] * dim)
    bounds = np.array([[shift - 0.5, shift + 1.5]] * dim)
    return LatticeSet.from_boxes([box], spacing, bounds)


from radonlab.transforms import random_box_pair as random_pair


# ---------------------------------------------------------------------------
# quadrature operator
# ---------------------------------------------------------------------------

def test_apply_t_constant_function(models):
    op = AveragingOperator(models["maximal_r5"], nt=9)
    ones = lambda pts: np.ones(pts.shape[0])
    assert op.apply_t(ones, np.zeros(5)) == pytest.approx(4.0, rel=1e-12)


def test_apply_t_huge_set_equals_box_volume(models):
    op = AveragingOperator(models["maximal_r5"], nt=9)
    big = LatticeSet.from_boxes([np.array([[-3.0, 3.0]] * 5)], 0.5,
                                np.array([[-3.5, 3.5]] * 5))
    assert op.apply_t(big, np.zeros(5)) == pytest.approx(4.0, rel=1e-12)


def test_apply_t_halfspace(models):
    op = AveragingOperator(models["maximal_r5"], nt=16)
    half = lambda pts: pts[:, 0] >= 0
    assert op.apply_t(half, np.zeros(5)) == pytest.approx(2.0, rel=1e-12)


def test_apply_t_positivity_and_monotone(models):
    op = AveragingOperator(models["maximal_r5"], nt=7)
    small = LatticeSet.ball(np.zeros(5), 0.6, 0.15)
    large = LatticeSet.ball(np.zeros(5), 1.0, 0.15)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, size=(40, 5))
    ts = op.apply_t_batch(small, pts)
    tl = op.apply_t_batch(large, pts)
    assert np.all(ts >= 0)
    assert np.all(ts <= tl + 1e-12)


def test_complex_region_mask_shrinks_volume(models):
    op = AveragingOperator(models["maximal_c5"], nt=13)
    ones = lambda pts: np.ones(pts.shape[0])
    vol = op.apply_t(ones, np.zeros(10))
    # |z1| + |z2| <= 1 in R^4 has volume pi^2/6 * ... much less than 16
    assert 0 < vol < 16.0
    _, w = op.right_grid()
    assert vol == pytest.approx(float(np.sum(w)), rel=1e-12)


# ---------------------------------------------------------------------------
# bilinear form and duality
# ---------------------------------------------------------------------------

def test_bilinear_disjoint_pair_is_zero(models):
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    f = unit_cube(5, shift=0.0)
    g = unit_cube(5, shift=50.0)
    est = bilinear_form(op, f, g, budget=20000, seed=0)
    assert est.value == 0.0


def test_bilinear_constant_kernel_closed_form():
    m = ConstantKernelModel(3, k=2)
    op = AveragingOperator(m, nt=9)
    f = unit_cube(3, spacing=0.25)
    g = unit_cube(3, spacing=0.25, shift=0.5)
    est = bilinear_form(op, f, g, budget=200000, seed=1)
    overlap = 0.5 ** 3
    assert abs(est.value - 1.0 * overlap) <= 4.0 * est.stderr + 1e-3


@pytest.mark.parametrize("mid", ["maximal_r5", "asymmetric:2"])
def test_bilinear_duality_sides_agree(models, mid):
    m = models[mid]
    op = AveragingOperator(m)
    rng = np.random.default_rng(5)
    f, g = random_pair(m, rng)
    left = bilinear_form(op, f, g, budget=400000, seed=11, side="left")
    right = bilinear_form(op, f, g, budget=400000, seed=12, side="right")
    sigma = math.hypot(left.stderr, right.stderr)
    assert abs(left.value - right.value) <= 4.0 * sigma


def test_lattice_pairing_agrees_with_mc(models):
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    rng = np.random.default_rng(6)
    f, g = random_pair(m, rng)
    det = op.lattice_pairing(f, g)
    mc = bilinear_form(op, f, g, budget=600000, seed=13)
    assert abs(det - mc.value) <= 4.0 * mc.stderr + 0.02 * max(det, mc.value)


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def test_refine_constant_kernel_keeps_everything():
    m = ConstantKernelModel(3, k=2)
    op = AveragingOperator(m, nt=9)
    f = unit_cube(3)
    rp = refine(op, f, f)
    assert rp.f_refined.cell_count == f.cell_count
    assert rp.g_refined.cell_count == f.cell_count


def test_refine_rejects_trivial_pair(models):
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    f = unit_cube(5, shift=0.0)
    g = unit_cube(5, shift=50.0)
    with pytest.raises(TrivialPairError):
        refine(op, f, g)


def test_refine_chain_inequality(models):
    """int_{G'} T chi_{F'} >= (1/3) int_G T chi_F up to quadrature tolerance."""
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    rng = np.random.default_rng(7)
    for _ in range(5):
        f, g = random_pair(m, rng)
        rp = refine(op, f, g)
        refined_pairing = op.lattice_pairing(rp.f_refined, rp.g_refined)
        assert refined_pairing >= rp.pairing / 3.0 - 0.02 * rp.pairing


def test_refine_idempotent_thresholds(models):
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    rng = np.random.default_rng(8)
    f, g = random_pair(m, rng)
    rp = refine(op, f, g)
    # the refined sets are sublattices of the originals
    assert rp.f_refined.cell_count <= f.cell_count
    assert np.all(f.contains(rp.f_refined.cell_centers()))
    assert np.all(g.contains(rp.g_refined.cell_centers()))


# ---------------------------------------------------------------------------
# generalized TT*T
# ---------------------------------------------------------------------------

def test_ttt_empty_refinement_is_zero(models):
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    f = unit_cube(5)
    empty = LatticeSet.empty(5)
    est = ttt_form(op, f, f, empty, empty, budget=10000, seed=0)
    assert est.value == 0.0


def test_ttt_constant_kernel_closed_form():
    # gamma = 0: pairing = |F cap G|, F' = G' = F cap G, and the three-fold
    # form collapses to |F cap G| (unit parameter box)
    m = ConstantKernelModel(3, k=2)
    op = AveragingOperator(m, nt=9)
    f = unit_cube(3)
    g = unit_cube(3, shift=0.25)
    rp = refine(op, f, g)
    overlap = 0.75 ** 3
    assert rp.pairing == pytest.approx(overlap, rel=1e-9)
    est = ttt_form(op, f, g, rp.f_refined, rp.g_refined, budget=200000, seed=2)
    assert abs(est.value - overlap) <= 4.0 * est.stderr + 1e-3
    chk = check_generalized_ttt(op, f, g, budget=200000, seed=3)
    assert chk.holds
    # structural slack: rhs/lhs == 27 |F| |G| / |F cap G|^2 >= 27
    assert chk.rhs / chk.lhs >= 27.0 * (1 - 1e-6)


@pytest.mark.parametrize("mid", ["maximal_r5", "asymmetric:2"])
def test_generalized_ttt_random_pairs(models, mid):
    m = models[mid]
    op = AveragingOperator(m, nt=9)
    rng = np.random.default_rng(mid == "maximal_r5" and 17 or 23)
    for _ in range(5):
        f, g = random_pair(m, rng)
        chk = check_generalized_ttt(op, f, g, budget=150000, seed=int(rng.integers(10 ** 6)))
        assert chk.holds, (chk.lhs, chk.rhs, chk.stderr)


def test_empty_f_gives_trivial_error():
    m = ConstantKernelModel(3, k=2)
    op = AveragingOperator(m, nt=9)
    with pytest.raises(TrivialPairError):
        refine(op, LatticeSet.empty(3), unit_cube(3))


# ---------------------------------------------------------------------------
# exponent algebra
# ---------------------------------------------------------------------------

def test_exponents_spec_points():
    se = SublevelExponents(Fraction(1), Fraction(2), Fraction(2))
    assert exponents_from_sublevel(se) == (Fraction(5, 8), Fraction(5, 8))
    se = SublevelExponents(Fraction(1), Fraction(3), Fraction(3))
    assert exponents_from_sublevel(se) == (Fraction(8, 13), Fraction(8, 13))
    se = SublevelExponents(Fraction(1), inf, Fraction(1))
    assert exponents_from_sublevel(se) == (Fraction(3, 4), Fraction(1, 2))


def test_exponents_epsilon_shift_rational():
    se = SublevelExponents(Fraction(1), Fraction(2), Fraction(2))
    ql, qr = exponents_from_sublevel(se, eps=Fraction(1, 10))
    assert ql == qr == (2 - Fraction(1, 10) + Fraction(1, 2)) / 4


def test_sharpness_criterion_all_models(models):
    for mid, m in models.items():
        assert sublevel_sharpness_criterion(m.sublevel_exponents, m.dimension_triple), mid


def test_sharpness_criterion_fails_off_model():
    se = SublevelExponents(Fraction(1), Fraction(2), Fraction(2))
    assert not sublevel_sharpness_criterion(se, (8, 8, 5))


def test_rwt_constant_single_pair(models):
    m = models["maximal_r5"]
    op = AveragingOperator(m)
    rng = np.random.default_rng(12)
    f, g = random_pair(m, rng)
    sup, rows = rwt_constant(op, [SetPair(f, g)], 0.625, 0.625,
                             budget=100000, seed=5)
    assert sup == pytest.approx(rows[0]["ratio"])
    assert sup > 0
    with pytest.raises(ValueError):
        rwt_constant(op, [], 0.5, 0.5, budget=10000, seed=0)
