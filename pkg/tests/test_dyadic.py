import math
from math import inf

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radonlab.dyadic import (
    DyadicSeq,
    InterpParams,
    admissible_constant,
    harmonic_params,
    interp_bound,
    maximal_params,
    min_interp_sum,
    normalize_params,
    proof_operator_bounds,
    proof_t0,
    proof_t1,
    pw,
)


def random_seq(rng, lo=-20, hi=20, density=0.4, scale=2.0):
    data = {}
    for i in range(lo, hi + 1):
        if rng.random() < density:
            data[i] = float(rng.exponential(scale))
    return DyadicSeq(data)


# ---------------------------------------------------------------------------
# conventions and validation
# ---------------------------------------------------------------------------

def test_power_convention_at_infinity():
    assert pw(5.0, 0.0) == 1.0
    assert pw(0.0, 0.0) == 0.0
    assert pw(4.0, 0.5) == 2.0
    with pytest.raises(ValueError):
        pw(-1.0, 0.5)


def test_seq_rejects_negative():
    with pytest.raises(ValueError):
        DyadicSeq({0: -1.0})


def test_params_validation():
    with pytest.raises(ValueError):  # degenerate a-determinant
        InterpParams(a0=1, a1=1, b0=-1, b1=1, p0=2, p1=2, q0=2, q1=2, theta=0.5)
    with pytest.raises(ValueError):  # violates 1/p + 1/q >= 1
        InterpParams(a0=1, a1=-1, b0=-1, b1=1, p0=2, p1=3, q0=3, q1=2, theta=0.5)
    with pytest.raises(ValueError):
        InterpParams(a0=1, a1=-1, b0=-1, b1=1, p0=inf, p1=1, q0=1, q1=inf, theta=1.5)


def test_model_instantiations_interpolate_to_square_root_pair():
    pm = maximal_params(alpha=1.0)
    assert pm.p_theta_inv == pytest.approx(0.5)
    assert pm.q_theta_inv == pytest.approx(0.5)
    assert pm.a_theta == 0.0 and pm.b_theta == 0.0
    ph = harmonic_params(alpha=1.0)
    assert ph.p_theta_inv == pytest.approx(0.5)
    assert ph.a_theta == pytest.approx(-0.5) and ph.b_theta == pytest.approx(-0.5)


# ---------------------------------------------------------------------------
# left and right sides
# ---------------------------------------------------------------------------

def test_lhs_zero_sequences():
    pm = maximal_params()
    assert min_interp_sum(pm, DyadicSeq({}), DyadicSeq({0: 1.0})) == 0.0
    assert interp_bound(pm, DyadicSeq({}), DyadicSeq({0: 1.0})) == 0.0


def test_lhs_unit_spikes():
    pm = maximal_params(alpha=1.0)
    f, g = DyadicSeq.spike(0), DyadicSeq.spike(0)
    assert min_interp_sum(pm, f, g) == pytest.approx(1.0)


def test_rhs_maximal_is_geometric_mean():
    pm = maximal_params(alpha=3.0)
    rng = np.random.default_rng(1)
    f, g = random_seq(rng), random_seq(rng)
    expected = 3.0 * math.sqrt(f.total()) * math.sqrt(g.total())
    assert interp_bound(pm, f, g) == pytest.approx(expected, rel=1e-12)


def test_rhs_harmonic_weights():
    ph = harmonic_params(alpha=2.0)
    rng = np.random.default_rng(2)
    f, g = random_seq(rng), random_seq(rng)
    sf = sum(2.0 ** (-i) * v for i, v in f.items())
    sg = sum(2.0 ** (-j) * v for j, v in g.items())
    assert interp_bound(ph, f, g) == pytest.approx(2.0 * math.sqrt(sf) * math.sqrt(sg),
                                                   rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(-10, 10), st.integers(0, 10 ** 6))
def test_homogeneity_exact_dyadic_scaling(m, seed):
    # lambda an even power of two: scaling A_0, A_1 multiplies both sides
    # exactly (pure exponent shifts commute with every rounding involved)
    lam = 4.0 ** m
    rng = np.random.default_rng(seed)
    f, g = random_seq(rng, -8, 8), random_seq(rng, -8, 8)
    pm = maximal_params(alpha=1.0)
    scaled = pm.scaled(lam)
    assert min_interp_sum(scaled, f, g) == lam * min_interp_sum(pm, f, g)
    assert interp_bound(scaled, f, g) == lam * interp_bound(pm, f, g)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 100.0), st.integers(0, 10 ** 6))
def test_homogeneity_general_scaling(lam, seed):
    rng = np.random.default_rng(seed)
    f, g = random_seq(rng, -8, 8), random_seq(rng, -8, 8)
    pm = harmonic_params(alpha=1.0)
    scaled = pm.scaled(lam)
    assert min_interp_sum(scaled, f, g) == pytest.approx(
        lam * min_interp_sum(pm, f, g), rel=1e-12)
    assert interp_bound(scaled, f, g) == pytest.approx(
        lam * interp_bound(pm, f, g), rel=1e-12)


# ---------------------------------------------------------------------------
# proof operators
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("params", [maximal_params(), harmonic_params()])
def test_proof_operator_bounds_hold(params):
    norm = normalize_params(params)
    bounds = proof_operator_bounds(norm)
    rng = np.random.default_rng(14)
    support = range(-60, 61)
    violations = 0
    for trial in range(100):
        e = random_seq(rng, -20, 20)
        if not e.data:
            continue
        s = float(rng.uniform(-3, 3))
        t0e = proof_t0(norm, s, e, support)
        t1e = proof_t1(norm, s, e, support)
        e_inf = max(e.data.values())
        e_one = e.total()
        if t0e.data and max(t0e.data.values()) > bounds["t0_inf"] * e_inf * (1 + 1e-12):
            violations += 1
        if t0e.total() > bounds["t0_one"] * e_one * (1 + 1e-12):
            violations += 1
        if t1e.data and max(t1e.data.values()) > bounds["t1_inf"] * e_inf * (1 + 1e-12):
            violations += 1
        if t1e.total() > bounds["t1_one"] * e_one * (1 + 1e-12):
            violations += 1
    assert violations == 0


def test_admissible_constants_for_model_parameter_sets():
    # both parameter families normalize to the same geometric structure
    assert admissible_constant(maximal_params()) == pytest.approx(4.0)
    assert admissible_constant(harmonic_params()) == pytest.approx(4.0)


def test_admissible_constant_rejects_degenerate():
    with pytest.raises(ValueError):
        admissible_constant(
            InterpParams(a0=1, a1=1, b0=-1, b1=1, p0=2, p1=2, q0=2, q1=2, theta=0.5))


@pytest.mark.parametrize("params", [maximal_params(2.0), harmonic_params(0.7)])
def test_main_inequality_random_pairs(params):
    c = admissible_constant(params)
    rng = np.random.default_rng(99)
    violations = 0
    worst = 0.0
    for _ in range(1000):
        f, g = random_seq(rng), random_seq(rng)
        lhs = min_interp_sum(params, f, g)
        rhs = c * interp_bound(params, f, g)
        if lhs > rhs * (1 + 1e-12):
            violations += 1
        if rhs > 0:
            worst = max(worst, lhs / rhs)
    assert violations == 0
    print(f"\n  sharpest observed lhs/(C rhs) ratio: {worst:.4f}")
