"""Discretized averaging operators, bilinear and three-fold forms, the
refinement construction, the generalized TT*T inequality check, and the
exponent algebra translating sublevel bounds into restricted weak-type pairs.

Set membership uses lattice cells and operator evaluation uses cell centers,
which makes the refinement deterministic and idempotent at fixed resolution.
The Monte Carlo forms sample measure-preserving charts whose support matches
the integrand (left chart over the bounding box of F, or occupied cells of
G'), rather than a fixed ambient box; this is the same integral with usable
variance at the configured budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf

import numpy as np

from .lattice import LatticeSet
from .mc import DEFAULT_PARTITIONS, McResult, box_volume, mc_run, uniform_in_box
from .models import ModelSurface, SublevelExponents


class TrivialPairError(ValueError):
    """The pair (F, G) has no interaction through the operator."""


@dataclass(frozen=True)
class SetPair:
    f: object  # set-like: dim / measure / contains / bounding_box
    g: object


@dataclass(frozen=True)
class RefinedPair:
    f_refined: LatticeSet
    g_refined: LatticeSet
    delta_f: float
    delta_g: float
    pairing: float  # the lattice quadrature value of int_G T chi_F


@dataclass(frozen=True)
class TttCheck:
    lhs: float
    rhs: float
    margin: float
    stderr: float
    pairing: float
    ttt: McResult

    @property
    def holds(self) -> bool:
        return self.margin >= -4.0 * self.stderr


def _midpoint_grid(box: np.ndarray, nt: int) -> tuple[np.ndarray, float]:
    box = np.asarray(box, dtype=float)
    axes = [box[i, 0] + (np.arange(nt) + 0.5) * (box[i, 1] - box[i, 0]) / nt
            for i in range(box.shape[0])]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    cell = box_volume(box) / nt ** box.shape[0]
    return pts, cell


@dataclass
class AveragingOperator:
    """Averaging operator of a model with midpoint parameter quadrature.

    ``nt`` is the number of quadrature points per parameter axis; Monte Carlo
    budgets are passed per call.  ``ambient_half`` bounds the boxes in which
    experiment sets live (the domain-size knob).
    """

    model: ModelSurface
    nt: int = 17
    ambient_half: float = 2.0

    def __post_init__(self):
        self._right_grid = None
        self._left_grid = None

    def right_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and weights on the right fiber parameter box."""
        if self._right_grid is None:
            pts, cell = _midpoint_grid(self.model.right_param_box(), self.nt)
            w = np.full(pts.shape[0], cell)
            w[~self.model.param_mask(pts)] = 0.0
            self._right_grid = (pts, w)
        return self._right_grid

    def left_grid(self) -> tuple[np.ndarray, np.ndarray]:
        if self._left_grid is None:
            pts, cell = _midpoint_grid(
                self.model.left_param_box(self.ambient_half), self.nt)
            w = np.full(pts.shape[0], cell)
            if self.model.family == "convolution":
                w[~self.model.param_mask(pts)] = 0.0
            self._left_grid = (pts, w)
        return self._left_grid

    # -- quadrature operators -------------------------------------------------

    def apply_t(self, f, x_r) -> float:
        """T f at a single right point: quadrature of f over the incidence fiber."""
        return float(self.apply_t_batch(f, np.atleast_2d(np.asarray(x_r, float)))[0])

    def apply_t_batch(self, f, xr: np.ndarray) -> np.ndarray:
        pts, w = self.right_grid()
        n, q = xr.shape[0], pts.shape[0]
        xr_rep = np.repeat(xr, q, axis=0)
        s_rep = np.tile(pts, (n, 1))
        u = self.model.right_chart_project_left(xr_rep, s_rep)
        vals = f.contains(u) if hasattr(f, "contains") else f(u)
        return (vals.astype(float).reshape(n, q) * w).sum(axis=1)

    def apply_t_star(self, g, x_l) -> float:
        return float(self.apply_t_star_batch(g, np.atleast_2d(np.asarray(x_l, float)))[0])

    def apply_t_star_batch(self, g, xl: np.ndarray) -> np.ndarray:
        pts, w = self.left_grid()
        n, q = xl.shape[0], pts.shape[0]
        xl_rep = np.repeat(xl, q, axis=0)
        s_rep = np.tile(pts, (n, 1))
        xr = self.model.left_chart_project_right(xl_rep, s_rep)
        vals = g.contains(xr) if hasattr(g, "contains") else g(xr)
        out = (vals.astype(float).reshape(n, q) * w).sum(axis=1)
        return out * self.model.left_point_mask(xl)

    def lattice_pairing(self, f: LatticeSet, g: LatticeSet) -> float:
        """Deterministic quadrature of int_G T chi_F over the cells of G."""
        centers = g.cell_centers()
        if centers.shape[0] == 0:
            return 0.0
        tf = self.apply_t_batch(f, centers)
        return float(np.sum(tf)) * g.spacing ** g.dim


def bilinear_form(
    op: AveragingOperator,
    f,
    g,
    budget: int,
    seed: int,
    side: str = "left",
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
    stream: int = 0,
) -> McResult:
    """MC estimate of the pairing int (T chi_F) chi_G.

    side="left" samples (u, s) with u over the bounding box of F and s over
    the left fiber box; side="right" samples the dual chart.  The two sides
    estimate the same integral and serve as a duality cross-check.
    """
    model = op.model
    if side == "left":
        box_u = np.asarray(f.bounding_box, float)
        box_s = model.left_param_box(op.ambient_half)
        def batch(rng, n):
            u = uniform_in_box(rng, box_u, n)
            s = uniform_in_box(rng, box_s, n)
            ok = model.left_point_mask(u)
            if model.family == "convolution":
                ok = ok & model.param_mask(s)
            xr = model.left_chart_project_right(u, s)
            return (ok & f.contains(u) & g.contains(xr)).astype(float)
    elif side == "right":
        box_u = np.asarray(g.bounding_box, float)
        box_s = model.right_param_box()
        def batch(rng, n):
            xr = uniform_in_box(rng, box_u, n)
            s = uniform_in_box(rng, box_s, n)
            ok = model.param_mask(s) if model.family == "convolution" else np.ones(n, bool)
            u = model.right_chart_project_left(xr, s)
            return (ok & g.contains(xr) & f.contains(u)).astype(float)
    else:
        raise ValueError("side must be 'left' or 'right'")
    scale = box_volume(box_u) * box_volume(box_s)
    return mc_run(batch, budget, seed, scale=scale,
                  partitions=partitions, workers=workers, stream=stream)


def random_box_pair(model: ModelSurface, rng: np.random.Generator,
                    spacing: float = 0.25) -> tuple[LatticeSet, LatticeSet]:
    """Random interacting box-union pair (F, G) for TT*T experiments: G boxes
    are anchored on chart images of F cells so the pairing cannot vanish."""
    n_l, n_r = model.n_l, model.n_r
    boxes_f = []
    for _ in range(int(rng.integers(1, 4))):
        lo = rng.uniform(-1.4, 0.6, size=n_l)
        side = rng.uniform(0.4, 1.0, size=n_l)
        boxes_f.append(np.column_stack([lo, lo + side]))
    f = LatticeSet.from_boxes(boxes_f, spacing, np.array([[-2.0, 2.0]] * n_l))
    centers = f.cell_centers()
    seeds = centers[rng.integers(0, centers.shape[0], size=3)]
    params = rng.uniform(-0.4, 0.4, size=(3, model.left_param_box().shape[0]))
    anchors = np.clip(model.left_chart_project_right(seeds, params), -1.4, 1.4)
    boxes_g = []
    for a in anchors:
        side = rng.uniform(0.4, 0.9, size=n_r)
        boxes_g.append(np.column_stack([a - side / 2, a + side / 2]))
    g = LatticeSet.from_boxes(boxes_g, spacing, np.array([[-2.0, 2.0]] * n_r))
    return f, g


def refine(op: AveragingOperator, f: LatticeSet, g: LatticeSet) -> RefinedPair:
    """Refinement step: keep the cells of F where T* chi_G is at least
    pairing / (3 |F|) and the cells of G where T chi_F is at least
    pairing / (3 |G|)."""
    if f.measure == 0.0 or g.measure == 0.0:
        raise TrivialPairError("F and G must have positive measure")
    pairing = op.lattice_pairing(f, g)
    if pairing <= 0.0:
        raise TrivialPairError("int_G T chi_F vanishes; trivial pair")
    delta_f = pairing / (3.0 * f.measure)
    delta_g = pairing / (3.0 * g.measure)
    t_star = op.apply_t_star_batch(g, f.cell_centers())
    t_fwd = op.apply_t_batch(f, g.cell_centers())
    return RefinedPair(
        f.restrict(t_star >= delta_f),
        g.restrict(t_fwd >= delta_g),
        delta_f,
        delta_g,
        pairing,
    )


def ttt_form(
    op: AveragingOperator,
    f,
    g,
    f_refined: LatticeSet,
    g_refined: LatticeSet,
    budget: int,
    seed: int,
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
    stream: int = 0,
) -> McResult:
    """MC estimate of the three-fold form int chi_G(pi_R m^l) chi_F'(pi_L m^c)
    chi_G'(pi_R m^c) chi_F(pi_L m^r) over the incidence space.

    The two outer fiber integrals are carried out by quadrature (they are the
    pointwise values T* chi_G and T chi_F), leaving an MC integral over the
    center point, importance-sampled from the occupied cells of G'.
    """
    model = op.model
    if g_refined.cell_count == 0 or f_refined.cell_count == 0:
        return McResult(0.0, 0.0, 0, seed)
    corners = g_refined.cell_corners()
    h = g_refined.spacing
    box_s = model.right_param_box()
    scale = g_refined.measure * box_volume(box_s)

    def batch(rng, n):
        pick = rng.integers(0, corners.shape[0], size=n)
        xr = corners[pick] + rng.random((n, g_refined.dim)) * h
        s = uniform_in_box(rng, box_s, n)
        ok = model.param_mask(s) if model.family == "convolution" else np.ones(n, bool)
        u = model.right_chart_project_left(xr, s)
        gate = ok & f_refined.contains(u)
        out = np.zeros(n)
        if np.any(gate):
            w_left = op.apply_t_star_batch(g, u[gate])
            w_right = op.apply_t_batch(f, xr[gate])
            out[gate] = w_left * w_right
        return out

    return mc_run(batch, budget, seed, scale=scale,
                  partitions=partitions, workers=workers, stream=stream)


def check_generalized_ttt(
    op: AveragingOperator,
    f: LatticeSet,
    g: LatticeSet,
    budget: int,
    seed: int,
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
    stream: int = 0,
) -> TttCheck:
    """Check (pairing / 3)^3 <= |F| |G| * (three-fold form on the refined pair)."""
    rp = refine(op, f, g)
    ttt = ttt_form(op, f, g, rp.f_refined, rp.g_refined, budget, seed,
                   partitions=partitions, workers=workers, stream=stream)
    lhs = (rp.pairing / 3.0) ** 3
    rhs = f.measure * g.measure * ttt.value
    stderr = f.measure * g.measure * ttt.stderr
    return TttCheck(lhs, rhs, rhs - lhs, stderr, rp.pairing, ttt)


# ---------------------------------------------------------------------------
# Exponent algebra
# ---------------------------------------------------------------------------

def _dual_inv(p) -> Fraction:
    """1/p' as an exact fraction, with 1/inf = 0."""
    if p == inf:
        return Fraction(1)
    p = Fraction(p)
    if p < 1:
        raise ValueError("exponents live in [1, inf]")
    return 1 - 1 / p


def exponents_from_sublevel(
    se: SublevelExponents, eps: Fraction = Fraction(0)
) -> tuple[Fraction, Fraction]:
    """Restricted weak-type pair (1/q_L, 1/q_R) implied by a sublevel bound
    with exponents (s, p_l, p_r) and interpolation loss eps, exactly."""
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    s = Fraction(se.s)
    x = _dual_inv(se.p_l) / s
    y = _dual_inv(se.p_r) / s
    den = 3 + x + y
    return (2 - eps + x) / den, (2 - eps + y) / den


def sublevel_sharpness_criterion(se: SublevelExponents, dims: tuple[int, int, int]) -> bool:
    """Exact test that the sublevel exponents saturate the Knapp constraints:
    1 + 1/(s p_l') = ell / d_L and 1 + 1/(s p_r') = ell / d_R, where
    d_L = n_R - ell and d_R = n_L - ell."""
    n_l, n_r, ell = dims
    s = Fraction(se.s)
    lhs_l = 1 + _dual_inv(se.p_l) / s
    lhs_r = 1 + _dual_inv(se.p_r) / s
    return lhs_l == Fraction(ell, n_r - ell) and lhs_r == Fraction(ell, n_l - ell)


def rwt_constant(
    op: AveragingOperator,
    family: list[SetPair],
    q_l_inv: float,
    q_r_inv: float,
    budget: int,
    seed: int,
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
) -> tuple[float, list[dict]]:
    """Largest observed ratio pairing / (|F|^{1/q_L} |G|^{1/q_R}) over a family."""
    if not family:
        raise ValueError("family must be nonempty")
    rows = []
    best = 0.0
    for idx, pair in enumerate(family):
        est = bilinear_form(op, pair.f, pair.g, budget, seed,
                            partitions=partitions, workers=workers, stream=idx)
        denom = pair.f.measure ** float(q_l_inv) * pair.g.measure ** float(q_r_inv)
        ratio = est.value / denom if denom > 0 else 0.0
        rows.append({"pairing": est.value, "stderr": est.stderr,
                     "den": denom, "ratio": ratio})
        best = max(best, ratio)
    return best, rows
