"""Knapp example families, admissible Riesz triangles in exact rational
arithmetic, scaling-slope regression, and sharpness verdicts.

The ball F_eps is a lattice set at spacing eps/8 when the mask fits a cell
budget and an exact implicit ball otherwise (ambient dimensions 8 and 10
cannot hold a dense eps/8 mask).  The tube G_eps is an implicit set whose
membership distance is computed by a projected Gauss-Newton refinement of the
coarse-grid minimum of |x + gamma(t)| over the fixed parameter subdomain;
tests cross-check it against the literal grid minimum at moderate eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import LatticeSet
from .mc import McResult, box_volume, mc_run, uniform_in_box
from .models import AsymmetricModel, ConvolutionModel, ModelError, ModelSurface
from .transforms import AveragingOperator, SetPair, bilinear_form


@dataclass(frozen=True)
class DimensionTriple:
    n_l: int
    n_r: int
    ell: int

    def __post_init__(self):
        if not (0 < self.ell < min(self.n_l, self.n_r)):
            raise ValueError("need 0 < ell < min(n_L, n_R)")
        if self.n_l * self.n_r - self.ell ** 2 <= 0:
            raise ValueError("degenerate dimension triple")


def knapp_vertex(d: DimensionTriple) -> tuple[Fraction, Fraction]:
    """The nontrivial vertex of the admissible (1/q_L, 1/q_R) triangle forced
    by the Knapp scaling, in exact rational arithmetic."""
    den = d.n_l * d.n_r - d.ell ** 2
    return (Fraction(d.n_r * (d.n_l - d.ell), den),
            Fraction(d.n_l * (d.n_r - d.ell), den))


@dataclass(frozen=True)
class RieszTriangle:
    """Closed triangle in the (1/q_L, 1/q_R) square with vertices (1,0), (0,1)
    and one nontrivial vertex in the open square."""

    vertex: tuple[Fraction, Fraction]

    def __post_init__(self):
        x, y = self.vertex
        if not (0 < x < 1 and 0 < y < 1):
            raise ValueError("third vertex must lie in the open unit square")

    @property
    def vertices(self):
        return ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), self.vertex)


@dataclass(frozen=True)
class AdmissibleRegion:
    triangle: RieszTriangle
    # half-planes c_x * x + c_y * y <= 1
    constraint_l: tuple[Fraction, Fraction]
    constraint_r: tuple[Fraction, Fraction]

    def classify(self, point: tuple[Fraction, Fraction]) -> str:
        """'interior' / 'boundary' / 'exterior' relative to the triangle,
        with the segment from (1,0) to (0,1) counted as admissible boundary."""
        x, y = Fraction(point[0]), Fraction(point[1])
        c1 = self.constraint_l[0] * x + self.constraint_l[1] * y
        c2 = self.constraint_r[0] * x + self.constraint_r[1] * y
        if c1 > 1 or c2 > 1 or x + y < 1 or not (0 <= x <= 1 and 0 <= y <= 1):
            return "exterior"
        if c1 == 1 or c2 == 1 or x + y == 1:
            return "boundary"
        return "interior"

    def contains(self, point, include_boundary: bool = True) -> bool:
        cls = self.classify(point)
        return cls == "interior" or (include_boundary and cls == "boundary")


def admissible_region(d: DimensionTriple) -> AdmissibleRegion:
    return AdmissibleRegion(
        RieszTriangle(knapp_vertex(d)),
        (Fraction(1), Fraction(d.ell, d.n_l)),
        (Fraction(d.ell, d.n_r), Fraction(1)),
    )


def to_operator_point(q_pair: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    """Convert a bilinear point (1/q_L, 1/q_R) to operator coordinates
    (1/p, 1/q) = (1/q_L, 1 - 1/q_R)."""
    return Fraction(q_pair[0]), 1 - Fraction(q_pair[1])


# ---------------------------------------------------------------------------
# Implicit sets for the scaling families
# ---------------------------------------------------------------------------

_BALL_CELL_BUDGET = 10 ** 7


def unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)


@dataclass(frozen=True)
class BallSet:
    """Exact implicit euclidean ball (used when a lattice mask would not fit)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def measure(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    @property
    def bounding_box(self) -> np.ndarray:
        return np.column_stack([self.center - self.radius, self.center + self.radius])

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, float))
        return np.sum((pts - self.center) ** 2, axis=1) <= self.radius ** 2


class ConvolutionTube:
    """eps-neighborhood of {-gamma(t) : t in the parameter subdomain}."""

    def __init__(self, model: ConvolutionModel, eps: float,
                 subdomain_half: float = 0.5, tol: float = 1.05,
                 measure_budget: int = 10 ** 6, measure_seed: int = 90210):
        self.model = model
        self.eps = float(eps)
        self.sub = float(subdomain_half)
        self.tol = float(tol)
        self.dim = model.n_r
        self._measure: McResult | None = None
        self._measure_budget = measure_budget
        self._measure_seed = measure_seed
        k, n = model.k, model.n_l
        # surface-convention Jacobian polynomials of the quadratic block
        self._dg = [[model.gamma[k + m].partial(i) for i in range(k)]
                    for m in range(n - k)]
        # quadratic-component ranges over the subdomain, for the bounding box
        grid = np.meshgrid(*[np.linspace(-self.sub, self.sub, 9)] * k, indexing="ij")
        tpts = np.stack([g.ravel() for g in grid], axis=1)
        quad = np.column_stack([model.gamma[k + m].eval_many(tpts) for m in range(n - k)])
        pad = 2.0 * self.eps * self.tol
        lo = np.concatenate([np.full(k, -self.sub) - pad, (-quad).min(axis=0) - pad])
        hi = np.concatenate([np.full(k, self.sub) + pad, (-quad).max(axis=0) + pad])
        self._box = np.column_stack([lo, hi])

    @property
    def bounding_box(self) -> np.ndarray:
        return self._box

    def _gamma(self, t: np.ndarray) -> np.ndarray:
        return np.column_stack([g.eval_many(t) for g in self.model.gamma])

    def surface_distance(self, points: np.ndarray, newton_iters: int = 3) -> np.ndarray:
        """Distance from each point to the surface patch, via projected
        Gauss-Newton started at the tangential projection."""
        pts = np.atleast_2d(np.asarray(points, float))
        k, n = self.model.k, self.model.n_l
        t = np.clip(-pts[:, :k], -self.sub, self.sub)
        for _ in range(newton_iters):
            resid = pts + self._gamma(t)
            jac = np.zeros((pts.shape[0], n, k))
            jac[:, :k, :] = np.eye(k)
            for m in range(n - k):
                for i in range(k):
                    jac[:, k + m, i] = self._dg[m][i].eval_many(t)
            normal = np.einsum("pni,pnj->pij", jac, jac)
            rhs = -np.einsum("pni,pn->pi", jac, resid)
            step = np.linalg.solve(normal, rhs[..., None])[..., 0]
            t = np.clip(t + step, -self.sub, self.sub)
        return np.linalg.norm(pts + self._gamma(t), axis=1)

    def grid_min_distance(self, points: np.ndarray, spacing: float) -> np.ndarray:
        """Literal minimum of |x + gamma(t)| over a t-grid (cross-check path)."""
        pts = np.atleast_2d(np.asarray(points, float))
        k = self.model.k
        axes = [np.arange(-self.sub, self.sub + spacing / 2, spacing)] * k
        tpts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        gam = self._gamma(tpts)
        best = np.full(pts.shape[0], np.inf)
        for chunk in np.array_split(gam, max(1, gam.shape[0] // 512)):
            d = np.linalg.norm(pts[:, None, :] + chunk[None, :, :], axis=2)
            best = np.minimum(best, d.min(axis=1))
        return best

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.surface_distance(points) <= self.eps * self.tol

    @property
    def measure(self) -> float:
        if self._measure is None:
            box = self._box
            def batch(rng, m):
                return self.contains(uniform_in_box(rng, box, m)).astype(float)
            self._measure = mc_run(batch, self._measure_budget, self._measure_seed,
                                   scale=box_volume(box))
        return self._measure.value

    @property
    def measure_stderr(self) -> float:
        _ = self.measure
        return self._measure.stderr


class AsymmetricTube:
    """Projection of the preimage of an eps-ball through the plane-average
    geometry: {(t, y) : |t| <= subdomain, |y| <= eps * tol * sqrt(1 + t^2)}."""

    def __init__(self, model: AsymmetricModel, eps: float,
                 subdomain_half: float = 0.5, tol: float = 1.05):
        self.model = model
        self.eps = float(eps)
        self.sub = float(subdomain_half)
        self.tol = float(tol)
        self.dim = model.n_r

    @property
    def bounding_box(self) -> np.ndarray:
        d = self.model.d_r
        r = self.eps * self.tol * math.sqrt(1 + self.sub ** 2) * 1.001
        lo = np.concatenate([[-self.sub], np.full(d, -r)])
        hi = np.concatenate([[self.sub], np.full(d, r)])
        return np.column_stack([lo, hi])

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, float))
        t, y = pts[:, 0], pts[:, 1:]
        radius = self.eps * self.tol * np.sqrt(1 + t * t)
        return (np.abs(t) <= self.sub) & (np.sum(y * y, axis=1) <= radius ** 2)

    @property
    def measure(self) -> float:
        # int_{|t|<=s} v_d (eps tol sqrt(1+t^2))^d dt by fine midpoint quadrature
        d = self.model.d_r
        n = 20001
        t = -self.sub + (np.arange(n) + 0.5) * (2 * self.sub / n)
        vals = (1 + t * t) ** (d / 2.0)
        return unit_ball_volume(d) * (self.eps * self.tol) ** d * float(
            np.sum(vals) * (2 * self.sub / n))

    measure_stderr = 0.0


def knapp_sets(model: ModelSurface, eps: float,
               subdomain_half: float = 0.5, tol: float = 1.05,
               measure_budget: int = 10 ** 6, measure_seed: int = 90210) -> SetPair:
    """Adapted pair: ball of radius eps around the base projection in L, and
    the eps-thickened projection of its preimage in R."""
    if not 0 < eps <= 0.25:
        raise ModelError("knapp families need 0 < eps <= 1/4")
    spacing = eps / 8.0
    n_half = int(math.ceil(eps / spacing)) + 1
    if (2 * n_half) ** model.n_l <= _BALL_CELL_BUDGET:
        ball = LatticeSet.ball(np.zeros(model.n_l), eps, spacing)
    else:
        ball = BallSet(np.zeros(model.n_l), eps)
    if isinstance(model, ConvolutionModel):
        tube = ConvolutionTube(model, eps, subdomain_half, tol,
                               measure_budget, measure_seed)
    elif isinstance(model, AsymmetricModel):
        tube = AsymmetricTube(model, eps, subdomain_half, tol)
    else:
        raise ModelError(f"no knapp construction for {model.model_id}")
    return SetPair(ball, tube)


@dataclass(frozen=True)
class KnappFamily:
    model: ModelSurface
    epsilons: tuple[float, ...]
    subdomain_half: float = 0.5
    tol: float = 1.05

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if any(e > 0.25 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly decreasing and <= 1/4")
        object.__setattr__(self, "epsilons", eps)

    def sets(self, eps: float, **kw) -> SetPair:
        return knapp_sets(self.model, eps, self.subdomain_half, self.tol, **kw)


def default_epsilons(model: ModelSurface) -> tuple[float, ...]:
    if model.k <= 3:
        return tuple(2.0 ** (-j) for j in range(3, 8))
    return tuple(2.0 ** (-j) for j in range(3, 7))


@dataclass(frozen=True)
class KnappRow:
    eps: float
    meas_f: float
    meas_g: float
    meas_g_stderr: float
    pairing: float
    pairing_stderr: float
    seed: int


def knapp_sweep(model: ModelSurface, epsilons, budget: int, seed: int,
                workers: int = 1, subdomain_half: float = 0.5,
                tol: float = 1.05) -> list[KnappRow]:
    """Measure (|F_eps|, |G_eps|, pairing) across the epsilon list."""
    op = AveragingOperator(model)
    rows = []
    for idx, eps in enumerate(epsilons):
        pair = knapp_sets(model, eps, subdomain_half, tol,
                          measure_budget=budget, measure_seed=seed + 7919 * idx)
        est = bilinear_form(op, pair.f, pair.g, budget, seed,
                            side="left", workers=workers, stream=idx)
        rows.append(KnappRow(eps, pair.f.measure, pair.g.measure,
                             getattr(pair.g, "measure_stderr", 0.0),
                             est.value, est.stderr, seed))
    return rows


def _loglog_fit(xs, ys) -> tuple[float, float]:
    lx = np.log2(np.asarray(xs, float))
    ly = np.log2(np.asarray(ys, float))
    slope, intercept = np.polyfit(lx, ly, 1)
    fit = slope * lx + intercept
    ss_res = float(np.sum((ly - fit) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def slope_fit(epsilons, values, min_points: int = 4) -> tuple[float, float]:
    """Least-squares slope of log2(value) against log2(eps), with r^2."""
    eps = np.asarray(epsilons, float)
    vals = np.asarray(values, float)
    if eps.size < min_points:
        raise ValueError(f"need at least {min_points} points")
    if np.any(vals <= 0) or np.any(eps <= 0):
        raise ValueError("slope fit needs positive data")
    return _loglog_fit(eps, vals)


@dataclass(frozen=True)
class SharpnessResult:
    verdict: str           # "consistent" | "violated" | "boundary"
    ratio_slope: float
    position: str          # rational classification of the tested point
    ratios: tuple[float, ...]


def sharpness_verdict(model: ModelSurface, q_l_inv, q_r_inv,
                      sweep: list[KnappRow]) -> SharpnessResult:
    """Judge a candidate restricted weak-type point against the measured
    sweep: the ratio pairing / (|F|^{1/q_L} |G|^{1/q_R}) must stay bounded as
    eps decreases wherever the inequality can hold."""
    region = admissible_region(DimensionTriple(*model.dimension_triple))
    position = region.classify((Fraction(q_l_inv), Fraction(q_r_inv)))
    ratios = tuple(
        row.pairing / (row.meas_f ** float(q_l_inv) * row.meas_g ** float(q_r_inv))
        for row in sweep
    )
    slope, _ = slope_fit([row.eps for row in sweep], ratios,
                         min_points=min(4, len(sweep)))
    if slope < -0.1:
        verdict = "violated"
    elif position == "boundary" and abs(slope) <= 0.15:
        verdict = "boundary"
    else:
        verdict = "consistent"
    return SharpnessResult(verdict, slope, position, ratios)
