"""Model averaging geometries: surfaces, projection frames, incidence triples.

Three families are provided:

* convolution models (``maximal_r5``, ``maximal_c5``, ``harmonic_r8``): the
  manifold is ``{(x, t)}`` with projections ``pi_L = x + gamma(t)`` and
  ``pi_R = x``;
* the asymmetric family (``asymmetric:<d_R>``): ``{(x, y, t)}`` with
  ``pi_L = (x, y + t x)`` and ``pi_R = (t, y)``;
* generic bilinear models (``bilinear:<json>``): ``{(x, y, z)}`` with
  ``pi_L = (y, z + Q(x, y))`` and ``pi_R = (x, z)``.

Each surface map is kept in two conventions that differ by an invertible
linear output map: ``gamma`` (monomial coefficients 1/2-free, used by the
averaging operators and Knapp constructions) and the frame convention with
halved squares, whose kernel fields have the clean transported-derivative
formulas used by the curvature functionals.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf

import numpy as np

from .poly import (
    DimensionMismatch,
    MultiPoly,
    PolyVectorField,
    lie_bracket,
    spanning_check,
    wedge_volume,
    weighted_field,
)


class ModelError(ValueError):
    pass


class DegenerateInputWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FramePair:
    """Bases of ker d pi_L (left) and ker d pi_R (right) plus dimension data."""

    left: tuple[PolyVectorField, ...]
    right: tuple[PolyVectorField, ...]
    dims: tuple[int, int, int, int]  # (n_L, n_R, ell, k)

    @property
    def d_l(self) -> int:
        return len(self.left)

    @property
    def d_r(self) -> int:
        return len(self.right)


@dataclass(frozen=True)
class SublevelExponents:
    """Exponents (s, p_l, p_r) of a restricted weak-type sublevel bound."""

    s: Fraction
    p_l: object  # Fraction or math.inf
    p_r: object

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("s must be positive")


@dataclass(frozen=True)
class QuadraticModel:
    """Bilinear map Q : R^{d_L} x R^{d_R} -> R^ell stored as a coefficient tensor."""

    d_l: int
    d_r: int
    ell: int
    tensor: np.ndarray  # shape (d_l, d_r, ell)

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=float)
        if t.shape != (self.d_l, self.d_r, self.ell):
            raise ModelError(f"tensor shape {t.shape} != {(self.d_l, self.d_r, self.ell)}")
        if self.d_l + self.d_r < self.ell:
            raise ModelError("need d_l + d_r >= ell")
        object.__setattr__(self, "tensor", t)

    def apply(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijm->m", np.asarray(x, float), np.asarray(y, float), self.tensor)

    def left_slices(self, y) -> np.ndarray:
        """Rows Q(e_i, y), shape (d_l, ell)."""
        return np.einsum("j,ijm->im", np.asarray(y, float), self.tensor)

    def right_slices(self, x) -> np.ndarray:
        """Rows Q(x, e_j), shape (d_r, ell)."""
        return np.einsum("i,ijm->jm", np.asarray(x, float), self.tensor)


@dataclass(frozen=True)
class IncidenceTriple:
    """A matched triple (m^l, m^c, m^r) with pi_L(m^l) = pi_L(m^c), pi_R(m^r) = pi_R(m^c).

    ``t_l``/``t_r`` are the left/right fiber coordinates of m^l and m^r,
    ``t_c`` the fiber-reference coordinates of the center and ``x_c`` the rest
    of the center point; the exact layout is fixed by the owning model family
    (see the model's ``incidence`` docstring).
    """

    model: "ModelSurface"
    t_l: np.ndarray
    t_c: np.ndarray
    t_r: np.ndarray
    x_c: np.ndarray

    def __post_init__(self):
        for name, arr in (("t_l", self.t_l), ("t_c", self.t_c),
                          ("t_r", self.t_r), ("x_c", self.x_c)):
            object.__setattr__(self, name, np.asarray(arr, dtype=float).ravel())
        self.model.validate_triple(self)

    @property
    def m_l(self) -> np.ndarray:
        return self.model.point_left(self)

    @property
    def m_c(self) -> np.ndarray:
        return self.model.point_center(self)

    @property
    def m_r(self) -> np.ndarray:
        return self.model.point_right(self)


def _embed(poly: MultiPoly, total_dim: int, offset: int) -> MultiPoly:
    """Re-express a polynomial in a larger variable space, shifting indices."""
    terms = {}
    for mono, coeff in poly.terms.items():
        new = [0] * total_dim
        for i, e in enumerate(mono):
            new[offset + i] = e
        terms[tuple(new)] = coeff
    return MultiPoly(total_dim, terms)


def _box(dim: int, half: float) -> np.ndarray:
    return np.array([[-half, half]] * dim, dtype=float)


class ModelSurface:
    """Common surface for all model families.  Concrete families fill in the
    projection charts and the center-quotient reduction used by the transported
    curvature maps."""

    model_id: str
    family: str
    k: int
    n_l: int
    n_r: int
    ell: int
    ambient_dim: int
    frames: FramePair
    pi_l: tuple[MultiPoly, ...]
    pi_r: tuple[MultiPoly, ...]
    gamma: tuple[MultiPoly, ...] | None
    sublevel_exponents: SublevelExponents | None

    @property
    def d_l(self) -> int:
        return self.n_r - self.ell

    @property
    def d_r(self) -> int:
        return self.n_l - self.ell

    @property
    def kappa(self) -> int:
        return self.d_l + self.d_r - self.ell

    @property
    def dimension_triple(self):
        return (self.n_l, self.n_r, self.ell)

    # fiber parameter boxes for quadrature / sampling.  The right box is the
    # operator's kernel domain; the left box is the fiber coordinate range
    # needed to reach sets inside the ambient box (they coincide for
    # convolution models).
    def left_param_box(self, ambient_half: float = 2.0) -> np.ndarray:
        return _box(self.d_l, 1.0)

    def right_param_box(self) -> np.ndarray:
        return _box(self.d_r, 1.0)

    def param_mask(self, t: np.ndarray) -> np.ndarray:
        """Indicator of the operator's parameter region inside its box."""
        return np.ones(np.atleast_2d(t).shape[0], dtype=bool)

    def left_point_mask(self, u: np.ndarray) -> np.ndarray:
        """Kernel-domain constraint seen from a left-space point (the adjoint
        vanishes off this set); trivial for convolution models."""
        return np.ones(np.atleast_2d(u).shape[0], dtype=bool)

    # -- projections ---------------------------------------------------------

    def project_left(self, m: np.ndarray) -> np.ndarray:
        return np.array([p(m) for p in self.pi_l], dtype=float)

    def project_right(self, m: np.ndarray) -> np.ndarray:
        return np.array([p(m) for p in self.pi_r], dtype=float)

    def _jacobian(self, polys: tuple[MultiPoly, ...], m: np.ndarray) -> np.ndarray:
        return np.array(
            [[p.partial(j)(m) for j in range(self.ambient_dim)] for p in polys],
            dtype=float,
        )

    def d_pi_l(self, m: np.ndarray, vec: np.ndarray) -> np.ndarray:
        return self._jacobian(self.pi_l, m) @ np.asarray(vec, float)

    def d_pi_r(self, m: np.ndarray, vec: np.ndarray) -> np.ndarray:
        return self._jacobian(self.pi_r, m) @ np.asarray(vec, float)

    # -- incidence ------------------------------------------------------------

    def incidence(self, t_l, t_c, t_r, x_c) -> IncidenceTriple:
        return IncidenceTriple(self, t_l, t_c, t_r, x_c)

    def validate_triple(self, p: IncidenceTriple):
        raise NotImplementedError

    def point_left(self, p: IncidenceTriple) -> np.ndarray:
        raise NotImplementedError

    def point_center(self, p: IncidenceTriple) -> np.ndarray:
        raise NotImplementedError

    def point_right(self, p: IncidenceTriple) -> np.ndarray:
        raise NotImplementedError

    def shift_left_param(self, p: IncidenceTriple, delta: np.ndarray) -> IncidenceTriple:
        """Move m^l along its pi_L-fiber coordinates (the exact kernel-field flow)."""
        return self.incidence(p.t_l + np.asarray(delta, float), p.t_c, p.t_r, p.x_c)

    # -- transported curvature maps -------------------------------------------

    def reduce_center(self, p: IncidenceTriple, w: np.ndarray) -> np.ndarray:
        """Canonical representative of a tangent vector at m^c modulo
        ker d pi_L + ker d pi_R, expressed in the ell quotient coordinates."""
        raise NotImplementedError

    def lift_left(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        """Some tangent vector Y at m^c with d pi_L(Y) = v."""
        raise NotImplementedError

    def lift_right(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        """Some tangent vector Y at m^c with d pi_R(Y) = v."""
        raise NotImplementedError

    def embed_quotient(self, c: np.ndarray) -> np.ndarray:
        """Canonical ambient representative of a quotient ell-vector."""
        raise NotImplementedError

    def transport_left(self, p: IncidenceTriple, v_field: PolyVectorField) -> np.ndarray:
        """C_p^l V: push V(m^l) through pi_L, lift to m^c, reduce mod kernels."""
        m_l = p.m_l
        v = self.d_pi_l(m_l, v_field(m_l))
        return self.reduce_center(p, self.lift_left(p, v))

    def transport_right(self, p: IncidenceTriple, v_field: PolyVectorField) -> np.ndarray:
        m_r = p.m_r
        v = self.d_pi_r(m_r, v_field(m_r))
        return self.reduce_center(p, self.lift_right(p, v))

    # -- Monte Carlo charts ----------------------------------------------------

    def left_chart_project_right(self, u: np.ndarray, s: np.ndarray) -> np.ndarray:
        """pi_R of the point with pi_L = u and left-fiber coordinate s (batched)."""
        raise NotImplementedError

    def right_chart_project_left(self, xr: np.ndarray, s: np.ndarray) -> np.ndarray:
        """pi_L of the point with pi_R = xr and right-fiber coordinate s (batched)."""
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Convolution models  (M = {(x, t)},  pi_L = x + gamma(t),  pi_R = x)
# ---------------------------------------------------------------------------

class ConvolutionModel(ModelSurface):
    family = "convolution"

    def __init__(self, model_id: str, k: int, n: int,
                 gamma_quad: list[MultiPoly], frame_quad: list[MultiPoly],
                 sublevel: SublevelExponents | None):
        # gamma_quad / frame_quad: the ell quadratic components in the display
        # and frame conventions respectively, as polynomials in the k parameters.
        self.model_id = model_id
        self.k = k
        self.n_l = self.n_r = n
        self.ell = n - k
        self.ambient_dim = n + k
        self.sublevel_exponents = sublevel
        if len(gamma_quad) != self.ell or len(frame_quad) != self.ell:
            raise ModelError("need ell quadratic components")

        dim = self.ambient_dim
        self._q = tuple(frame_quad)           # in k parameter variables
        self._gamma_quad = tuple(gamma_quad)  # in k parameter variables

        # full surface maps R^k -> R^n in both conventions
        lin = [MultiPoly.variable(k, i) for i in range(k)]
        self.gamma = tuple(lin + list(gamma_quad))
        self.frame_gamma = tuple(lin + list(frame_quad))

        # dq[i][m] = d q_m / d t_i  (k x ell array of k-variable polynomials)
        self._dq = [[qm.partial(i) for qm in self._q] for i in range(k)]

        # projections on M-coordinates (x_0..x_{n-1}, t_0..t_{k-1})
        x_vars = [MultiPoly.variable(dim, i) for i in range(n)]
        self.pi_l = tuple(
            x_vars[m] + _embed(self.frame_gamma[m], dim, n) for m in range(n)
        )
        self.pi_r = tuple(x_vars)

        left = []
        for i in range(k):
            comps = {n + i: MultiPoly.constant(dim, 1), i: MultiPoly.constant(dim, -1)}
            for m in range(self.ell):
                dq = _embed(self._dq[i][m], dim, n)
                if not dq.is_zero:
                    comps[k + m] = -dq
            left.append(PolyVectorField.from_dict(dim, comps))
        right = [PolyVectorField.coordinate(dim, n + j) for j in range(k)]
        self.frames = FramePair(tuple(left), tuple(right), (n, n, self.ell, k))

    # fiber parameters on both sides are the k surface parameters
    def left_param_box(self, ambient_half: float = 2.0) -> np.ndarray:
        return _box(self.k, 1.0)

    def right_param_box(self) -> np.ndarray:
        return _box(self.k, 1.0)

    def _gamma_batch(self, t: np.ndarray, convention: str = "gamma") -> np.ndarray:
        polys = self.gamma if convention == "gamma" else self.frame_gamma
        t = np.atleast_2d(np.asarray(t, float))
        return np.column_stack([p.eval_many(t) for p in polys])

    def gamma_point(self, t, convention: str = "gamma") -> np.ndarray:
        return self._gamma_batch(np.asarray(t, float)[None, :], convention)[0]

    # -- incidence ------------------------------------------------------------

    def validate_triple(self, p: IncidenceTriple):
        if not (p.t_l.size == p.t_c.size == p.t_r.size == self.k):
            raise DimensionMismatch("parameter vectors must have length k")
        if p.x_c.size != self.n_l:
            raise DimensionMismatch("x_c must have the ambient length n")

    def point_center(self, p: IncidenceTriple) -> np.ndarray:
        return np.concatenate([p.x_c, p.t_c])

    def point_right(self, p: IncidenceTriple) -> np.ndarray:
        return np.concatenate([p.x_c, p.t_r])

    def point_left(self, p: IncidenceTriple) -> np.ndarray:
        x_l = p.x_c + self.gamma_point(p.t_c, "frame") - self.gamma_point(p.t_l, "frame")
        return np.concatenate([x_l, p.t_l])

    # -- quotient reduction -----------------------------------------------------

    def _dq_at(self, t: np.ndarray) -> np.ndarray:
        """Matrix [i, m] = d q_m / d t_i evaluated at t."""
        return np.array([[dqm(t) for dqm in row] for row in self._dq], dtype=float)

    def reduce_center(self, p: IncidenceTriple, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, float)
        w_x, _ = w[: self.n_l], w[self.n_l:]
        return w_x[self.k:] - self._dq_at(p.t_c).T @ w_x[: self.k]

    def lift_left(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        return np.concatenate([np.asarray(v, float), np.zeros(self.k)])

    lift_right = lift_left

    def embed_quotient(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros(self.ambient_dim)
        out[self.k: self.n_l] = np.asarray(c, float)
        return out

    # -- charts -----------------------------------------------------------------

    def left_chart_project_right(self, u: np.ndarray, s: np.ndarray) -> np.ndarray:
        return np.asarray(u, float) - self._gamma_batch(s)

    def right_chart_project_left(self, xr: np.ndarray, s: np.ndarray) -> np.ndarray:
        return np.asarray(xr, float) + self._gamma_batch(s)


class ComplexMaximalModel(ConvolutionModel):
    """The complex maximal quadratic model realized over R^4 parameters."""

    def param_mask(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(np.asarray(t, float))
        return np.hypot(t[:, 0], t[:, 1]) + np.hypot(t[:, 2], t[:, 3]) <= 1.0


# ---------------------------------------------------------------------------
# Asymmetric models  (M = {(x, y, t)},  pi_L = (x, y + t x),  pi_R = (t, y))
# ---------------------------------------------------------------------------

class AsymmetricModel(ModelSurface):
    family = "asymmetric"

    def __init__(self, d_r: int):
        if d_r < 1:
            raise ModelError("d_r must be >= 1")
        self.model_id = f"asymmetric:{d_r}"
        self.k = d_r                      # the operator integrates over x in R^{d_r}
        self.n_l = 2 * d_r
        self.n_r = d_r + 1
        self.ell = d_r
        self.ambient_dim = 2 * d_r + 1    # coordinates (x, y, t)
        d = d_r
        dim = self.ambient_dim
        self.sublevel_exponents = (
            SublevelExponents(Fraction(1, d - 1), inf, Fraction(1)) if d >= 2 else None
        )
        self.gamma = None

        x = [MultiPoly.variable(dim, i) for i in range(d)]
        y = [MultiPoly.variable(dim, d + i) for i in range(d)]
        t = MultiPoly.variable(dim, 2 * d)
        self.pi_l = tuple(x + [y[j] + t * x[j] for j in range(d)])
        self.pi_r = tuple([t] + y)

        x_l = PolyVectorField.from_dict(
            dim, {2 * d: MultiPoly.constant(dim, 1),
                  **{d + j: -x[j] for j in range(d)}})
        x_rs = [PolyVectorField.coordinate(dim, j) for j in range(d)]
        self.frames = FramePair((x_l,), tuple(x_rs), (self.n_l, self.n_r, self.ell, d))

    def left_param_box(self, ambient_half: float = 2.0) -> np.ndarray:
        # the left fiber coordinate is the scalar output coordinate t
        return _box(1, ambient_half)

    def right_param_box(self) -> np.ndarray:
        return _box(self.d_r, 1.0)

    def left_point_mask(self, u: np.ndarray) -> np.ndarray:
        # pi_L = (x, y + t x): the kernel integrates over x in the unit box
        u = np.atleast_2d(np.asarray(u, float))
        return np.all(np.abs(u[:, : self.d_r]) <= 1.0, axis=1)

    # incidence layout: t_l = (t-coordinate of m^l,), t_c = (t^c,),
    # t_r = x-coordinate of m^r in R^{d_r}, x_c = (x^c, y^c) in R^{2 d_r}.
    def validate_triple(self, p: IncidenceTriple):
        d = self.d_r
        if p.t_l.size != 1 or p.t_c.size != 1:
            raise DimensionMismatch("left fiber coordinate is scalar")
        if p.t_r.size != d or p.x_c.size != 2 * d:
            raise DimensionMismatch("need t_r in R^d_r and x_c = (x^c, y^c) in R^{2 d_r}")

    def _split_center(self, p: IncidenceTriple):
        d = self.d_r
        return p.x_c[:d], p.x_c[d:]

    def point_center(self, p: IncidenceTriple) -> np.ndarray:
        xc, yc = self._split_center(p)
        return np.concatenate([xc, yc, p.t_c])

    def point_left(self, p: IncidenceTriple) -> np.ndarray:
        xc, yc = self._split_center(p)
        return np.concatenate([xc, yc + (p.t_c[0] - p.t_l[0]) * xc, p.t_l])

    def point_right(self, p: IncidenceTriple) -> np.ndarray:
        _, yc = self._split_center(p)
        return np.concatenate([p.t_r, yc, p.t_c])

    def reduce_center(self, p: IncidenceTriple, w: np.ndarray) -> np.ndarray:
        d = self.d_r
        xc, _ = self._split_center(p)
        w = np.asarray(w, float)
        return w[d: 2 * d] + w[2 * d] * xc

    def lift_left(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        d = self.d_r
        v = np.asarray(v, float)
        return np.concatenate([v[:d], v[d:] - p.t_c[0] * v[:d], [0.0]])

    def lift_right(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        d = self.d_r
        v = np.asarray(v, float)
        return np.concatenate([np.zeros(d), v[1:], [v[0]]])

    def embed_quotient(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros(self.ambient_dim)
        out[self.d_r: 2 * self.d_r] = np.asarray(c, float)
        return out

    def left_chart_project_right(self, u: np.ndarray, s: np.ndarray) -> np.ndarray:
        d = self.d_r
        u = np.atleast_2d(np.asarray(u, float))
        tau = np.atleast_2d(np.asarray(s, float))[:, 0]
        return np.column_stack([tau, u[:, d:] - tau[:, None] * u[:, :d]])

    def right_chart_project_left(self, xr: np.ndarray, s: np.ndarray) -> np.ndarray:
        xr = np.atleast_2d(np.asarray(xr, float))
        xi = np.atleast_2d(np.asarray(s, float))
        t, y = xr[:, 0], xr[:, 1:]
        return np.column_stack([xi, y + t[:, None] * xi])


# ---------------------------------------------------------------------------
# Generic bilinear models  (M = {(x, y, z)}, pi_L = (y, z + Q(x,y)), pi_R = (x, z))
# ---------------------------------------------------------------------------

class BilinearModel(ModelSurface):
    family = "bilinear"

    def __init__(self, q: QuadraticModel, model_id: str | None = None):
        self.q = q
        self.model_id = model_id or f"bilinear:{q.d_l}x{q.d_r}->{q.ell}"
        self.k = q.d_r
        self.n_l = q.d_r + q.ell
        self.n_r = q.d_l + q.ell
        self.ell = q.ell
        self.ambient_dim = q.d_l + q.d_r + q.ell
        self.sublevel_exponents = None
        self.gamma = None

        dl, dr, ell = q.d_l, q.d_r, q.ell
        dim = self.ambient_dim
        x = [MultiPoly.variable(dim, i) for i in range(dl)]
        y = [MultiPoly.variable(dim, dl + j) for j in range(dr)]
        z = [MultiPoly.variable(dim, dl + dr + m) for m in range(ell)]

        def q_poly(m: int) -> MultiPoly:
            out = MultiPoly.zero(dim)
            for i in range(dl):
                for j in range(dr):
                    c = q.tensor[i, j, m]
                    if c != 0:
                        out = out + (x[i] * y[j]).scale(c)
            return out

        self.pi_l = tuple(y + [z[m] + q_poly(m) for m in range(ell)])
        self.pi_r = tuple(x + z)

        left = []
        for i in range(dl):
            comps = {i: MultiPoly.constant(dim, 1)}
            for m in range(ell):
                coeff = MultiPoly.zero(dim)
                for j in range(dr):
                    c = q.tensor[i, j, m]
                    if c != 0:
                        coeff = coeff + y[j].scale(c)
                if not coeff.is_zero:
                    comps[dl + dr + m] = -coeff
            left.append(PolyVectorField.from_dict(dim, comps))
        right = [PolyVectorField.coordinate(dim, dl + j) for j in range(dr)]
        self.frames = FramePair(tuple(left), tuple(right),
                                (self.n_l, self.n_r, ell, self.k))

    def left_param_box(self, ambient_half: float = 2.0) -> np.ndarray:
        # the left fiber coordinate is the ambient x block
        return _box(self.q.d_l, ambient_half)

    def right_param_box(self) -> np.ndarray:
        return _box(self.q.d_r, 1.0)

    def left_point_mask(self, u: np.ndarray) -> np.ndarray:
        # pi_L = (y, z + Q(x, y)): the kernel integrates over y in the unit box
        u = np.atleast_2d(np.asarray(u, float))
        return np.all(np.abs(u[:, : self.q.d_r]) <= 1.0, axis=1)

    # incidence layout: t_l = x^l in R^{d_l}, t_r = y^r in R^{d_r},
    # t_c = (x^c, y^c), x_c = z^c in R^ell.
    def validate_triple(self, p: IncidenceTriple):
        q = self.q
        if p.t_l.size != q.d_l or p.t_r.size != q.d_r:
            raise DimensionMismatch("fiber coordinates sized d_l / d_r")
        if p.t_c.size != q.d_l + q.d_r or p.x_c.size != q.ell:
            raise DimensionMismatch("center must carry (x^c, y^c) and z^c")

    def _split_center(self, p: IncidenceTriple):
        return p.t_c[: self.q.d_l], p.t_c[self.q.d_l:]

    def point_center(self, p: IncidenceTriple) -> np.ndarray:
        xc, yc = self._split_center(p)
        return np.concatenate([xc, yc, p.x_c])

    def point_left(self, p: IncidenceTriple) -> np.ndarray:
        xc, yc = self._split_center(p)
        z_l = p.x_c + self.q.apply(xc - p.t_l, yc)
        return np.concatenate([p.t_l, yc, z_l])

    def point_right(self, p: IncidenceTriple) -> np.ndarray:
        xc, _ = self._split_center(p)
        return np.concatenate([xc, p.t_r, p.x_c])

    def reduce_center(self, p: IncidenceTriple, w: np.ndarray) -> np.ndarray:
        q = self.q
        _, yc = self._split_center(p)
        w = np.asarray(w, float)
        return w[q.d_l + q.d_r:] + q.apply(w[: q.d_l], yc)

    def lift_left(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        q = self.q
        xc, _ = self._split_center(p)
        v = np.asarray(v, float)
        v_y, v_z = v[: q.d_r], v[q.d_r:]
        return np.concatenate([np.zeros(q.d_l), v_y, v_z - q.apply(xc, v_y)])

    def lift_right(self, p: IncidenceTriple, v: np.ndarray) -> np.ndarray:
        q = self.q
        v = np.asarray(v, float)
        return np.concatenate([v[: q.d_l], np.zeros(q.d_r), v[q.d_l:]])

    def embed_quotient(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros(self.ambient_dim)
        out[self.q.d_l + self.q.d_r:] = np.asarray(c, float)
        return out

    def _apply_batch(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("pi,pj,ijm->pm", x, y, self.q.tensor)

    def left_chart_project_right(self, u: np.ndarray, s: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, float))
        x = np.atleast_2d(np.asarray(s, float))
        y, w = u[:, : self.q.d_r], u[:, self.q.d_r:]
        return np.column_stack([x, w - self._apply_batch(x, y)])

    def right_chart_project_left(self, xr: np.ndarray, s: np.ndarray) -> np.ndarray:
        xr = np.atleast_2d(np.asarray(xr, float))
        y = np.atleast_2d(np.asarray(s, float))
        x, z = xr[:, : self.q.d_l], xr[:, self.q.d_l:]
        return np.column_stack([y, z + self._apply_batch(x, y)])


# ---------------------------------------------------------------------------
# Concrete model constructors and the registry
# ---------------------------------------------------------------------------

def _poly(k: int, spec: dict[tuple[int, ...], float]) -> MultiPoly:
    return MultiPoly(k, dict(spec))


def _mono(k: int, *idx: int) -> tuple[int, ...]:
    m = [0] * k
    for i in idx:
        m[i] += 1
    return tuple(m)


def _maximal_r5() -> ConvolutionModel:
    k = 2
    gamma_quad = [
        _poly(k, {_mono(k, 0, 0): 1}),
        _poly(k, {_mono(k, 0, 1): 2}),
        _poly(k, {_mono(k, 1, 1): 1}),
    ]
    frame_quad = [
        _poly(k, {_mono(k, 0, 0): 0.5}),
        _poly(k, {_mono(k, 0, 1): 1}),
        _poly(k, {_mono(k, 1, 1): 0.5}),
    ]
    se = SublevelExponents(Fraction(1), Fraction(2), Fraction(2))
    return ConvolutionModel("maximal_r5", k, 5, gamma_quad, frame_quad, se)


def _maximal_c5() -> ComplexMaximalModel:
    k = 4
    gamma_quad = [
        _poly(k, {_mono(k, 0, 0): 1, _mono(k, 1, 1): -1}),
        _poly(k, {_mono(k, 0, 1): 2}),
        _poly(k, {_mono(k, 0, 2): 2, _mono(k, 1, 3): -2}),
        _poly(k, {_mono(k, 0, 3): 2, _mono(k, 1, 2): 2}),
        _poly(k, {_mono(k, 2, 2): 1, _mono(k, 3, 3): -1}),
        _poly(k, {_mono(k, 2, 3): 2}),
    ]
    frame_quad = [
        _poly(k, {_mono(k, 0, 0): 0.5, _mono(k, 1, 1): -0.5}),
        _poly(k, {_mono(k, 0, 1): 1}),
        _poly(k, {_mono(k, 0, 2): 1, _mono(k, 1, 3): -1}),
        _poly(k, {_mono(k, 0, 3): 1, _mono(k, 1, 2): 1}),
        _poly(k, {_mono(k, 2, 2): 0.5, _mono(k, 3, 3): -0.5}),
        _poly(k, {_mono(k, 2, 3): 1}),
    ]
    se = SublevelExponents(Fraction(1), Fraction(2), Fraction(2))
    return ComplexMaximalModel("maximal_c5", k, 10, gamma_quad, frame_quad, se)


def _harmonic_r8() -> ConvolutionModel:
    k = 3
    gamma_quad = [
        _poly(k, {_mono(k, 0, 0): 1, _mono(k, 1, 1): -1}),
        _poly(k, {_mono(k, 1, 1): 1, _mono(k, 2, 2): -1}),
        _poly(k, {_mono(k, 0, 1): 2}),
        _poly(k, {_mono(k, 1, 2): 2}),
        _poly(k, {_mono(k, 0, 2): 2}),
    ]
    frame_quad = [
        _poly(k, {_mono(k, 0, 0): 0.5, _mono(k, 1, 1): -0.5}),
        _poly(k, {_mono(k, 1, 1): 0.5, _mono(k, 2, 2): -0.5}),
        _poly(k, {_mono(k, 0, 1): 1}),
        _poly(k, {_mono(k, 1, 2): 1}),
        _poly(k, {_mono(k, 0, 2): 1}),
    ]
    se = SublevelExponents(Fraction(1), Fraction(3), Fraction(3))
    return ConvolutionModel("harmonic_r8", k, 8, gamma_quad, frame_quad, se)


def scalar_product_q(d_r: int) -> QuadraticModel:
    """Q(t, x) = t * x : R^1 x R^{d_r} -> R^{d_r} (the asymmetric pairing)."""
    tensor = np.zeros((1, d_r, d_r))
    for j in range(d_r):
        tensor[0, j, j] = 1.0
    return QuadraticModel(1, d_r, d_r, tensor)


def get_model(model_id: str) -> ModelSurface:
    """Resolve a model id: maximal_r5 | maximal_c5 | harmonic_r8 |
    asymmetric:<d_R> | bilinear:<json {d_L, d_R, ell, tensor}>."""
    if model_id == "maximal_r5":
        return _maximal_r5()
    if model_id == "maximal_c5":
        return _maximal_c5()
    if model_id == "harmonic_r8":
        return _harmonic_r8()
    if model_id.startswith("asymmetric:"):
        return AsymmetricModel(int(model_id.split(":", 1)[1]))
    if model_id.startswith("bilinear:"):
        spec = json.loads(model_id.split(":", 1)[1])
        q = QuadraticModel(spec["d_L"], spec["d_R"], spec["ell"],
                           np.asarray(spec["tensor"], dtype=float))
        return BilinearModel(q)
    raise ModelError(f"unknown model id {model_id!r}")


MODEL_IDS = ("maximal_r5", "maximal_c5", "harmonic_r8")


# ---------------------------------------------------------------------------
# Surface evaluation and closed-form functionals
# ---------------------------------------------------------------------------

def gamma_eval(model: ModelSurface, t) -> np.ndarray:
    """Evaluate the model surface map exactly; points outside the parameter
    box are flagged with a warning but still evaluated."""
    if model.gamma is None:
        raise ModelError(f"{model.model_id} has no translation surface")
    t = np.asarray(t, dtype=float).ravel()
    if t.size != model.k:
        raise DimensionMismatch(f"parameter must have length {model.k}")
    if np.any(np.abs(t) > 1.0) or not model.param_mask(t[None, :])[0]:
        warnings.warn(f"parameter {t} outside the box of {model.model_id}",
                      DegenerateInputWarning, stacklevel=2)
    return np.array([g(t) for g in model.gamma], dtype=float)


def vol_q(q: QuadraticModel, x, y) -> float:
    """Largest parallelepiped volume over ell-subsets of
    {Q(e_i, y)} union {Q(x, e_j)}."""
    import itertools as it

    rows = np.vstack([q.left_slices(y), q.right_slices(x)])
    best = 0.0
    for sub in it.combinations(range(rows.shape[0]), q.ell):
        best = max(best, wedge_volume(rows[list(sub)]))
    return best


def normalized_vol_q(q: QuadraticModel, x, y) -> float:
    """vol_q scaled by |(x, y)|^{-(d_l + d_r - ell)}; 0 with a warning at the origin."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    denom_sq = float(x @ x + y @ y)
    if denom_sq == 0.0:
        warnings.warn("normalized_vol_q at the origin", DegenerateInputWarning,
                      stacklevel=2)
        return 0.0
    kappa = q.d_l + q.d_r - q.ell
    return vol_q(q, x, y) / denom_sq ** (kappa / 2.0)


def complex_block_det(z: np.ndarray) -> tuple[float, float]:
    """Determinant of the 2n x 2n real block realization [[a, -b], [b, a]]
    of a complex matrix, paired with |det_C z|^2; the two agree."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    if z.shape != (n, n) or n < 1:
        raise DimensionMismatch("need a square complex matrix")
    big = np.zeros((2 * n, 2 * n))
    big[0::2, 0::2] = z.real
    big[0::2, 1::2] = -z.imag
    big[1::2, 0::2] = z.imag
    big[1::2, 1::2] = z.real
    return float(np.linalg.det(big)), float(abs(np.linalg.det(z)) ** 2)


def closed_curvature_weight(model: ModelSurface, p: IncidenceTriple) -> float:
    """Model-specific closed form of the curvature weight.

    With a = left offset and b = right offset from the center:
      maximal_r5    sqrt(|a|^2+|b|^2) * |det(a b)|
      maximal_c5    (|a|^2+|b|^2) * |det_C(a b)|^2   (parameters read as C^2)
      harmonic_r8   sqrt(|a|^2+|b|^2) * (|a|^2 |b|^2 - (a.b)^2)
      asymmetric    |u|^{d_R-1} * sqrt(u^2 + |w|^2),  u = t^l - t^c, w = x^c - x^r
    """
    mid = model.model_id
    if mid == "maximal_r5":
        a, b = p.t_l - p.t_c, p.t_r - p.t_c
        det = a[0] * b[1] - a[1] * b[0]
        return float(np.sqrt(a @ a + b @ b) * abs(det))
    if mid == "maximal_c5":
        a, b = p.t_l - p.t_c, p.t_r - p.t_c
        a1, a2 = a[0] + 1j * a[1], a[2] + 1j * a[3]
        b1, b2 = b[0] + 1j * b[1], b[2] + 1j * b[3]
        det = a1 * b2 - a2 * b1
        return float((a @ a + b @ b) * abs(det) ** 2)
    if mid == "harmonic_r8":
        a, b = p.t_l - p.t_c, p.t_r - p.t_c
        gram = (a @ a) * (b @ b) - (a @ b) ** 2
        return float(np.sqrt(a @ a + b @ b) * gram)
    if mid.startswith("asymmetric:"):
        d = model.d_r
        u = float(p.t_l[0] - p.t_c[0])
        w = p.x_c[:d] - p.t_r
        return float(abs(u) ** (d - 1) * np.sqrt(u * u + w @ w))
    raise ModelError(f"no closed curvature form for {mid}")


def restricted_curvature_weight_c5(model: ModelSurface, p: IncidenceTriple) -> float:
    """Curvature weight of maximal_c5 summed only over complex-paired column
    subsets ({1,2} and {3,4} kept or dropped together)."""
    if model.model_id != "maximal_c5":
        raise ModelError("restricted sum is specific to maximal_c5")
    from .curvature import curvature_maps

    cols_l, cols_r = curvature_maps(p)
    paired = [(), (0, 1), (2, 3), (0, 1, 2, 3)]
    total = 0.0
    for s_r in paired:
        for s_l in paired:
            if len(s_r) + len(s_l) != model.ell:
                continue
            mat = np.column_stack([cols_l[j] for j in s_r] + [cols_r[i] for i in s_l])
            total += float(np.linalg.det(mat)) ** 2
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# Bracket nondegeneracy conditions
# ---------------------------------------------------------------------------

def bracket_nondegeneracy_symmetric(
    frames: FramePair, point, v, v_prime, tol: float = 1e-8,
    swap_roles: bool = False,
) -> tuple[bool, np.ndarray | None]:
    """Spanning condition for 7-dimensional geometries with d_L = d_R = 2.

    Tests whether some w makes {X_L^1, X_L^2, X_R^1, X_R^2,
    [X_L^1, v.X_R], [X_L^2, v.X_R], [w.X_L, v'.X_R]} span at ``point``.  The
    wedge is linear in w, so testing the two basis vectors decides existence;
    ``swap_roles`` checks the mirrored condition with bracket slots
    [v.X_L, X_R^1], [v.X_L, X_R^2], [v'.X_L, w.X_R].
    """
    if frames.d_l != 2 or frames.d_r != 2:
        raise ModelError("condition requires d_L = d_R = 2")
    v = np.asarray(v, float)
    vp = np.asarray(v_prime, float)
    if abs(v[0] * vp[1] - v[1] * vp[0]) <= 1e-14 * (np.linalg.norm(v) * np.linalg.norm(vp) + 1e-300):
        raise ModelError("v and v' must be linearly independent")
    point = np.asarray(point, float)
    n = frames.left[0].ambient_dim

    base = [f(point) for f in frames.left] + [f(point) for f in frames.right]
    if not swap_roles:
        fixed = [
            lie_bracket(frames.left[0], weighted_field(v, frames.right)),
            lie_bracket(frames.left[1], weighted_field(v, frames.right)),
        ]
        def last(w):
            return lie_bracket(weighted_field(w, frames.left),
                               weighted_field(vp, frames.right))
    else:
        fixed = [
            lie_bracket(weighted_field(v, frames.left), frames.right[0]),
            lie_bracket(weighted_field(v, frames.left), frames.right[1]),
        ]
        def last(w):
            return lie_bracket(weighted_field(vp, frames.left),
                               weighted_field(w, frames.right))
    fixed_vals = [f(point) for f in fixed]
    for w in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        vectors = base + fixed_vals + [last(w)(point)]
        if spanning_check(vectors, n, tol):
            return True, w
    return False, None


def bracket_nondegeneracy_asymmetric(frames: FramePair, point, tol: float = 1e-8) -> bool:
    """Spanning condition {X_L, X_R^j, [X_L, X_R^j]} for d_L = 1 geometries."""
    if frames.d_l != 1:
        raise ModelError("condition requires d_L = 1")
    point = np.asarray(point, float)
    n = frames.left[0].ambient_dim
    d_r = frames.d_r
    if n != 2 * d_r + 1:
        raise DimensionMismatch("ambient dimension must be 2 d_R + 1")
    fields = [frames.left[0]] + list(frames.right) + [
        lie_bracket(frames.left[0], xr) for xr in frames.right
    ]
    return spanning_check([f(point) for f in fields], n, tol)
