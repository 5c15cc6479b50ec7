"""Exact multivariate polynomial arithmetic, polynomial vector fields, and
wedge-product volumes.

Coefficient arithmetic stays in Python numbers: integer inputs produce integer
coefficients, so algebraic identities (bracket antisymmetry, Jacobi,
annihilation of projection components) can be asserted exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

Monomial = tuple[int, ...]


class DimensionMismatch(ValueError):
    """Operands live in different coordinate dimensions."""


def _clean(terms: Mapping[Monomial, float]) -> dict[Monomial, float]:
    return {m: c for m, c in terms.items() if c != 0}


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial in ``dimension`` variables as {exponent multi-index: coefficient}.

    Invariant: no stored coefficient is exactly zero.
    """

    dimension: int
    terms: dict[Monomial, float]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "terms", _clean(self.terms))
        for mono in self.terms:
            if len(mono) != self.dimension or any(e < 0 for e in mono):
                raise ValueError(f"bad monomial {mono} for dimension {self.dimension}")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(dimension: int) -> "MultiPoly":
        return MultiPoly(dimension, {})

    @staticmethod
    def constant(dimension: int, value) -> "MultiPoly":
        return MultiPoly(dimension, {(0,) * dimension: value})

    @staticmethod
    def variable(dimension: int, index: int, coeff=1) -> "MultiPoly":
        mono = tuple(1 if i == index else 0 for i in range(dimension))
        return MultiPoly(dimension, {mono: coeff})

    @staticmethod
    def from_terms(dimension: int, pairs: Iterable[tuple[Monomial, float]]) -> "MultiPoly":
        acc: dict[Monomial, float] = {}
        for mono, coeff in pairs:
            acc[mono] = acc.get(mono, 0) + coeff
        return MultiPoly(dimension, acc)

    # -- algebra ------------------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.dimension != other.dimension:
            raise DimensionMismatch(f"{self.dimension} != {other.dimension}")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return MultiPoly(self.dimension, acc)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.dimension, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        acc: dict[Monomial, float] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return MultiPoly(self.dimension, acc)

    __rmul__ = __mul__

    def scale(self, factor) -> "MultiPoly":
        return MultiPoly(self.dimension, {m: factor * c for m, c in self.terms.items()})

    def partial(self, index: int) -> "MultiPoly":
        """Partial derivative with respect to coordinate ``index``."""
        acc: dict[Monomial, float] = {}
        for mono, coeff in self.terms.items():
            e = mono[index]
            if e == 0:
                continue
            m = tuple(v - 1 if i == index else v for i, v in enumerate(mono))
            acc[m] = acc.get(m, 0) + e * coeff
        return MultiPoly(self.dimension, acc)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, point: Sequence[float]):
        if len(point) != self.dimension:
            raise DimensionMismatch(f"point has {len(point)} coords, need {self.dimension}")
        total = 0
        for mono, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, mono):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def eval_many(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an (N, dimension) float array."""
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[0])
        for mono, coeff in self.terms.items():
            term = np.full(pts.shape[0], float(coeff))
            for i, e in enumerate(mono):
                if e:
                    term = term * pts[:, i] ** e
            out += term
        return out

    # -- misc ---------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        bits = []
        for mono, coeff in sorted(self.terms.items()):
            vars_ = "*".join(
                f"x{i}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(mono) if e
            )
            bits.append(f"{coeff}" + (f"*{vars_}" if vars_ else ""))
        return " + ".join(bits)


@dataclass(frozen=True)
class PolyVectorField:
    """Vector field on R^N with one MultiPoly per coordinate."""

    ambient_dim: int
    components: tuple[MultiPoly, ...]

    def __post_init__(self):
        if len(self.components) != self.ambient_dim:
            raise DimensionMismatch("need one component per coordinate")
        for comp in self.components:
            if comp.dimension != self.ambient_dim:
                raise DimensionMismatch("component dimension != ambient_dim")
        object.__setattr__(self, "components", tuple(self.components))

    @staticmethod
    def from_dict(ambient_dim: int, comps: Mapping[int, MultiPoly]) -> "PolyVectorField":
        full = tuple(comps.get(i, MultiPoly.zero(ambient_dim)) for i in range(ambient_dim))
        return PolyVectorField(ambient_dim, full)

    @staticmethod
    def coordinate(ambient_dim: int, index: int, coeff=1) -> "PolyVectorField":
        return PolyVectorField.from_dict(
            ambient_dim, {index: MultiPoly.constant(ambient_dim, coeff)}
        )

    @staticmethod
    def zero(ambient_dim: int) -> "PolyVectorField":
        return PolyVectorField.from_dict(ambient_dim, {})

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return PolyVectorField(
            self.ambient_dim,
            tuple(a + b for a, b in zip(self.components, other.components)),
        )

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return self + other.scale(-1)

    def scale(self, factor) -> "PolyVectorField":
        return PolyVectorField(self.ambient_dim, tuple(c.scale(factor) for c in self.components))

    def apply_to(self, f: MultiPoly) -> MultiPoly:
        """Directional derivative Vf = sum_i V_i d_i f, exact."""
        if f.dimension != self.ambient_dim:
            raise DimensionMismatch("function dimension != ambient_dim")
        out = MultiPoly.zero(self.ambient_dim)
        for i, comp in enumerate(self.components):
            if not comp.is_zero:
                out = out + comp * f.partial(i)
        return out

    def __call__(self, point: Sequence[float]) -> np.ndarray:
        return np.array([comp(point) for comp in self.components], dtype=float)

    def eval_exact(self, point: Sequence[float]) -> list:
        return [comp(point) for comp in self.components]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)


def lie_bracket(v: PolyVectorField, w: PolyVectorField) -> PolyVectorField:
    """[V, W]_i = sum_j (V_j d_j W_i - W_j d_j V_i), exact polynomial arithmetic."""
    if v.ambient_dim != w.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    comps = tuple(
        v.apply_to(w.components[i]) - w.apply_to(v.components[i])
        for i in range(v.ambient_dim)
    )
    return PolyVectorField(v.ambient_dim, comps)


def weighted_field(coeffs: Sequence[float], fields: Sequence[PolyVectorField]) -> PolyVectorField:
    """Linear combination sum_i coeffs[i] * fields[i]."""
    if len(coeffs) != len(fields):
        raise DimensionMismatch("coefficient count != field count")
    out = PolyVectorField.zero(fields[0].ambient_dim)
    for c, f in zip(coeffs, fields):
        if c != 0:
            out = out + f.scale(c)
    return out


# ---------------------------------------------------------------------------
# Wedge volumes
# ---------------------------------------------------------------------------

def gram_matrix(vectors: Sequence[Sequence[float]]) -> np.ndarray:
    a = np.asarray(vectors, dtype=float)
    return a @ a.T


def wedge_volume(vectors: Sequence[Sequence[float]]) -> float:
    """m-dimensional volume of the parallelepiped spanned by the input vectors.

    Computed as sqrt(det Gram) via a complete-pivoting Cholesky factorization;
    tiny negative pivots from rounding are clamped to zero.  The empty wedge
    product is 1 by convention.
    """
    vecs = list(vectors)
    if not vecs:
        return 1.0
    a = np.asarray(vecs, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch("vectors must share a common dimension")
    m, n = a.shape
    if m > n:
        return 0.0
    g = a @ a.T
    scale = max(1.0, float(np.max(np.abs(np.diag(g)))))
    det = 1.0
    active = g.copy()
    idx = list(range(m))
    for step in range(m):
        diag = np.diag(active)[step:]
        j = step + int(np.argmax(diag))
        active[[step, j]] = active[[j, step]]
        active[:, [step, j]] = active[:, [j, step]]
        pivot = active[step, step]
        if pivot <= 0.0:
            # Gram matrices are PSD up to rounding; anything at/below zero
            # means the remaining block is numerically rank deficient.
            if pivot < -1e-12 * scale:
                raise ArithmeticError(f"Gram pivot {pivot} too negative (scale {scale})")
            return 0.0
        det *= pivot
        col = active[step + 1:, step] / pivot
        active[step + 1:, step + 1:] -= np.outer(col, active[step + 1:, step])
        active[step + 1:, step] = 0.0
        active[step, step + 1:] = 0.0
    return float(np.sqrt(det))


def wedge_volume_minors(vectors: Sequence[Sequence[float]]) -> float:
    """Root-sum-of-squares of all maximal minors; independent cross-check route."""
    vecs = list(vectors)
    if not vecs:
        return 1.0
    a = np.asarray(vecs, dtype=float)
    m, n = a.shape
    if m > n:
        return 0.0
    total = 0.0
    for cols in itertools.combinations(range(n), m):
        total += float(np.linalg.det(a[:, cols])) ** 2
    return float(np.sqrt(total))


def spanning_check(vectors: Sequence[Sequence[float]], n: int, tol: float = 1e-8) -> bool:
    """Scale-invariant nondegeneracy: wedge volume exceeds tol * product of norms."""
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if len(vecs) != n:
        raise DimensionMismatch(f"need exactly {n} vectors, got {len(vecs)}")
    norms = [float(np.linalg.norm(v)) for v in vecs]
    prod = 1.0
    for nv in norms:
        prod *= nv
    return wedge_volume(vecs) > tol * prod
