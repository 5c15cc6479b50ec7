"""Curvature functionals on incidence triples.

The weight is assembled from the transported kernel fields: for each split of
the ell quotient directions between left-transported right fields and
right-transported left fields, take the determinant of the resulting ell x ell
matrix, and sum the squares.  In the flat model coordinates the X_L ^ X_R
prefactor of the defining wedge reduces to an identity block; that reduction
is asserted by ``full_wedge_weight`` below rather than assumed silently.
"""

from __future__ import annotations

import itertools

import numpy as np

from .models import IncidenceTriple, ModelSurface
from .poly import PolyVectorField, wedge_volume


class SingularFiberError(ArithmeticError):
    """Positive curvature weight over a zero incidence distance."""


def curvature_maps(p: IncidenceTriple) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Transported frame fields: ([C_p^l X_R^j], [C_p^r X_L^i]) as ell-vectors."""
    model = p.model
    cols_l = [model.transport_left(p, xr) for xr in model.frames.right]
    cols_r = [model.transport_right(p, xl) for xl in model.frames.left]
    return cols_l, cols_r


def curvature_weight(p: IncidenceTriple) -> float:
    """Square root of the sum over all column splits of squared determinants."""
    model = p.model
    cols_l, cols_r = curvature_maps(p)
    ell = model.ell
    total = 0.0
    for n_r in range(0, model.d_r + 1):
        n_l = ell - n_r
        if n_l < 0 or n_l > model.d_l:
            continue
        for s_r in itertools.combinations(range(model.d_r), n_r):
            for s_l in itertools.combinations(range(model.d_l), n_l):
                mat = np.column_stack(
                    [cols_l[j] for j in s_r] + [cols_r[i] for i in s_l]
                )
                total += float(np.linalg.det(mat)) ** 2
    return float(np.sqrt(total))


def incidence_distance(p: IncidenceTriple) -> float:
    """Euclidean distance in L x R between the center's projections and the
    crossed projections (pi_L(m^r), pi_R(m^l))."""
    model = p.model
    d_left = model.project_left(p.m_c) - model.project_left(p.m_r)
    d_right = model.project_right(p.m_c) - model.project_right(p.m_l)
    return float(np.sqrt(d_left @ d_left + d_right @ d_right))


def normalized_curvature(p: IncidenceTriple) -> float:
    """Curvature weight divided by the incidence distance to the power
    kappa = d_L + d_R - ell; zero at fully degenerate triples."""
    k = curvature_weight(p)
    dist = incidence_distance(p)
    if dist == 0.0:
        if k == 0.0:
            return 0.0
        raise SingularFiberError(
            f"weight {k} > 0 on a zero-distance fiber of {p.model.model_id}"
        )
    return k / dist ** p.model.kappa


def full_wedge_weight(p: IncidenceTriple) -> float:
    """Curvature weight recomputed without the identity-block reduction: each
    summand is the full ambient parallelepiped volume of
    X_L ^ X_R ^ (selected transported columns embedded in the quotient
    directions).  Agrees with ``curvature_weight``; kept as the cross-check
    for the flat-coordinate convention."""
    model = p.model
    m_c = p.m_c
    frame_vecs = [f(m_c) for f in model.frames.left] + [f(m_c) for f in model.frames.right]
    cols_l, cols_r = curvature_maps(p)
    ell = model.ell
    total = 0.0
    for n_r in range(0, model.d_r + 1):
        n_l = ell - n_r
        if n_l < 0 or n_l > model.d_l:
            continue
        for s_r in itertools.combinations(range(model.d_r), n_r):
            for s_l in itertools.combinations(range(model.d_l), n_l):
                cols = [cols_l[j] for j in s_r] + [cols_r[i] for i in s_l]
                vectors = frame_vecs + [model.embed_quotient(c) for c in cols]
                total += wedge_volume(vectors) ** 2
    return float(np.sqrt(total))


def transport_flow_difference(
    p: IncidenceTriple, v_field: PolyVectorField, h: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """Forward finite difference of C_p^l V along each left kernel direction
    against the transported bracket C_p^l [X_L^i, V].

    Returns (difference quotients, bracket transports) stacked over the d_L
    frame directions, plus the max-norm discrepancy between the two.
    """
    from .poly import lie_bracket

    model = p.model
    if v_field.is_zero:
        zeros = np.zeros((model.d_l, model.ell))
        return zeros, zeros.copy(), 0.0
    base = model.transport_left(p, v_field)
    diffs, brackets = [], []
    for i in range(model.d_l):
        delta = np.zeros(model.d_l)
        delta[i] = h
        shifted = model.shift_left_param(p, delta)
        diffs.append((model.transport_left(shifted, v_field) - base) / h)
        brackets.append(model.transport_left(p, lie_bracket(model.frames.left[i], v_field)))
    fd = np.vstack(diffs)
    br = np.vstack(brackets)
    return fd, br, float(np.max(np.abs(fd - br)))
