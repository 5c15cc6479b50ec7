"""Monte Carlo sublevel-set functionals W(alpha) = |{(u, v) in E_l x E_r :
phi(u, v) <= alpha}| and the standard bilinear phi choices."""

from __future__ import annotations

import numpy as np

from .mc import DEFAULT_PARTITIONS, McResult, box_volume, mc_run, uniform_in_box


def det2_phi(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|det(u v)| for planar pairs."""
    return np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])


def gram_phi(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|u|^2 |v|^2 - (u.v)^2 (squared parallelogram area, any dimension)."""
    uu = np.sum(u * u, axis=1)
    vv = np.sum(v * v, axis=1)
    uv = np.sum(u * v, axis=1)
    return uu * vv - uv * uv


def complex_det_phi(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """|z1 w2 - z2 w1|^2 with u, v read as pairs of complex numbers in R^4."""
    z1, z2 = u[:, 0] + 1j * u[:, 1], u[:, 2] + 1j * u[:, 3]
    w1, w2 = v[:, 0] + 1j * v[:, 1], v[:, 2] + 1j * v[:, 3]
    return np.abs(z1 * w2 - z2 * w1) ** 2


def power_phi(exponent: float):
    """phi(t, x) = |t|^exponent, ignoring the second argument."""
    def phi(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.linalg.norm(u, axis=1) ** exponent
    return phi


def mc_sublevel(
    phi,
    alpha: float,
    e_l,
    e_r,
    samples: int,
    seed: int,
    partitions: int = DEFAULT_PARTITIONS,
    workers: int = 1,
    stream: int = 0,
) -> McResult:
    """Unbiased estimate of the sublevel mass by uniform sampling of the two
    bounding boxes; deterministic for fixed (seed, samples, partitions)."""
    if samples < 10 ** 3:
        raise ValueError("use at least 10^3 samples")
    box_l = np.asarray(e_l.bounding_box, dtype=float)
    box_r = np.asarray(e_r.bounding_box, dtype=float)
    vol = box_volume(box_l) * box_volume(box_r)
    if vol == 0.0:
        raise ValueError("zero-measure bounding box")

    def batch(rng: np.random.Generator, n: int) -> np.ndarray:
        u = uniform_in_box(rng, box_l, n)
        v = uniform_in_box(rng, box_r, n)
        hit = e_l.contains(u) & e_r.contains(v)
        if alpha != np.inf:
            hit &= phi(u, v) <= alpha
        return hit.astype(float)

    return mc_run(batch, samples, seed, scale=vol,
                  partitions=partitions, workers=workers, stream=stream)
