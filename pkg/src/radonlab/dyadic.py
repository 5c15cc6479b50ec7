"""Two-estimate dyadic interpolation: the min-of-bounds double sum, its
interpolated right side, and an explicit admissible constant assembled from
geometric-series operator bounds.

Conventions at the exponent endpoint: x^{1/inf} is 1 for x > 0 and 0 for
x = 0, so a p = inf slot encodes a Fubini-style bound that ignores that
sequence entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import inf


@dataclass(frozen=True)
class DyadicSeq:
    """Finitely supported map index -> nonnegative real."""

    data: dict[int, float]

    def __post_init__(self):
        clean = {int(i): float(v) for i, v in self.data.items() if v != 0.0}
        if any(v < 0 for v in clean.values()):
            raise ValueError("sequence values must be nonnegative")
        object.__setattr__(self, "data", clean)

    def __getitem__(self, i: int) -> float:
        return self.data.get(i, 0.0)

    def items(self):
        return self.data.items()

    @property
    def support(self) -> list[int]:
        return sorted(self.data)

    def total(self) -> float:
        return sum(self.data.values())

    @staticmethod
    def spike(i: int, value: float = 1.0) -> "DyadicSeq":
        return DyadicSeq({i: value})


def pw(x: float, p_inv: float) -> float:
    """x^{p_inv} with the endpoint convention x^0 := (x > 0)."""
    if x < 0:
        raise ValueError("powers are taken of nonnegative masses")
    if p_inv == 0.0:
        return 1.0 if x > 0 else 0.0
    return x ** p_inv


def _inv(p) -> float:
    if p == inf:
        return 0.0
    p = float(p)
    if p < 1:
        raise ValueError("exponents live in [1, inf]")
    return 1.0 / p


@dataclass(frozen=True)
class InterpParams:
    """Parameters (a_k, b_k, p_k, q_k, theta, A_0, A_1) of the interpolation
    inequality; the two determinant conditions and 1/p_k + 1/q_k >= 1 are
    enforced at construction."""

    a0: float
    a1: float
    b0: float
    b1: float
    p0: object
    p1: object
    q0: object
    q1: object
    theta: float
    big_a0: float = 1.0
    big_a1: float = 1.0

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.big_a0 < 0 or self.big_a1 < 0:
            raise ValueError("A_0, A_1 must be nonnegative")
        det_a = self.a0 * _inv(self.p1) - self.a1 * _inv(self.p0)
        det_b = self.b0 * _inv(self.q1) - self.b1 * _inv(self.q0)
        if det_a == 0.0 or det_b == 0.0:
            raise ValueError("degenerate exponent determinant")
        for p, q in ((self.p0, self.q0), (self.p1, self.q1)):
            if _inv(p) + _inv(q) < 1.0:
                raise ValueError("need 1/p_k + 1/q_k >= 1")

    @property
    def p_theta_inv(self) -> float:
        return (1 - self.theta) * _inv(self.p0) + self.theta * _inv(self.p1)

    @property
    def q_theta_inv(self) -> float:
        return (1 - self.theta) * _inv(self.q0) + self.theta * _inv(self.q1)

    @property
    def a_theta(self) -> float:
        return (1 - self.theta) * self.a0 + self.theta * self.a1

    @property
    def b_theta(self) -> float:
        return (1 - self.theta) * self.b0 + self.theta * self.b1

    def scaled(self, lam: float) -> "InterpParams":
        return InterpParams(self.a0, self.a1, self.b0, self.b1,
                            self.p0, self.p1, self.q0, self.q1,
                            self.theta, lam * self.big_a0, lam * self.big_a1)


def maximal_params(alpha: float = 1.0, theta: float = 0.5) -> InterpParams:
    """Instantiation for the 2-parameter determinant sublevel bound."""
    return InterpParams(a0=1, a1=-1, b0=-1, b1=1, p0=inf, p1=1, q0=1, q1=inf,
                        theta=theta, big_a0=alpha, big_a1=alpha)


def harmonic_params(alpha: float = 1.0, theta: float = 0.5) -> InterpParams:
    """Instantiation for the 3-parameter Gram sublevel bound."""
    return InterpParams(a0=1, a1=-2, b0=-2, b1=1, p0=inf, p1=1, q0=1, q1=inf,
                        theta=theta, big_a0=alpha, big_a1=alpha)


def min_interp_sum(params: InterpParams, f: DyadicSeq, g: DyadicSeq) -> float:
    """Left side: sum over (i, j) of the smaller of the two dyadic bounds."""
    pr = params
    ip0, ip1, iq0, iq1 = _inv(pr.p0), _inv(pr.p1), _inv(pr.q0), _inv(pr.q1)
    total = 0.0
    for i, fi in f.items():
        f0, f1 = pw(fi, ip0), pw(fi, ip1)
        for j, gj in g.items():
            t0 = pr.big_a0 * 2.0 ** (pr.a0 * i + pr.b0 * j) * f0 * pw(gj, iq0)
            t1 = pr.big_a1 * 2.0 ** (pr.a1 * i + pr.b1 * j) * f1 * pw(gj, iq1)
            total += min(t0, t1)
    return total


def interp_bound(params: InterpParams, f: DyadicSeq, g: DyadicSeq) -> float:
    """Right side without the constant:
    A0^{1-theta} A1^theta (sum 2^{a_th p_th i} f_i)^{1/p_th} (sum ...)^{1/q_th}."""
    pr = params
    if pr.p_theta_inv == 0.0 or pr.q_theta_inv == 0.0:
        raise ValueError("interpolated exponent is infinite")
    p_th = 1.0 / pr.p_theta_inv
    q_th = 1.0 / pr.q_theta_inv
    sf = sum(2.0 ** (pr.a_theta * p_th * i) * fi for i, fi in f.items())
    sg = sum(2.0 ** (pr.b_theta * q_th * j) * gj for j, gj in g.items())
    return (pw(pr.big_a0, 1 - pr.theta) * pw(pr.big_a1, pr.theta)
            * pw(sf, 1.0 / p_th) * pw(sg, 1.0 / q_th))


@dataclass(frozen=True)
class NormalizedParams:
    """Proof-normalized parameters: a_theta = b_theta = 0 and b0 > 0 > b1."""

    a0: float
    a1: float
    b0: float
    b1: float
    p0: object
    p1: object
    q0: object
    q1: object
    theta: float
    swapped: bool

    @property
    def tau(self) -> float:
        return -self.a0 / self.b0


def normalize_params(params: InterpParams) -> NormalizedParams:
    """Shift a_k, b_k so the interpolated exponents vanish; swap the two
    estimates if needed so the positive b lands in slot 0."""
    pr = params
    p_th = 1.0 / pr.p_theta_inv
    q_th = 1.0 / pr.q_theta_inv
    a = [pr.a0 - pr.a_theta * p_th * _inv(pr.p0),
         pr.a1 - pr.a_theta * p_th * _inv(pr.p1)]
    b = [pr.b0 - pr.b_theta * q_th * _inv(pr.q0),
         pr.b1 - pr.b_theta * q_th * _inv(pr.q1)]
    p = [pr.p0, pr.p1]
    q = [pr.q0, pr.q1]
    theta = pr.theta
    swapped = False
    if b[0] < 0:
        a.reverse(); b.reverse(); p.reverse(); q.reverse()
        theta = 1 - theta
        swapped = True
    if not (b[0] > 0 > b[1]) or a[0] == 0 or a[1] == 0:
        raise ValueError("normalization failed; determinant conditions violated")
    return NormalizedParams(a[0], a[1], b[0], b[1], p[0], p[1], q[0], q[1],
                            theta, swapped)


def proof_t0(norm: NormalizedParams, s: float, e: DyadicSeq, support: range) -> DyadicSeq:
    """(T_0 e)_i = sum_{j < tau i + s} 2^{a0 i + b0 j - b0 s} e_j."""
    out = {}
    for i in support:
        acc = sum(2.0 ** (norm.a0 * i + norm.b0 * j - norm.b0 * s) * ej
                  for j, ej in e.items() if j < norm.tau * i + s)
        if acc:
            out[i] = acc
    return DyadicSeq(out)


def proof_t1(norm: NormalizedParams, s: float, e: DyadicSeq, support: range) -> DyadicSeq:
    """(T_1 e)_i = sum_{j >= tau i + s} 2^{a1 i + b1 j - b1 s} e_j."""
    out = {}
    for i in support:
        acc = sum(2.0 ** (norm.a1 * i + norm.b1 * j - norm.b1 * s) * ej
                  for j, ej in e.items() if j >= norm.tau * i + s)
        if acc:
            out[i] = acc
    return DyadicSeq(out)


def proof_operator_bounds(norm: NormalizedParams) -> dict[str, float]:
    """Geometric-series bounds for T_0 and T_1 on l^1 and l^inf."""
    return {
        "t0_inf": 1.0 / (1.0 - 2.0 ** (-norm.b0)),
        "t0_one": 1.0 / (1.0 - 2.0 ** (-abs(norm.a0))),
        "t1_inf": 1.0 / (1.0 - 2.0 ** norm.b1),
        "t1_one": 1.0 / (1.0 - 2.0 ** (-abs(norm.a1))),
    }


def admissible_constant(params: InterpParams) -> float:
    """Explicit constant making min_interp_sum <= C * interp_bound.

    Assembled from the proof: interpolate the l^1/l^inf bounds of T_0, T_1 to
    the dual exponents, then optimize the dyadic split point exactly.
    """
    norm = normalize_params(params)
    bounds = proof_operator_bounds(norm)
    ip0, ip1 = _inv(norm.p0), _inv(norm.p1)
    # l^{p'} operator norms by l^1 / l^inf interpolation: 1/p0' = 1 - 1/p0
    m0 = bounds["t0_one"] ** (1.0 - ip0) * bounds["t0_inf"] ** ip0
    m1 = bounds["t1_one"] ** (1.0 - ip1) * bounds["t1_inf"] ** ip1
    theta = norm.theta
    r = -norm.b1 / norm.b0
    lam = r ** theta + r ** (theta - 1.0)
    return m0 ** (1.0 - theta) * m1 ** theta * lam
