"""Exact single-site heat-bath updates for gradient-plus-field chain measures.

The conditional density of one height h given its two neighbors u, v under

    rho(h) ∝ exp(-j*(|h-u| + |h-v|) - k*h),   h >= floor >= 0,

splits at the sorted neighbor values into at most three exponential segments:

    h <= min(u,v):          log rho = -j*(u+v) + (2j - k)*h
    min(u,v) <= h <= max:   log rho = -j*|u-v| - k*h
    h >= max(u,v):          log rho = +j*(u+v) - (2j + k)*h

Sampling is exact: segment masses are accumulated in log space (the slopes
can be large and either sign) and the position within the chosen segment
comes from the closed-form inverse CDF of a bounded or one-sided exponential.
No step-size tuning, no rejection.

Kernels are numba-compiled; each site update consumes exactly two uniforms
from a pre-generated array, so a sweep is a pure function of (state, floor,
couplings, uniforms) and results are bit-identical to a pure-python loop.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_NEG_INF = float("-inf")


@njit(cache=True)
def _seg_logmass(alpha: float, beta: float, a: float, b: float) -> float:
    """log of integral_a^b exp(alpha + beta*h) dh; b may be +inf."""
    if b <= a:
        return _NEG_INF
    if beta < 0.0:
        if b == np.inf:
            return alpha + beta * a - math.log(-beta)
        return alpha + beta * a + math.log1p(-math.exp(beta * (b - a))) - math.log(-beta)
    if beta > 0.0:
        return alpha + beta * b + math.log1p(-math.exp(-beta * (b - a))) - math.log(beta)
    return alpha + math.log(b - a)


@njit(cache=True)
def _seg_invcdf(beta: float, a: float, b: float, u: float) -> float:
    """Quantile u of the density ∝ exp(beta*h) restricted to [a, b)."""
    if beta == 0.0:
        return a + u * (b - a)
    if b == np.inf:
        # beta < 0 here: plain exponential tail
        return a + math.log1p(-u) / beta
    w = b - a
    bw = beta * w
    if bw > 700.0:
        # expm1 would overflow; equivalent stable form anchored at the top
        return a + w + math.log(u + (1.0 - u) * math.exp(-bw)) / beta
    return a + math.log1p(u * math.expm1(bw)) / beta


@njit(cache=True)
def draw_conditional(u_nb: float, v_nb: float, j: float, k: float,
                     floor: float, u1: float, u2: float) -> float:
    """One exact draw of h >= floor given neighbor heights (u_nb, v_nb)."""
    m1 = min(u_nb, v_nb)
    m2 = max(u_nb, v_nb)
    b0 = max(floor, m1)
    b1 = max(floor, m2)
    s = m1 + m2
    beta0 = 2.0 * j - k
    beta1 = -k
    beta2 = -(2.0 * j + k)
    lm0 = _seg_logmass(-j * s, beta0, floor, b0)
    lm1 = _seg_logmass(-j * (m2 - m1), beta1, b0, b1)
    lm2 = _seg_logmass(j * s, beta2, b1, np.inf)
    mx = max(lm0, max(lm1, lm2))
    p0 = math.exp(lm0 - mx)
    p1 = math.exp(lm1 - mx)
    p2 = math.exp(lm2 - mx)
    r = u1 * (p0 + p1 + p2)
    if r < p0:
        return _seg_invcdf(beta0, floor, b0, u2)
    if r < p0 + p1:
        return _seg_invcdf(beta1, b0, b1, u2)
    return _seg_invcdf(beta2, b1, np.inf, u2)


@njit(cache=True)
def sweep_periodic(h: np.ndarray, floor: np.ndarray, j: float, k: float,
                   u: np.ndarray) -> None:
    """One sequential heat-bath sweep with periodic neighbors, in place.

    ``u`` must hold 2*len(h) uniforms; site i consumes u[2i], u[2i+1].
    """
    n = h.shape[0]
    for i in range(n):
        left = h[i - 1] if i > 0 else h[n - 1]
        right = h[i + 1] if i < n - 1 else h[0]
        h[i] = draw_conditional(left, right, j, k, floor[i], u[2 * i], u[2 * i + 1])


@njit(cache=True)
def conditional_draws(u_nb: float, v_nb: float, j: float, k: float,
                      floor: float, u: np.ndarray) -> np.ndarray:
    """Repeated fixed-neighbor draws (u holds 2*n uniforms), for sampler tests."""
    n = u.shape[0] // 2
    out = np.empty(n)
    for i in range(n):
        out[i] = draw_conditional(u_nb, v_nb, j, k, floor, u[2 * i], u[2 * i + 1])
    return out


def run_chain(h: np.ndarray, floor: np.ndarray, j: float, k: float,
              sweeps: int, rng: np.random.Generator) -> None:
    """Run ``sweeps`` sequential sweeps in place, 2n uniforms per sweep."""
    n = h.shape[0]
    for _ in range(sweeps):
        sweep_periodic(h, floor, j, k, rng.random(2 * n))
