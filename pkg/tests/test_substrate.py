"""Substrate generators and the exact heat-bath conditional sampler."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import ks_2samp

from wulffilm.heatbath import conditional_draws, run_chain
from wulffilm.substrate import SosParams, Substrate, gen_iid_exponential, gen_sos_substrate

# two-sample KS acceptance: statistic below the 1% critical value
KS_C_1PCT = 1.628


def ks_crit(n: int, m: int) -> float:
    return KS_C_1PCT * math.sqrt((n + m) / (n * m))


# ---------------------------------------------------------------------------
# iid exponential
# ---------------------------------------------------------------------------

def test_iid_mean_and_tail():
    n = 1_000_000
    sub = gen_iid_exponential(n, seed=2024)
    assert abs(sub.heights.mean() - 1.0) < 5.0 / math.sqrt(n)
    frac = float(np.mean(sub.heights > math.log(10.0)))
    assert abs(frac - 0.1) < 5.0 * math.sqrt(0.09 / n)


def test_iid_determinism():
    a = gen_iid_exponential(1000, seed=7)
    b = gen_iid_exponential(1000, seed=7)
    np.testing.assert_array_equal(a.heights, b.heights)
    c = gen_iid_exponential(1000, seed=8)
    assert not np.array_equal(a.heights, c.heights)


def test_iid_validation():
    with pytest.raises(ValueError):
        gen_iid_exponential(1, seed=0)


def test_substrate_invariants():
    with pytest.raises(ValueError):
        Substrate(heights=np.array([1.0, -0.5, 2.0]))
    with pytest.raises(ValueError):
        Substrate(heights=np.array([1.0, 2.0]), boundary="moebius")


# ---------------------------------------------------------------------------
# conditional sampler against the analytic CDF
# ---------------------------------------------------------------------------

def _analytic_cdf(xs: np.ndarray, u: float, v: float, j: float, k: float,
                  floor: float) -> np.ndarray:
    """Independent oracle: normalize exp(-j(|h-u|+|h-v|) - k h) by quadrature."""

    def neg_logrho(h: float) -> float:
        return j * (abs(h - u) + abs(h - v)) + k * h

    ref = min(neg_logrho(p) for p in (floor, max(floor, min(u, v)), max(floor, max(u, v))))

    def rho(h: float) -> float:
        return math.exp(-(neg_logrho(h) - ref))

    brk = sorted({floor, max(floor, min(u, v)), max(floor, max(u, v))})
    hi = max(brk) + 60.0 / (k if k > 0 else 1.0)
    total = 0.0
    cuts = brk + [hi]
    for lo_c, hi_c in zip(cuts[:-1], cuts[1:]):
        if hi_c > lo_c:
            total += quad(rho, lo_c, hi_c, limit=200)[0]
    out = np.empty(xs.size)
    for i, x in enumerate(xs):
        acc = 0.0
        for lo_c, hi_c in zip(cuts[:-1], cuts[1:]):
            a, b = lo_c, min(hi_c, x)
            if b > a:
                acc += quad(rho, a, b, limit=200)[0]
        out[i] = min(acc / total, 1.0)
    return out


@pytest.mark.parametrize("u,v,j,k,floor", [
    (1.0, 3.0, 1.0, 0.5, 0.0),       # all three segments active
    (0.2, 0.1, 30.0, 2.0, 1.5),      # stiff film case, floor above both neighbors
    (5.0, 0.0, 0.0, 1.0, 0.0),       # decoupled: plain exponential
    (2.0, 2.0, 5.0, 0.125, 1.0),     # equal neighbors, middle segment empty
    (4.0, 1.0, 0.3, 2.0, 2.5),       # floor inside the middle segment
])
def test_conditional_sampler_matches_cdf(u, v, j, k, floor):
    n = 1_000_000
    rng = np.random.default_rng(hash((u, v, j, k, floor)) & (2**63 - 1))
    draws = conditional_draws(u, v, j, k, floor, rng.random(2 * n))
    assert draws.min() >= floor
    qs = np.quantile(draws, np.linspace(0.005, 0.995, 199))
    emp = np.searchsorted(np.sort(draws), qs, side="right") / n
    ana = _analytic_cdf(qs, u, v, j, k, floor)
    assert np.abs(emp - ana).max() < 0.005


# ---------------------------------------------------------------------------
# thermal substrate
# ---------------------------------------------------------------------------

def test_sos_decoupled_is_iid_exponential():
    n = 100_000
    sub = gen_sos_substrate(n, SosParams(j1=0.0, k1=1.0, burn_in=3), seed=5)
    ref = gen_iid_exponential(n, seed=99)
    stat = ks_2samp(sub.heights, ref.heights).statistic
    assert stat < ks_crit(n, n)


def test_sos_decoupled_rate2_mean():
    n = 100_000
    sub = gen_sos_substrate(n, SosParams(j1=0.0, k1=2.0, burn_in=3), seed=6)
    assert abs(sub.heights.mean() - 0.5) < 5.0 * 0.5 / math.sqrt(n)


def test_sos_reference_parameters_run():
    sub = gen_sos_substrate(512, SosParams(j1=1.0, k1=0.5), seed=11)
    assert sub.boundary == "periodic"
    assert sub.n == 512
    assert np.all(sub.heights >= 0)


def test_sos_determinism():
    p = SosParams(j1=1.0, k1=0.5, burn_in=20)
    a = gen_sos_substrate(256, p, seed=3)
    b = gen_sos_substrate(256, p, seed=3)
    np.testing.assert_array_equal(a.heights, b.heights)


def test_sos_marginal_invariant_under_extra_sweep():
    """Stationarity smoke test: one more sweep leaves the site marginal alone."""
    chains, n = 1500, 32
    p, k1, j1 = 200, 0.5, 1.0

    def site0(n_sweeps: int, base_seed: int) -> np.ndarray:
        out = np.empty(chains)
        for c in range(chains):
            rng = np.random.default_rng(base_seed + c)
            h = rng.exponential(scale=1.0 / k1, size=n)
            run_chain(h, np.zeros(n), j1, k1, n_sweeps, rng)
            out[c] = h[0]
        return out

    a = site0(p, 9_000_000)
    b = site0(p + 1, 17_000_000)
    stat = ks_2samp(a, b).statistic
    assert stat < ks_crit(chains, chains)


def test_ring_marginal_matches_gibbs_measure():
    """End-to-end target check: the 3-site ring's single-site marginal against
    direct numeric integration of the chain measure (couplings in the weight,
    not just the single-site conditional)."""
    j1, k1, m, hmax = 1.0, 0.8, 600, 16.0
    g = np.linspace(0.0, hmax, m)
    wq = np.full(m, g[1] - g[0])
    wq[0] *= 0.5
    wq[-1] *= 0.5
    h1, h2 = np.meshgrid(g, g, indexing="ij")
    w12 = np.outer(wq, wq)
    base = -j1 * np.abs(h1 - h2) - k1 * (h1 + h2)
    mass = np.empty(m)
    for i, h0 in enumerate(g):
        mass[i] = (np.exp(base - j1 * (np.abs(h0 - h1) + np.abs(h2 - h0)) - k1 * h0) * w12).sum()
    cdf = np.cumsum(mass * wq)
    cdf /= cdf[-1]

    chains = 3000
    vals = np.empty(chains)
    for s in range(chains):
        sub = gen_sos_substrate(3, SosParams(j1=j1, k1=k1, burn_in=60), seed=70_000 + s)
        vals[s] = sub.heights[0]
    qs = np.quantile(vals, np.linspace(0.02, 0.98, 49))
    emp = np.searchsorted(np.sort(vals), qs, side="right") / chains
    ana = np.interp(qs, g, cdf)
    assert np.abs(emp - ana).max() < KS_C_1PCT / math.sqrt(chains)


def test_sos_params_validation():
    with pytest.raises(ValueError):
        SosParams(j1=-1.0, k1=1.0)
    with pytest.raises(ValueError):
        SosParams(j1=0.0, k1=0.0)
    with pytest.raises(ValueError):
        SosParams(j1=0.0, k1=1.0, sweeps=0)
    with pytest.raises(ValueError):
        SosParams(j1=0.0, k1=1.0, burn_in=-1)
    with pytest.raises(ValueError):
        gen_sos_substrate(1, SosParams(j1=0.0, k1=1.0), seed=0)
