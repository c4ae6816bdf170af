"""Acceptance gate: every criterion at its stated tolerance and runtime budget.

Run with ``pytest tests/test_acceptance.py -s`` to see one line per criterion.
Statistical criteria run at fixed seeds, so the whole gate is deterministic.
"""

import math
import time

import numpy as np

from wulffilm.cli import main
from wulffilm.density import (
    cone_density_exact,
    cone_density_lower,
    cone_density_upper,
    empirical_density,
    parabola_density_upper,
)
from wulffilm.film import compare_film_to_necklace, film_heat_bath_run
from wulffilm.gibbs import compositions, partition_function, pattern_probability, signature_frequencies_direct
from wulffilm.necklace import contact_set, contact_set_bruteforce
from wulffilm.shapes import build_sos_wulff_profile, cone, eval_shape, parabola, sos_wulff
from wulffilm.substrate import SosParams, gen_iid_exponential, gen_sos_substrate


class Budget:
    """Context timer that reports and enforces the stated runtime limit."""

    def __init__(self, number: int, title: str, seconds: float):
        self.number, self.title, self.limit = number, title, seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        print(f"ACCEPTANCE {self.number} {status}: {self.title} ({dt:.1f}s / limit {self.limit:.0f}s)")
        if exc_type is None:
            assert dt < self.limit, f"criterion {self.number} exceeded runtime budget: {dt:.1f}s"


def test_criterion_1_oracle_equivalence():
    with Budget(1, "contact_set == brute force, 1000x N=200, cone and parabola", 120):
        for shape in (cone(0.3), parabola(0.1)):
            mismatches = 0
            for t in range(1000):
                sub = gen_iid_exponential(200, seed=10_000 + t)
                fast = contact_set(sub, shape).indices
                brute = contact_set_bruteforce(sub, shape).indices
                if not np.array_equal(fast, brute):
                    mismatches += 1
            assert mismatches == 0, f"{shape.label()}: {mismatches} mismatches"


def test_criterion_2_parabola_transform():
    with Budget(2, "parabola hull transform == generic stack, 1000x N=200", 60):
        shape = parabola(0.1)
        mismatches = 0
        for t in range(1000):
            sub = gen_iid_exponential(200, seed=20_000 + t)
            hull = contact_set(sub, shape, method="hull").indices
            stack = contact_set(sub, shape, method="stack").indices
            if not np.array_equal(hull, stack):
                mismatches += 1
        assert mismatches == 0


def test_criterion_3_cone_density_exact_vs_empirical():
    with Budget(3, "cone empirical density within 3 SE of quadrature (lam 0.2, 0.05)", 300):
        for lam in (0.2, 0.05):
            est = empirical_density(cone(lam), n=100_000, samples=50, master_seed=777)
            exact = cone_density_exact(lam)
            z = abs(est.p_hat - exact) / est.se
            assert z < 3.0, f"lam={lam}: p_hat={est.p_hat}, exact={exact}, z={z:.2f}"


def test_criterion_4_limit_and_sandwich():
    with Budget(4, "small-lam ratio in [0.49, 0.51]; lower <= exact <= upper", 60):
        ratio = cone_density_exact(1e-4) / 1e-4
        assert 0.49 <= ratio <= 0.51, f"ratio={ratio}"
        for lam in (0.01, 0.05, 0.2, 0.5):
            lo, ex, up = cone_density_lower(lam), cone_density_exact(lam), cone_density_upper(lam)
            assert lo <= ex <= up, f"lam={lam}: {lo}, {ex}, {up}"


def test_criterion_5_parabola_bound_and_sqrt_order():
    with Budget(5, "parabola density below bound; p_hat/sqrt(lam) within factor 2", 600):
        p_hats = {}
        for lam in (0.04, 0.01, 0.0025):
            est = empirical_density(parabola(lam), n=100_000, samples=50, master_seed=888)
            p_hats[lam] = est.p_hat
            if lam in (0.04, 0.01):
                assert est.p_hat < parabola_density_upper(lam), \
                    f"lam={lam}: {est.p_hat} !< {parabola_density_upper(lam)}"
        ratios = [p_hats[lam] / math.sqrt(lam) for lam in (0.04, 0.01, 0.0025)]
        assert max(ratios) / min(ratios) < 2.0, f"ratios={ratios}"


def test_criterion_6_gibbs_normalization_and_consistency():
    with Budget(6, "partition = 1 +- 3 SE (L=1..4); window-5 signatures vs 1e6 direct", 600):
        for shape in (parabola(0.5), cone(1.0)):
            for L in (1, 2, 3, 4):
                xi, se = partition_function(shape, L, mc_samples=200_000, seed=606)
                if L == 1:
                    assert xi == 1.0 and se == 0.0
                else:
                    assert abs(xi - 1.0) <= 3.0 * se, f"{shape.label()} L={L}: {xi} +- {se}"
        L = 5
        shape = parabola(0.5)
        freqs = signature_frequencies_direct(shape, L, 1_000_000, seed=610)
        for ci, comp in enumerate(compositions(L)):
            p_mc, se_mc = pattern_probability(shape, L, comp, 200_000, seed=15_000 + ci)
            p_emp, se_emp = freqs.get(comp, (0.0, 1.0 / 1_000_000))
            tol = 3.0 * math.sqrt(se_mc**2 + se_emp**2)
            assert abs(p_mc - p_emp) <= tol, \
                f"signature {comp}: gibbs={p_mc:.6f}, direct={p_emp:.6f}, tol={tol:.6f}"


def test_criterion_7_film_vs_necklace():
    with Budget(7, "film j2=30 k2=2 over quenched substrate: median |d| <= 1, mean d >= 0; k2-monotone", 600):
        sub = gen_sos_substrate(512, SosParams(j1=1.0, k1=0.5), seed=7001)
        film = film_heat_bath_run(sub, 30.0, 2.0, burn_in=10_000, measure=100_000, seed=7002)
        comp = compare_film_to_necklace(film, sos_wulff(30.0, 2.0), exclusion=1.0)
        far = comp.stats_far
        assert far["sites"] > 0
        assert far["median_abs"] <= 1.0, f"median |d| = {far['median_abs']}"
        assert comp.stats_all["mean"] >= 0.0, f"mean d = {comp.stats_all['mean']}"
        # monotone mean film height in the pressure, same quenched substrate
        means, ses = [], []
        for k2 in (0.2, 0.5, 1.0, 2.0):
            chains = [film_heat_bath_run(sub, 30.0, k2, 2000, 8000, seed=7100 + c).mean_h2.mean()
                      for c in range(3)]
            means.append(float(np.mean(chains)))
            ses.append(float(np.std(chains, ddof=1) / math.sqrt(3)))
        for i in range(3):
            sep = means[i] - means[i + 1]
            assert sep > 5.0 * math.hypot(ses[i], ses[i + 1]), \
                f"k2 step {i}: separation {sep} vs SEs {ses[i]}, {ses[i+1]}"


def test_criterion_8_shape_integrity():
    with Budget(8, "tabulated profile: normalization, evenness, convexity, support, scaling", 10):
        shape = sos_wulff(5.0, 0.125)
        prof = shape.profile
        assert abs(eval_shape(shape, 0.0)) < 1e-9
        xs = np.linspace(0.0, 39.9, 1500)
        np.testing.assert_allclose(eval_shape(shape, xs), eval_shape(shape, -xs),
                                   rtol=0, atol=1e-12)
        grid = np.linspace(-39.9, 39.9, 4001)
        assert np.diff(eval_shape(shape, grid), 2).min() >= -1e-9
        assert abs(prof.support_radius - 40.0) <= 0.1
        assert prof.xs[-1] >= 0.999 * 40.0
        ref = build_sos_wulff_profile(5.0, 1.0)
        probes = np.linspace(0.0, 0.998 * prof.support_radius, 100)
        np.testing.assert_allclose(prof(probes), ref(0.125 * probes) / 0.125, atol=1e-6)


def test_criterion_9_cli_determinism(tmp_path):
    with Budget(9, "every subcommand byte-identical across reruns and worker counts", 120):
        runs = {
            "gen-substrate": ["gen-substrate", "--kind", "sos", "--n", "64", "--seed", "3",
                              "--burn-in", "20", "--out", None],
            "wulff-profile": ["wulff-profile", "--j2", "5", "--k2", "0.125",
                              "--nodes", "256", "--out", None],
            "necklace": ["necklace", "--shape", "parabola", "--lambda", "0.1",
                         "--n", "400", "--seed", "7", "--out", None],
            "density-scan": ["density-scan", "--shape", "cone", "--lam", "0.2",
                             "--n", "4000", "--samples", "6", "--seed", "42", "--out", None],
            "gibbs-check": ["gibbs-check", "--shape", "cone", "--lam", "1.0", "--L", "2",
                            "--mc-samples", "4000", "--direct-samples", "10000",
                            "--seed", "5", "--out", None],
            "film-mc": ["film-mc", "--j2", "30", "--k2", "2", "--n", "64",
                        "--burn-in", "100", "--measure", "200", "--substrate-burn-in", "20",
                        "--seed", "17", "--out", None],
        }
        for name, argv in runs.items():
            paths = [tmp_path / f"{name}_{i}.out" for i in (1, 2)]
            blobs = []
            for p in paths:
                cmd = [str(p) if a is None else a for a in argv]
                assert main(cmd) == 0, name
                blobs.append(p.read_bytes().replace(p.name.encode(), b"OUT"))
            assert blobs[0] == blobs[1], f"{name} not deterministic"
        # worker count must not change the data
        import json
        outs = []
        for w in (1, 3):
            p = tmp_path / f"workers_{w}.json"
            assert main(["density-scan", "--shape", "parabola", "--lam", "0.04",
                         "--n", "4000", "--samples", "6", "--seed", "11",
                         "--workers", str(w), "--out", str(p)]) == 0
            outs.append(json.loads(p.read_text())["data"])
        assert outs[0] == outs[1]
