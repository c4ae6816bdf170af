"""Gibbs-factor formulation of the contact chain on a finite window.

The law of the window necklace (contact count N, gaps l_1..l_N, contact
heights x_0..x_N) over iid Exponential(1) heights factorizes into
nearest-neighbor terms: an a-priori weight e^{-x_n} per contact height, a
bond factor

    F(x0, l, x1) = prod_{i=1}^{l-1} (1 - e^{-w_i}),

where w_i is the pinned translate through (0, x0), (l, x1) evaluated at i
(the probability that the l-1 interior heights stay below the translate; a
translate value <= 0 makes the factor 0), and a stability indicator

    G(x_prev, l0, x0, l1, x_next) = 1{x0 >= translate through
                                       (-l0, x_prev), (l1, x_next) at 0}.

Summing the integrated weights over all gap compositions of the window
length gives the partition function, which the decomposition argument
predicts to be exactly 1; the Monte-Carlo estimator here verifies that
numerically instead of assuming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .necklace import contact_set
from .seeding import derive_seed
from .shapes import ShapeModel, eval_two_point, two_point_shape
from .substrate import Substrate

#: Monte-Carlo draws per chunk; chunking fixes the RNG stream layout so the
#: estimate is independent of any parallel scheduling.
MC_CHUNK = 1 << 16

MAX_WINDOW = 8


@dataclass(frozen=True)
class GibbsPattern:
    """A window configuration: gaps l_1..l_N and contact heights x_0..x_N."""

    gaps: tuple[int, ...]
    heights: tuple[float, ...]

    def __post_init__(self):
        if len(self.gaps) < 1:
            raise ValueError("need at least one gap")
        if any(l < 1 for l in self.gaps):
            raise ValueError(f"gaps must be positive integers, got {self.gaps}")
        if len(self.heights) != len(self.gaps) + 1:
            raise ValueError("need one more height than gaps")
        if any(x < 0 for x in self.heights):
            raise ValueError(f"heights must be nonnegative, got {self.heights}")

    @property
    def N(self) -> int:
        return len(self.gaps)

    @property
    def L(self) -> int:
        return sum(self.gaps)


def compositions(L: int) -> list[tuple[int, ...]]:
    """All ordered compositions of L into positive parts, in a fixed order."""
    if L < 1:
        raise ValueError(f"L must be positive, got {L}")
    out = []
    for mask in range(1 << (L - 1)):
        parts, last = [], 0
        for pos in range(L - 1):
            if mask >> pos & 1:
                parts.append(pos + 1 - last)
                last = pos + 1
        parts.append(L - last)
        out.append(tuple(parts))
    return out


# ---------------------------------------------------------------------------
# Local factors
# ---------------------------------------------------------------------------

def factor_F(shape: ShapeModel, x0: float, l1: int, x1: float) -> float:
    """Bond factor in [0, 1]; empty product 1 for l1 = 1."""
    if l1 < 1:
        raise ValueError(f"gap must be >= 1, got {l1}")
    if l1 == 1:
        return 1.0
    tps = two_point_shape(shape, 0.0, float(x0), float(l1), float(x1))
    w = eval_two_point(tps, np.arange(1, l1, dtype=float))
    if np.any(w <= 0.0):
        return 0.0
    return float(np.prod(-np.expm1(-w)))


def factor_G(shape: ShapeModel, x_prev: float, l0: int, x0: float,
             l1: int, x_next: float) -> float:
    """Stability indicator: 1 iff x0 clears the translate through its neighbors."""
    if l0 < 1 or l1 < 1:
        raise ValueError(f"gaps must be >= 1, got {l0}, {l1}")
    tps = two_point_shape(shape, -float(l0), float(x_prev), float(l1), float(x_next))
    return 1.0 if x0 >= eval_two_point(tps, 0.0) else 0.0


def gibbs_weight(shape: ShapeModel, pattern: GibbsPattern) -> float:
    """Unnormalized density of a pattern: prod e^{-x_n} * prod F * prod G."""
    x = pattern.heights
    l = pattern.gaps
    weight = math.exp(-sum(x))
    for n in range(pattern.N):
        weight *= factor_F(shape, x[n], l[n], x[n + 1])
        if weight == 0.0:
            return 0.0
    for n in range(1, pattern.N):
        weight *= factor_G(shape, x[n - 1], l[n - 1], x[n], l[n], x[n + 1])
        if weight == 0.0:
            return 0.0
    return weight


# ---------------------------------------------------------------------------
# Vectorized factors for the two closed-form profiles
# ---------------------------------------------------------------------------

def _f_vec(shape: ShapeModel, x0: np.ndarray, l: int, x1: np.ndarray) -> np.ndarray:
    out = np.ones_like(x0)
    if shape.kind == "parabola":
        lam = shape.lam
        for i in range(1, l):
            w = lam * i * (i - l) + ((l - i) * x0 + i * x1) / l
            out *= np.where(w > 0.0, -np.expm1(-np.maximum(w, 0.0)), 0.0)
    else:
        lam = shape.lam
        for i in range(1, l):
            w = np.maximum(x0 - lam * i, x1 - lam * (l - i))
            out *= np.where(w > 0.0, -np.expm1(-np.maximum(w, 0.0)), 0.0)
    return out


def _g_vec(shape: ShapeModel, xm: np.ndarray, l0: int, x0: np.ndarray,
           l1: int, xp: np.ndarray) -> np.ndarray:
    if shape.kind == "parabola":
        w = -shape.lam * l0 * l1 + (l1 * xm + l0 * xp) / (l0 + l1)
    else:
        w = np.maximum(xm - shape.lam * l0, xp - shape.lam * l1)
    return (x0 >= w).astype(float)


def _trial_products(shape: ShapeModel, comp: tuple[int, ...], X: np.ndarray) -> np.ndarray:
    """prod F * prod G for each row of heights X (shape (m, N+1))."""
    if shape.kind in ("cone", "parabola"):
        P = np.ones(X.shape[0])
        for n, l in enumerate(comp):
            if l > 1:
                P *= _f_vec(shape, X[:, n], l, X[:, n + 1])
        for n in range(1, len(comp)):
            P *= _g_vec(shape, X[:, n - 1], comp[n - 1], X[:, n], comp[n], X[:, n + 1])
        return P
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        p = 1.0
        for n, l in enumerate(comp):
            p *= factor_F(shape, X[r, n], l, X[r, n + 1])
            if p == 0.0:
                break
        if p != 0.0:
            for n in range(1, len(comp)):
                p *= factor_G(shape, X[r, n - 1], comp[n - 1], X[r, n], comp[n], X[r, n + 1])
                if p == 0.0:
                    break
        out[r] = p
    return out


# ---------------------------------------------------------------------------
# Monte-Carlo integrals
# ---------------------------------------------------------------------------

def pattern_probability(shape: ShapeModel, L: int, signature: tuple[int, ...],
                        mc_samples: int, seed: int) -> tuple[float, float]:
    """P(gap signature) on a window of length L, by Monte-Carlo integration.

    The iid Exponential(1) prior on the contact heights doubles as the
    proposal, so the estimator is the plain average of prod F * prod G over
    prior draws; unbiased, with the usual sample standard error.
    """
    signature = tuple(int(l) for l in signature)
    if sum(signature) != L:
        raise ValueError(f"signature {signature} does not sum to L={L}")
    if any(l < 1 for l in signature):
        raise ValueError(f"gaps must be positive, got {signature}")
    if mc_samples < 2:
        raise ValueError(f"need at least 2 samples, got {mc_samples}")
    ncols = len(signature) + 1
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk_index = 0
    while done < mc_samples:
        m = min(MC_CHUNK, mc_samples - done)
        rng = np.random.default_rng(derive_seed(seed, chunk_index))
        X = rng.exponential(size=(m, ncols))
        P = _trial_products(shape, signature, X)
        total += float(P.sum())
        total_sq += float(np.square(P).sum())
        done += m
        chunk_index += 1
    mean = total / mc_samples
    var = max(0.0, (total_sq - mc_samples * mean * mean) / (mc_samples - 1))
    return mean, math.sqrt(var / mc_samples)


def partition_function(shape: ShapeModel, L: int, mc_samples: int,
                       seed: int) -> tuple[float, float]:
    """Sum of pattern probabilities over all gap compositions of [0, L].

    Desk-scale only (L <= 8: the composition count doubles per unit).  The
    estimate should be 1 within error if the factorization is the exact law
    of the window necklace; returns (estimate, standard error).
    """
    if not 1 <= L <= MAX_WINDOW:
        raise ValueError(f"L must be in [1, {MAX_WINDOW}], got {L}")
    total = 0.0
    var = 0.0
    for ci, comp in enumerate(compositions(L)):
        est, se = pattern_probability(shape, L, comp, mc_samples, derive_seed(seed, ci))
        total += est
        var += se * se
    return total, math.sqrt(var)


# ---------------------------------------------------------------------------
# Direct-simulation oracle
# ---------------------------------------------------------------------------

def signature_frequencies_direct(shape: ShapeModel, L: int, n_substrates: int,
                                 seed: int) -> dict[tuple[int, ...], tuple[float, float]]:
    """Gap-signature frequencies from direct substrate draws on [0, L].

    Draws iid Exponential(1) windows, computes each window's contact set by
    testing every interior site against all sandwiching pairs (vectorized
    across substrates for the closed-form profiles), and tabulates the gap
    signatures.  Returns {signature: (frequency, binomial standard error)}.
    """
    if not 1 <= L <= MAX_WINDOW:
        raise ValueError(f"L must be in [1, {MAX_WINDOW}], got {L}")
    if n_substrates < 1:
        raise ValueError(f"need at least 1 substrate, got {n_substrates}")
    counts: dict[int, int] = {}
    if shape.kind in ("cone", "parabola"):
        lam = shape.lam
        done = 0
        chunk_index = 0
        bits = 1 << np.arange(L + 1)
        while done < n_substrates:
            m = min(200_000, n_substrates - done)
            rng = np.random.default_rng(derive_seed(seed, chunk_index))
            H = rng.exponential(size=(m, L + 1))
            contact = np.ones((m, L + 1), dtype=bool)
            for i in range(1, L):
                above = np.zeros(m, dtype=bool)
                for j in range(0, i):
                    for k in range(i + 1, L + 1):
                        if shape.kind == "parabola":
                            w = (lam * (i - j) * (i - k)
                                 + ((k - i) * H[:, j] + (i - j) * H[:, k]) / (k - j))
                        else:
                            w = np.maximum(H[:, j] - lam * (i - j), H[:, k] - lam * (k - i))
                        above |= H[:, i] < w
                contact[:, i] = ~above
            codes = contact @ bits
            vals, cnts = np.unique(codes, return_counts=True)
            for v, c in zip(vals, cnts):
                counts[int(v)] = counts.get(int(v), 0) + int(c)
            done += m
            chunk_index += 1
    else:
        for s in range(n_substrates):
            rng = np.random.default_rng(derive_seed(seed, s))
            sub = Substrate(heights=rng.exponential(size=L + 1))
            idx = contact_set(sub, shape).indices
            code = int(np.sum(1 << idx))
            counts[code] = counts.get(code, 0) + 1
    out: dict[tuple[int, ...], tuple[float, float]] = {}
    for code, c in counts.items():
        sites = [i for i in range(L + 1) if code >> i & 1]
        sig = tuple(int(d) for d in np.diff(sites))
        p = c / n_substrates
        prev = out.get(sig, (0.0, 0.0))[0]
        p_tot = prev + p
        out[sig] = (p_tot, math.sqrt(p_tot * (1.0 - p_tot) / n_substrates))
    return out
