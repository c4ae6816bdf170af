"""Contact-point density: exact cone integral, closed-form bounds, and
Monte-Carlo estimation over disorder samples.

For the cone of slope lam over iid Exponential(1) heights the probability
that a given site is a contact has the exact representation

    P = integral_0^inf e^{-x} * prod_{i>=1} (1 - e^{-x-lam*i})^2 dx,

with closed-form upper and lower bounds whose ratio to lam tends to 1/2 as
lam -> 0.  For the parabola only an upper bound of order sqrt(lam) is
available in closed form.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .necklace import contact_set, interior_margin
from .seeding import derive_seed
from .shapes import NumericError, ShapeModel
from .substrate import gen_iid_exponential

#: Product terms with e^{-lam*i} below this are truncated; since e^{-x} <= 1
#: the discarded log-tail is below 2*TRUNC_EPS/(1 - e^{-lam}), negligible
#: against the 1e-10 quadrature target for every lam of interest.
TRUNC_EPS = 1e-16

QUAD_ABS_TOL = 1e-10


def cone_density_exact(lam: float, abs_tol: float = QUAD_ABS_TOL) -> float:
    """Adaptive quadrature of the exact cone contact-density integral."""
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    imax = int(math.ceil(-math.log(TRUNC_EPS) / lam))
    decay = np.exp(-lam * np.arange(1, imax + 1, dtype=float))

    def integrand(x: float) -> float:
        return math.exp(-x + 2.0 * float(np.sum(np.log1p(-math.exp(-x) * decay))))

    # the mass sits near x = ln(1/lam); give the subdivision a hint there
    peak = math.log(1.0 / lam) if lam < 1.0 else 0.0
    pts = sorted({p for p in (peak - 4.0, peak, peak + 4.0) if 0.0 < p < 60.0})
    value, err = quad(integrand, 0.0, 60.0, points=pts or None,
                      epsabs=abs_tol * 1e-2, epsrel=1e-10, limit=300)
    if err > abs_tol:
        raise NumericError(f"cone density quadrature reached abs error {err:g} > {abs_tol:g}")
    return value


def cone_density_upper(lam: float) -> float:
    """Closed-form upper bound (exponential product bound integrated)."""
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    c = math.exp(-lam) / (-math.expm1(-lam))
    return (1.0 / (2.0 * c)) * (-math.expm1(-2.0 * c))


def cone_density_lower(lam: float) -> float:
    """Closed-form lower bound, valid for 0 < lam < 1."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lower bound needs 0 < lam < 1, got {lam}")
    c = math.exp(-lam) / (-math.expm1(-lam))
    c2 = math.exp(-2.0 * lam) / (-math.expm1(-2.0 * lam))
    y = lam * math.log(1.0 / lam)
    return (1.0 / (2.0 * c)) * (-math.expm1(-2.0 * y * c)) * math.exp(-2.0 * y * y * c2)


def parabola_density_upper(lam: float) -> float:
    """Closed-form upper bound for the parabola, valid for 0 < lam < pi/4."""
    if not 0.0 < lam < math.pi / 4.0:
        raise ValueError(f"parabola bound needs 0 < lam < pi/4, got {lam}")
    r = math.sqrt(lam / math.pi)
    return 3.0 * r * (1.0 + math.exp(2.0 - 1.0 / r) / 3.0) / (1.0 - 2.0 * r)


@dataclass(frozen=True)
class DensityEstimate:
    """Monte-Carlo contact-density estimate with its provenance."""

    shape_label: str
    lam: float
    p_hat: float
    se: float
    samples: int
    n: int
    interior_sites: int
    margin: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError(f"p_hat out of [0, 1]: {self.p_hat}")
        if self.se < 0.0:
            raise ValueError(f"negative standard error: {self.se}")


def _sample_fraction(args) -> float:
    shape, n, margin, seed = args
    sub = gen_iid_exponential(n, seed)
    idx = contact_set(sub, shape).indices
    inside = np.searchsorted(idx, n - 1 - margin, side="right") - np.searchsorted(idx, margin)
    return inside / (n - 2 * margin)


def empirical_density(shape: ShapeModel, n: int, samples: int, master_seed: int,
                      workers: int = 1) -> DensityEstimate:
    """Estimate P(site is a contact) over independent disorder samples.

    Each sample draws a fresh iid exponential substrate from a derived seed,
    builds the contact set, and counts contacts among interior sites (at
    least ``interior_margin`` away from the window edges, which emulates the
    infinite line).  Sites within one substrate are correlated through the
    envelope, so the standard error treats per-sample means as iid
    replicates.  Aggregation is in sample order: the result is independent
    of the worker count.
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    margin = interior_margin(shape, n)
    if n - 2 * margin < 1:
        raise ValueError(
            f"margin {margin} leaves no interior site on n={n}; increase n")
    tasks = [(shape, n, margin, derive_seed(master_seed, s)) for s in range(samples)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fractions = np.fromiter(pool.map(_sample_fraction, tasks, chunksize=4),
                                    dtype=float, count=samples)
    else:
        fractions = np.fromiter(map(_sample_fraction, tasks), dtype=float, count=samples)
    lam = shape.lam if shape.kind in ("cone", "parabola", "semicircle") else shape.k2
    return DensityEstimate(
        shape_label=shape.label(),
        lam=lam,
        p_hat=float(fractions.mean()),
        se=float(fractions.std(ddof=1) / math.sqrt(samples)),
        samples=samples,
        n=n,
        interior_sites=n - 2 * margin,
        margin=margin,
        seed=master_seed,
    )
