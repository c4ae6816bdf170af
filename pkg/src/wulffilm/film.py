"""Thermal film over a quenched substrate, and its comparison against the
envelope necklace.

The film is a solid-on-solid chain with gradient coupling j2 and pressure k2
at unit temperature, constrained to stay on or above the quenched substrate.
Each site is resampled exactly from its conditional (a floor-truncated
piecewise-exponential), so there is nothing to tune; thermal averages are
accumulated over the measurement sweeps and compared site by site with the
envelope of the matching tabulated profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import heatbath
from .necklace import Necklace, envelope_bruteforce, envelope_eval, periodic_contact_set
from .shapes import ShapeModel, UnreachablePair
from .substrate import PERIODIC, WINDOW, Substrate


@dataclass
class FilmState:
    """Film heights over a quenched substrate with running thermal averages."""

    substrate: Substrate
    j2: float
    k2: float
    h2: np.ndarray
    sum_h2: np.ndarray
    min_h2: np.ndarray
    max_h2: np.ndarray
    burn_in: int
    measured: int = 0
    seed: int = 0

    @property
    def mean_h2(self) -> np.ndarray:
        if self.measured == 0:
            raise ValueError("no measurement sweeps accumulated yet")
        return self.sum_h2 / self.measured

    @property
    def min_clearance(self) -> float:
        """Smallest film-substrate distance seen at any site, any time."""
        return float(np.min(self.min_h2 - self.substrate.heights))


def film_heat_bath_run(substrate: Substrate, j2: float, k2: float,
                       burn_in: int, measure: int, seed: int) -> FilmState:
    """Thermalize and measure a film over a quenched periodic substrate.

    Sequential exact heat-bath sweeps; the chain starts at substrate + 1/k2
    (the decoupled-chain mean offset).  Per-site thermal means and min/max
    are accumulated over the ``measure`` sweeps that follow ``burn_in``.
    """
    if substrate.boundary != PERIODIC:
        raise ValueError("film runs over a periodic substrate")
    if k2 <= 0 or j2 < 0:
        raise ValueError(f"need k2 > 0 and j2 >= 0, got j2={j2}, k2={k2}")
    if measure < 1 or burn_in < 0:
        raise ValueError(f"bad run lengths burn_in={burn_in}, measure={measure}")
    floor = np.asarray(substrate.heights, dtype=float)
    n = floor.size
    rng = np.random.default_rng(seed)
    h2 = floor + 1.0 / k2
    heatbath.run_chain(h2, floor, j2, k2, burn_in, rng)
    sum_h2 = np.zeros(n)
    min_h2 = np.full(n, np.inf)
    max_h2 = np.full(n, -np.inf)
    for _ in range(measure):
        heatbath.sweep_periodic(h2, floor, j2, k2, rng.random(2 * n))
        sum_h2 += h2
        np.minimum(min_h2, h2, out=min_h2)
        np.maximum(max_h2, h2, out=max_h2)
    return FilmState(substrate=substrate, j2=j2, k2=k2, h2=h2, sum_h2=sum_h2,
                     min_h2=min_h2, max_h2=max_h2, burn_in=burn_in,
                     measured=measure, seed=seed)


@dataclass(frozen=True)
class FilmComparison:
    """Per-site deviation of the thermal film from the necklace envelope."""

    deviation: np.ndarray = field(repr=False)       # mean film height - envelope
    envelope: np.ndarray = field(repr=False)
    clearance: np.ndarray = field(repr=False)       # envelope - substrate
    exclusion: float
    necklace: Necklace | None = field(repr=False)   # None when the direct
                                                    # infimum evaluator was used

    @staticmethod
    def _stats(d: np.ndarray) -> dict[str, float]:
        return {
            "median_abs": float(np.median(np.abs(d))),
            "mean": float(np.mean(d)),
            "max_abs": float(np.max(np.abs(d))),
            "sites": int(d.size),
        }

    @property
    def stats_all(self) -> dict[str, float]:
        return self._stats(self.deviation)

    @property
    def stats_far(self) -> dict[str, float]:
        """Stats over sites clear of the near-contact exclusion zone."""
        far = self.clearance > self.exclusion
        if not np.any(far):
            return {"median_abs": math.nan, "mean": math.nan,
                    "max_abs": math.nan, "sites": 0}
        return self._stats(self.deviation[far])

    def to_dict(self) -> dict:
        return {
            "exclusion": self.exclusion,
            "all_sites": self.stats_all,
            "outside_exclusion": self.stats_far,
            "contact_count": (int(self.necklace.contacts[0].size)
                              if self.necklace is not None else None),
            "evaluator": "necklace" if self.necklace is not None else "direct_infimum",
        }


def periodic_envelope(substrate: Substrate, shape: ShapeModel,
                      grid_step: float = 0.05) -> tuple[np.ndarray, Necklace | None]:
    """Envelope heights at the lattice sites of a periodic substrate.

    Uses the two-point necklace; when a gap exceeds the reachable span of a
    finite-support profile (so no two-point chain exists there) it falls back
    to the direct infimum on the tiled window, which is defined regardless.
    """
    sites = np.arange(substrate.n, dtype=float)
    try:
        neck = periodic_contact_set(substrate, shape)
        return envelope_eval(neck, sites), neck
    except UnreachablePair:
        n = substrate.n
        tiled = Substrate(heights=np.concatenate([substrate.heights] * 3),
                          boundary=WINDOW,
                          provenance={"generator": "tiled", "base": substrate.provenance})
        _, env = envelope_bruteforce(tiled, shape, grid_step=grid_step,
                                     xs=sites + n)
        return env, None


def compare_film_to_necklace(film: FilmState, shape: ShapeModel,
                             exclusion: float = 1.0) -> FilmComparison:
    """Compare the time-averaged film with the periodic necklace envelope.

    The profile must be the tabulated kind built at the film couplings.  The
    near-contact exclusion threshold separates sites where the substrate
    rises close under the film (where thermal repulsion lifts the film above
    the envelope) from the free-hanging spans.
    """
    if shape.kind != "sos_wulff":
        raise ValueError("comparison requires the tabulated solid-on-solid profile")
    if not (math.isclose(shape.j2, film.j2) and math.isclose(shape.k2, film.k2)):
        raise ValueError(
            f"profile couplings ({shape.j2}, {shape.k2}) != film couplings "
            f"({film.j2}, {film.k2})")
    env, neck = periodic_envelope(film.substrate, shape)
    dev = film.mean_h2 - env
    clearance = env - film.substrate.heights
    return FilmComparison(deviation=dev, envelope=env, clearance=clearance,
                          exclusion=exclusion, necklace=neck)
