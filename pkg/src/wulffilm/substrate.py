"""Random substrate generators.

Two disorder classes: iid exponential heights of mean 1 (the analytic
setting for the contact-density results) and a thermalized solid-on-solid
chain with gradient coupling j1 and field k1 at unit temperature, sampled by
exact heat-bath sweeps with periodic boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import heatbath

WINDOW = "window"
PERIODIC = "periodic"


@dataclass(frozen=True)
class Substrate:
    """Nonnegative lattice heights plus how they were made."""

    heights: np.ndarray
    boundary: str = WINDOW
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.heights.ndim != 1 or self.heights.size < 2:
            raise ValueError(f"need at least 2 sites, got shape {self.heights.shape}")
        if self.boundary not in (WINDOW, PERIODIC):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        if np.any(self.heights < 0):
            raise ValueError("substrate heights must be nonnegative")
        self.heights.flags.writeable = False  # safe to share across workers

    @property
    def n(self) -> int:
        return self.heights.size


@dataclass(frozen=True)
class SosParams:
    """Couplings and run lengths for the thermal substrate chain."""

    j1: float
    k1: float
    sweeps: int = 1
    burn_in: int = 100  # sweeps; one sweep = one update per site

    def __post_init__(self):
        if self.j1 < 0:
            raise ValueError(f"j1 must be nonnegative, got {self.j1}")
        if self.k1 <= 0:
            raise ValueError(f"k1 must be positive, got {self.k1}")
        if self.sweeps <= 0:
            raise ValueError(f"sweeps must be positive, got {self.sweeps}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be nonnegative, got {self.burn_in}")


def gen_iid_exponential(n: int, seed: int, boundary: str = WINDOW) -> Substrate:
    """iid Exponential(mean 1) heights, a deterministic function of the seed."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    h = rng.exponential(size=n)
    return Substrate(
        heights=h,
        boundary=boundary,
        provenance={"generator": "iid_exponential", "n": n, "seed": seed},
    )


def gen_sos_substrate(n: int, params: SosParams, seed: int) -> Substrate:
    """Thermalized solid-on-solid substrate at unit temperature.

    Periodic boundary; sequential exact heat-bath sweeps (each site resampled
    from its conditional given the current neighbors); ``burn_in`` sweeps are
    discarded, then ``sweeps`` more are run and the final state is returned.
    The chain starts from iid Exponential(rate k1), the exact stationary
    state of the decoupled (j1 = 0) chain.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    h = rng.exponential(scale=1.0 / params.k1, size=n)
    floor = np.zeros(n)
    heatbath.run_chain(h, floor, params.j1, params.k1, params.burn_in + params.sweeps, rng)
    return Substrate(
        heights=h,
        boundary=PERIODIC,
        provenance={
            "generator": "sos_heat_bath",
            "n": n,
            "j1": params.j1,
            "k1": params.k1,
            "sweeps": params.sweeps,
            "burn_in": params.burn_in,
            "seed": seed,
        },
    )
