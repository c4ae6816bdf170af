"""Envelope films of convex Wulff profiles over 1D disordered substrates.

The package constructs the lower envelope of all translates of a symmetric
convex profile resting on a random staircase substrate, extracts the
contact-point process, evaluates exact density formulas and bounds for the
cone and parabola profiles, cross-checks the Gibbs-factor formulation of the
contact chain, and compares the whole construction against a thermal
solid-on-solid film simulated by exact heat-bath Monte Carlo.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .shapes import (
    NumericError,
    ShapeModel,
    SupportError,
    TwoPointShape,
    UnreachablePair,
    WulffProfile,
    build_sos_wulff_profile,
    cone,
    eval_shape,
    eval_two_point,
    parabola,
    semicircle,
    sos_wulff,
    two_point_shape,
)
from .substrate import SosParams, Substrate, gen_iid_exponential, gen_sos_substrate
from .necklace import (
    Necklace,
    contact_set,
    contact_set_bruteforce,
    envelope_bruteforce,
    envelope_eval,
    interior_margin,
    periodic_contact_set,
    verify_local_conditions,
)
from .density import (
    DensityEstimate,
    cone_density_exact,
    cone_density_lower,
    cone_density_upper,
    empirical_density,
    parabola_density_upper,
)
from .gibbs import (
    GibbsPattern,
    compositions,
    factor_F,
    factor_G,
    gibbs_weight,
    partition_function,
    pattern_probability,
    signature_frequencies_direct,
)
from .film import FilmComparison, FilmState, compare_film_to_necklace, film_heat_bath_run
from .seeding import derive_seed

__all__ = [
    "__version__",
    "ShapeModel",
    "WulffProfile",
    "TwoPointShape",
    "SupportError",
    "UnreachablePair",
    "NumericError",
    "cone",
    "parabola",
    "semicircle",
    "sos_wulff",
    "eval_shape",
    "build_sos_wulff_profile",
    "two_point_shape",
    "eval_two_point",
    "Substrate",
    "SosParams",
    "gen_iid_exponential",
    "gen_sos_substrate",
    "Necklace",
    "contact_set",
    "contact_set_bruteforce",
    "envelope_eval",
    "envelope_bruteforce",
    "periodic_contact_set",
    "interior_margin",
    "verify_local_conditions",
    "DensityEstimate",
    "cone_density_exact",
    "cone_density_upper",
    "cone_density_lower",
    "parabola_density_upper",
    "empirical_density",
    "GibbsPattern",
    "compositions",
    "factor_F",
    "factor_G",
    "gibbs_weight",
    "partition_function",
    "pattern_probability",
    "signature_frequencies_direct",
    "FilmState",
    "FilmComparison",
    "film_heat_bath_run",
    "compare_film_to_necklace",
    "derive_seed",
]
