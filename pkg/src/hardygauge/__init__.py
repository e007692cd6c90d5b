"""Hardy-space function theory on the unit circle under gauge norms.

The package works on uniform grids of the circle.  It provides gauge norms
and their duals, outer functions built from a boundary modulus, inner-outer
and bounded-inverse factorizations, and a classifier that decides whether
the shift-invariant subspace generated by a function is simply or doubly
invariant.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .factorization import (
    FactorizationResult,
    factorize_inverse_bounded,
    inner_outer_factorize,
    is_in_Halpha,
    log_integrability,
    outer_from_modulus,
)
from .norms import (
    DualNorm,
    GaugeNorm,
    LInfinity,
    Lorentz,
    Lp,
    Orlicz,
    WeightedLpMix,
    continuity_modulus,
    dual_norm,
    extend_to_measurable,
    norm_from_config,
    pairing,
    shipped_continuous_norms,
    validate_axioms,
)
from .spectral import (
    CircleFunction,
    Grid,
    cesaro_mean,
    conjugate_function,
    fourier_coefficients,
    herglotz_evaluate_interior,
    riesz_projection,
    sample_grid,
)
from .subspaces import (
    Classification,
    SubspaceModel,
    bounded_approximation,
    build_cyclic_subspace,
    classify,
    distance_to_subspace,
    verify_certificate,
)
