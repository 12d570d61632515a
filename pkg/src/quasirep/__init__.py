"""Numerical invariants of almost-commuting unitary tuples on closed surfaces."""
from .determinant import MatrixPath, dhs_linear, dhs_quadrature, winding_invariant
from .errors import *  # noqa: F401,F403
from .groups import (
    FreeWord,
    SurfaceGroupData,
    UnitaryTuple,
    build_surface_group,
    clock_shift_tuple,
    commutator_defect,
    commutator_product,
    evaluate_word,
    identity_tuple,
    multiplicativity_constant,
    parse_word,
    perturbed_commuting_tuple,
    twisted_genus_tuple,
)
from .ktheory import (
    BottProjectionData,
    InvariantReport,
    VerifyOptions,
    boundary_integral_check,
    bott_projection,
    bundle_rank_check,
    e_pi_at,
    kappa_invariant,
    simplicial_pushforward,
    surface_data,
    verify,
)
from .matcore import (
    RieszProjector,
    normalized_trace,
    operator_norm,
    polar_unitary,
    principal_log,
    riesz_half_plane,
)
from .surface import SurfaceComplex, build_complex, edge_labels, orientation_signs

__version__ = "0.1.0"
