"""Scarf complexes, Morse matchings and betti bounds for powers of extremal
square-free monomial ideals."""

from .compositions import (
    composition_count,
    enumerate_compositions,
    enumerate_subsets,
    lex_compare,
    support,
)
from .complexes import (
    LabeledComplex,
    f_vector,
    is_minimal_support,
    is_scarf_edge,
    is_scarf_face,
    materialize,
    scarf_complex,
    supports_resolution,
    taylor_vertices,
    u_complex,
    u_facet_label,
    u_facets,
)
from .errors import BudgetError, UnsupportedIdealError
from .formulas import betti1_r3, betti_r2, bounds_small_q, gamma, scarf_edge_census_r3
from .homology import (
    BettiTable,
    GeneralIdeal,
    betti_multigraded_oracle,
    betti_total_oracle,
    extremal_power_ideal,
    is_acyclic_or_empty,
    reduced_homology_ranks,
)
from .labels import divides_label, e_gcd, epsilon_exponent, face_label, scale_face
from .morse import (
    MatchingReport,
    MorseMatching,
    build_edge_matching,
    build_facet_matching,
    build_small_q_matching,
    find_iota,
    find_nu,
    verify_matching,
)
from .psi import (
    SquareFreeIdeal,
    betti_bound_check,
    parse_ideal,
    psi_apply,
    scarf_inclusion_check,
    variable_classes,
)

__version__ = "0.1.0"
