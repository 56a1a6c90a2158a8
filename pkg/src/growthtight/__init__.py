"""Growth exponents of free groups, L^p products, and their quotients."""
from __future__ import annotations

__version__ = "0.1.0"

from .automata import (
    CountingAutomaton,
    CountSequence,
    avoid_factors,
    count_lengths,
    oriented_vs_unoriented_gap,
    perron_root,
    reduced_word_automaton,
)
from .errors import (
    AlphabetMismatchError,
    GrowthtightError,
    InternalInvariantError,
    InvalidInputError,
    ResourceLimitError,
)
from .growth import (
    NEG_INF,
    GrowthBracket,
    bracket_gap,
    check_subadditivity,
    divergence_at_critical,
    fekete_bracket,
    fekete_upper_profile,
    poincare_probe,
    regression_bracket,
    strict_gap_check,
)
from .products import (
    LpProductSpec,
    ProductPoint,
    duality_exponent,
    generating_set_correspondence,
    lp_distance,
    lp_length,
    parse_exponent,
    product_ball_counts,
    product_ball_sequence,
    verify_duality,
)
from .quotients import (
    QuotientOracle,
    check_prop_minimal,
    check_section_structure,
    minimal_section,
    quotient_ball_counts,
    tightness_verdict,
)
from .tree import (
    Axis,
    check_projection_axioms,
    find_long_projections,
    format_witnesses,
    ghat_automaton,
    ghat_membership_exact,
    lemma31_bound_check,
    project_axis_onto_axis,
    project_to_axis,
    projection_diameter,
    same_line,
    shorten,
    shorten_threshold,
)
from .words import (
    Alphabet,
    ReducedWord,
    cyclic_reduce,
    enumerate_ball,
    enumerate_sphere,
    format_word,
    free_reduce,
    multiply,
    parse_word,
    primitive_root,
    sphere_size,
)

__all__ = [
    "Alphabet",
    "AlphabetMismatchError",
    "Axis",
    "CountSequence",
    "CountingAutomaton",
    "GrowthBracket",
    "GrowthtightError",
    "InternalInvariantError",
    "InvalidInputError",
    "LpProductSpec",
    "NEG_INF",
    "ProductPoint",
    "QuotientOracle",
    "ReducedWord",
    "ResourceLimitError",
    "avoid_factors",
    "bracket_gap",
    "check_projection_axioms",
    "check_prop_minimal",
    "check_section_structure",
    "check_subadditivity",
    "count_lengths",
    "cyclic_reduce",
    "divergence_at_critical",
    "duality_exponent",
    "enumerate_ball",
    "enumerate_sphere",
    "fekete_bracket",
    "fekete_upper_profile",
    "find_long_projections",
    "format_witnesses",
    "format_word",
    "free_reduce",
    "generating_set_correspondence",
    "ghat_automaton",
    "ghat_membership_exact",
    "lemma31_bound_check",
    "lp_distance",
    "lp_length",
    "minimal_section",
    "multiply",
    "oriented_vs_unoriented_gap",
    "parse_exponent",
    "parse_word",
    "perron_root",
    "poincare_probe",
    "primitive_root",
    "product_ball_counts",
    "product_ball_sequence",
    "project_axis_onto_axis",
    "project_to_axis",
    "projection_diameter",
    "quotient_ball_counts",
    "reduced_word_automaton",
    "regression_bracket",
    "same_line",
    "shorten",
    "shorten_threshold",
    "sphere_size",
    "strict_gap_check",
    "tightness_verdict",
    "verify_duality",
]
