from .words import Word, parse_word, render_word, invert_word, build_named_word, parse_named_word
from .signatures import Class2Signature, NormalForm, class2_signature, reduce_type1, normalize_type2_partial, reduce_signature
from .groups import FiniteGroup, CayleyGroup, PcClass2Group, load_cayley, build_pc_class2, direct_product, evaluate_word
from .structure import center, derived_subgroup, conjugacy_classes, power_map, sylow_decomposition, is_nilpotent
from .catalog import catalog, resolve_group
from .fibers import FiberDistribution, count_brute_force, count_abelian_power_product, count_central_quotient, convolve_disjoint, count_auto
from .word_maps import defined_word_map, is_homomorphism
from .characters import character_table, fourier_coefficients, classify_class_function, closed_form_wk_two_degree, frobenius_count_wk
from .verification import (
    VerificationReport,
    verify_bounds,
    verify_theorem_C,
    verify_corollary_D,
    check_rationality,
    check_chirality,
    check_product_multiplicativity,
    check_uniformity_surjective,
    verify_character_property,
)
from .sweep import run_sweep
from .runtime import cleanup_resources, signal_handler

__all__ = [
    "Word",
    "parse_word",
    "render_word",
    "invert_word",
    "build_named_word",
    "parse_named_word",
    "Class2Signature",
    "NormalForm",
    "class2_signature",
    "reduce_type1",
    "normalize_type2_partial",
    "reduce_signature",
    "FiniteGroup",
    "CayleyGroup",
    "PcClass2Group",
    "load_cayley",
    "build_pc_class2",
    "direct_product",
    "evaluate_word",
    "center",
    "derived_subgroup",
    "conjugacy_classes",
    "power_map",
    "sylow_decomposition",
    "is_nilpotent",
    "catalog",
    "resolve_group",
    "FiberDistribution",
    "count_brute_force",
    "count_abelian_power_product",
    "count_central_quotient",
    "convolve_disjoint",
    "count_auto",
    "defined_word_map",
    "is_homomorphism",
    "character_table",
    "fourier_coefficients",
    "classify_class_function",
    "closed_form_wk_two_degree",
    "frobenius_count_wk",
    "VerificationReport",
    "verify_bounds",
    "verify_theorem_C",
    "verify_corollary_D",
    "check_rationality",
    "check_chirality",
    "check_product_multiplicativity",
    "check_uniformity_surjective",
    "verify_character_property",
    "run_sweep",
    "cleanup_resources",
    "signal_handler",
]
