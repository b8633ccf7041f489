from fractions import Fraction

import numpy as np
import pytest

from word_map_lab import catalog, count_auto, parse_word
from word_map_lab.catalog import CLASS2_SAMPLES
from word_map_lab.characters import (
    ClassFunctionKind,
    character_table,
    classify_class_function,
    closed_form_wk_two_degree,
    exact_character_values,
    fourier_coefficients,
    frobenius_count_wk,
    is_central_type,
    is_rational_distribution,
)
from word_map_lab.errors import CharacterTableError, FourierResidualError, PreconditionError
from word_map_lab.fibers import FiberDistribution
from word_map_lab.structure import prime_base
from word_map_lab.words import build_named_word
from conftest import WORD_CORPUS

ODD_P_GROUPS = ["heisenberg(3)", "extraspecial(3,1,-)", "extraspecial(5,1,+)"]

# --- Character tables ---

@pytest.mark.parametrize("name, degrees", [
    ("q8", (1, 1, 1, 1, 2)),
    ("d4", (1, 1, 1, 1, 2)),
    ("symmetric(3)", (1, 1, 2)),
    ("heisenberg(3)", (1,) * 9 + (3, 3)),
    ("cyclic(5)", (1,) * 5),
])
def test_character_degrees(name, degrees):
    table = character_table(catalog(name))
    assert table.degrees == degrees
    assert table.residual < 1e-9
    assert np.allclose(table.values[0], 1.0)

def test_table_is_cached_per_group(q8):
    assert character_table(q8) is character_table(q8)

def test_s3_values(s3):
    table = character_table(s3)
    assert sorted(table.classes.sizes) == [1, 2, 3]
    sign = table.element_values(1)
    assert np.allclose(sign.real, [1, 1, 1, -1, -1, -1])
    standard = table.element_values(2)
    assert np.allclose(standard.real, [2, -1, -1, 0, 0, 0])

def test_table_document(q8):
    document = character_table(q8).to_document()
    assert document["group"] == "q8"
    assert document["classes"][0] == "1"
    assert document["degrees"] == [1, 1, 1, 1, 2]
    assert document["values"][0] == [[1.0, 0.0]] * 5

def test_table_size_limits():
    with pytest.raises(CharacterTableError):
        character_table(catalog("cyclic(2001)"))

# --- Fourier coefficients ---

def test_square_map_on_q8_is_a_generalized_character(q8):
    decomposition = fourier_coefficients(count_auto(q8, parse_word("x1^2")), character_table(q8))
    assert decomposition.coefficients == tuple(Fraction(c) for c in (1, 1, 1, 1, -1))
    assert classify_class_function(decomposition) is ClassFunctionKind.GENERALIZED_CHARACTER

def test_square_map_on_d4_is_a_character():
    G = catalog("d4")
    decomposition = fourier_coefficients(count_auto(G, parse_word("x1^2")), character_table(G))
    assert decomposition.coefficients == tuple(Fraction(1) for _ in range(5))
    assert classify_class_function(decomposition) is ClassFunctionKind.CHARACTER

def test_commutator_coefficients_are_frobenius_weights(heisenberg3):
    table = character_table(heisenberg3)
    decomposition = fourier_coefficients(count_auto(heisenberg3, parse_word("[x1,x2]")), table)
    assert decomposition.coefficients == tuple(Fraction(27, d) for d in table.degrees)

def test_non_integral_class_function_is_neither():
    G = catalog("cyclic(3)")
    d = FiberDistribution.from_counts(G, [1, 0, 0], arity=1)
    decomposition = fourier_coefficients(d, character_table(G))
    assert decomposition.coefficients == (Fraction(1, 3),) * 3
    assert classify_class_function(decomposition) is ClassFunctionKind.NEITHER

def test_coefficients_need_matching_group(q8):
    with pytest.raises(PreconditionError):
        fourier_coefficients(count_auto(q8, parse_word("x1")), character_table(catalog("d4")))

def test_irrational_class_function_is_rejected():
    G = catalog("cyclic(3)")
    with pytest.raises(FourierResidualError):
        fourier_coefficients(FiberDistribution.from_counts(G, [0, 1, 0], arity=1), character_table(G))

def test_exact_values_count_eigenvalues(q8):
    values = exact_character_values(character_table(q8))
    # degree-2 character on the classes of 1, c and a (exponent 4)
    assert values[4][0] == ((0, 2),)
    assert values[4][1] == ((2, 2),)
    assert values[4][3] == ((1, 1), (3, 1))
    assert values[0][3] == ((0, 1),)

@pytest.mark.parametrize("name", ODD_P_GROUPS)
def test_high_arity_coefficients_stay_exact(name):
    G = catalog(name)
    table = character_table(G)
    decomposition = fourier_coefficients(count_auto(G, build_named_word("wk", 6)), table)
    assert decomposition.coefficients == tuple(Fraction(G.order // degree) ** 11 for degree in table.degrees)
    assert classify_class_function(decomposition) is ClassFunctionKind.CHARACTER

@pytest.mark.parametrize("name", list(CLASS2_SAMPLES) + ["extraspecial(5,1,+)"])
def test_corpus_coefficients_on_class_2_groups(name):
    G = catalog(name)
    table = character_table(G)
    odd_p = prime_base(G) not in (None, 2)
    for text in WORD_CORPUS:
        d = count_auto(G, parse_word(text))
        assert is_rational_distribution(d), (name, text)
        coefficients = fourier_coefficients(d, table).coefficients
        assert all(c.denominator == 1 for c in coefficients), (name, text)
        if odd_p:
            assert min(coefficients) >= 0, (name, text)

# --- Rationality ---

def test_word_distributions_are_rational(heisenberg3):
    assert is_rational_distribution(count_auto(heisenberg3, parse_word("x1^2 [x1,x2]")))

def test_synthetic_distribution_can_be_irrational():
    G = catalog("cyclic(3)")
    assert not is_rational_distribution(FiberDistribution.from_counts(G, [0, 1, 0], arity=1))

# --- Commutator words ---

def test_closed_form():
    assert closed_form_wk_two_degree(8, 2, 2, 1) == (40, 24)
    assert closed_form_wk_two_degree(27, 3, 3, 1) == (297, 216)
    with pytest.raises(PreconditionError):
        closed_form_wk_two_degree(8, 3, 2, 1)

@pytest.mark.parametrize("name, k", [("q8", 1), ("q8", 2), ("heisenberg(3)", 1), ("symmetric(3)", 2)])
def test_frobenius_sum_matches_counting(name, k):
    G = catalog(name)
    d = frobenius_count_wk(character_table(G), k)
    assert d.method == "frobenius"
    assert d.counts == count_auto(G, build_named_word("wk", k)).counts

def test_central_type():
    assert is_central_type(character_table(catalog("q8")))
    assert is_central_type(character_table(catalog("heisenberg(3)")))
    assert not is_central_type(character_table(catalog("symmetric(3)")))
    assert not is_central_type(character_table(catalog("cyclic(4)")))
