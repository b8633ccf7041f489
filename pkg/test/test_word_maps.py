import numpy as np
import pytest

from word_map_lab import catalog, count_auto, defined_word_map, is_homomorphism, parse_word
from word_map_lab.errors import BudgetExceededError, WordError
from word_map_lab.word_maps import word_map_is_homomorphism

# --- Defined word maps ---

def test_defined_word_map_evaluates_with_fixed_positions(q8):
    a, b, c = (q8.generator(i) for i in range(3))
    f = defined_word_map(parse_word("[x1,x2]"), {2: a}, q8)
    assert f.free == (1,)
    assert f.fixed == ((2, a),)
    assert f.evaluate([b]) == c
    assert f.evaluate([a]) == 0

def test_defined_word_map_rejects_bad_positions(q8):
    with pytest.raises(WordError):
        defined_word_map(parse_word("[x1,x2]"), {3: 0}, q8)
    f = defined_word_map(parse_word("[x1,x2]"), {1: 0}, q8)
    with pytest.raises(WordError):
        f.evaluate_many([np.arange(8), np.arange(8)])

# --- Homomorphism test ---

def test_power_words_on_abelian_groups_are_homomorphisms():
    G = catalog("cyclic(6)")
    report = is_homomorphism(defined_word_map(parse_word("x1^2 x2"), {}, G))
    assert report.is_homomorphism
    assert report.image_in_center
    assert report.image == tuple(range(6))
    assert word_map_is_homomorphism(G, parse_word("x1^3"))

def test_fibers_of_a_homomorphism_are_cosets_of_the_kernel():
    G = catalog("cyclic(6)")
    w = parse_word("x1^2 x2^2")
    d = count_auto(G, w)
    image = is_homomorphism(defined_word_map(w, {}, G)).image
    assert set(d.support()) == set(image)
    assert set(d.as_dict().values()) == {G.order ** 2 // len(image)}

def test_squaring_on_q8_is_not_a_homomorphism(q8):
    report = is_homomorphism(defined_word_map(parse_word("x1^2"), {}, q8))
    assert not report.is_homomorphism
    assert report.image_in_center
    u, v = report.counterexample
    square = lambda g: q8.multiply(g, g)
    assert square(q8.multiply(u[0], v[0])) != q8.multiply(square(u[0]), square(v[0]))

def test_commutator_with_fixed_element_is_central_homomorphism_in_class_2(q8):
    report = is_homomorphism(defined_word_map(parse_word("[x1,x2]"), {2: q8.generator(0)}, q8))
    assert report.is_homomorphism
    assert report.image_in_center
    assert report.image == (0, q8.generator(2))

def test_commutator_with_fixed_element_fails_in_s3(s3):
    # x -> [x, s] sends r to r but rs to r^2
    report = is_homomorphism(defined_word_map(parse_word("[x1,x2]"), {2: 3}, s3))
    assert not report.is_homomorphism
    assert not report.image_in_center
    assert report.counterexample is not None

def test_homomorphism_test_respects_budget(q8):
    with pytest.raises(BudgetExceededError):
        is_homomorphism(defined_word_map(parse_word("x1 x2"), {}, q8), budget=100)
