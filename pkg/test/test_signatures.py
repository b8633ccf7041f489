from itertools import combinations
from math import gcd

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from word_map_lab import PcClass2Group, catalog, count_auto
from word_map_lab.errors import PreconditionError
from word_map_lab.signatures import (
    Class2Signature,
    class2_signature,
    commutator_signature,
    normalize_type2_partial,
    reduce_signature,
    reduce_type1,
    signature_text,
    signature_word,
    substitute,
)
from word_map_lab.words import concat_words, invert_word, parse_word

letters = st.lists(st.tuples(st.integers(1, 4), st.integers(-3, 3).filter(bool)), max_size=12)


def _word(raw):
    return parse_word(" ".join(f"x{i}^{e}" for i, e in raw), arity_hint=4)


def _invariant_factors(matrix):
    """Nonzero invariant factors from determinantal divisors (gcd of i x i minors)."""
    m = Matrix(matrix)
    k = m.shape[0]
    factors = []
    previous = 1
    for size in range(1, k + 1):
        d = 0
        for rows in combinations(range(k), size):
            for cols in combinations(range(k), size):
                d = gcd(d, int(m.extract(list(rows), list(cols)).det()))
        if d == 0:
            break
        factors.append(d // previous)
        previous = d
    return factors

# --- Collection ---

def test_commutator_signature():
    sig = class2_signature(parse_word("[x1,x2]"))
    assert sig.a == (0, 0)
    assert sig.entries() == {(1, 2): 1}
    assert signature_text(class2_signature(parse_word("[x2,x1]"))) == "[x1,x2]^-1"

def test_square_of_product():
    """(x1 x2)^2 = x1^2 x2^2 [x1,x2]^-1 in class 2."""
    sig = class2_signature(parse_word("(x1 x2)^2"))
    assert sig == Class2Signature.from_entries(2, (2, 2), {(1, 2): -1})

def test_power_matches_collection():
    base = class2_signature(parse_word("x1 x2^2 [x1,x3]"))
    assert base.power(3) == class2_signature(parse_word("(x1 x2^2 [x1,x3])^3"))
    assert base.inverse() == class2_signature(invert_word(parse_word("x1 x2^2 [x1,x3]")))

@settings(max_examples=100)
@given(letters, letters)
def test_signature_is_multiplicative(u, v):
    w1, w2 = _word(u), _word(v)
    assert class2_signature(concat_words(w1, w2)) == class2_signature(w1).concat(class2_signature(w2))

@settings(max_examples=100)
@given(letters)
def test_signature_word_has_same_signature(raw):
    sig = class2_signature(_word(raw))
    assert class2_signature(signature_word(sig)) == sig

def test_commutator_of_signatures_is_bilinear():
    x1 = Class2Signature.from_entries(2, (1, 0))
    x2 = Class2Signature.from_entries(2, (0, 1))
    assert commutator_signature(x1.power(2), x2.power(3)) == Class2Signature.from_entries(2, b={(1, 2): 6})

def test_signature_word_evaluates_like_the_word(heisenberg3):
    w = parse_word("x1 x2 x1^2 x2^-1")
    assert count_auto(heisenberg3, w).counts == count_auto(heisenberg3, signature_word(class2_signature(w))).counts

# --- Type (1) reduction ---

def test_type1_reduction_example():
    form = reduce_type1(class2_signature(parse_word("[x1,x2]^6 [x3,x4]^4")), 2)
    assert form.kind == "type1"
    assert form.divisors == (2, 12)
    assert form.exponents == (1, 2)
    assert form.canonical_text() == "[x1,x2]^2 [x3,x4]^4"

def test_type1_prime_to_p_parts_drop():
    form = reduce_type1(class2_signature(parse_word("[x1,x2]^6 [x3,x4]^4")), 3)
    assert form.exponents == (0, 1)
    assert form.canonical_text() == "[x1,x2] [x3,x4]^3"

def test_type1_matches_smith_normal_form():
    sig = class2_signature(parse_word("[x1,x2]^6 [x3,x4]^4"))
    diagonal = smith_normal_form(Matrix(sig.alternating()), domain=ZZ)
    values = sorted(abs(int(diagonal[i, i])) for i in range(4) if diagonal[i, i] != 0)
    form = reduce_type1(sig, 2)
    assert values == sorted(e for d in form.divisors for e in (d, d))

@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.lists(st.integers(-12, 12), min_size=6, max_size=6))
def test_type1_divisors_are_paired_invariant_factors(k, values):
    entries = {}
    pairs = [(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    for (i, j), value in zip(pairs, values):
        entries[(i, j)] = value
    sig = Class2Signature.from_entries(k, b=entries)
    assume(not sig.is_identity)
    form = reduce_type1(sig, 2)
    assert sorted(e for d in form.divisors for e in (d, d)) == sorted(_invariant_factors(sig.alternating()))
    assert all(b % a == 0 for a, b in zip(form.divisors, form.divisors[1:]))
    # the witness substitution reproduces the block form exactly
    assert substitute(sig, form.images) == form.transformed

def test_type1_preconditions():
    with pytest.raises(PreconditionError):
        reduce_type1(class2_signature(parse_word("x1 [x1,x2]")), 2)
    with pytest.raises(PreconditionError):
        reduce_type1(Class2Signature.identity(2), 2)
    with pytest.raises(PreconditionError):
        reduce_type1(class2_signature(parse_word("[x1,x2]")), 4)

@pytest.mark.parametrize("name", ["q8", "d4", "modular16"])
def test_type1_reduction_preserves_distributions_on_2_groups(name):
    G = catalog(name)
    w = parse_word("[x1,x2]^6 [x3,x4]^4")
    form = reduce_signature(class2_signature(w), 2)
    assert count_auto(G, w).counts == count_auto(G, form.canonical_word()).counts

@pytest.mark.parametrize("text", ["[x1,x2]^3", "[x1,x2]^2 [x1,x3]^2 [x2,x3]^6", "[x1,x2]^-5"])
def test_type1_reduction_on_a_group_with_larger_derived_exponent(text):
    # unitriangular group over Z/4: G' is cyclic of order 4
    G = PcClass2Group("heisenberg_z4", [4, 4, 4], {}, {(0, 1): [0, 0, 1]}, generator_names=["x", "y", "z"])
    w = parse_word(text)
    form = reduce_type1(class2_signature(w), 2)
    assert count_auto(G, w).counts == count_auto(G, form.canonical_word()).counts

# --- Type (2) partial normalization ---

def test_type2_gcd_pivot():
    form = normalize_type2_partial(class2_signature(parse_word("x1^4 x2^6")), 2)
    assert form.kind == "type2_partial"
    assert form.transformed.a == (2, 0)
    assert form.divisors == (2,)
    assert form.exponents == (1,)
    assert all(0 <= value < 2 for value in form.transformed.entries().values())
    assert substitute(form.source, form.images) == form.transformed

def test_type2_central_shift_reduces_commutator_exponent():
    form = normalize_type2_partial(class2_signature(parse_word("x1^2 [x1,x2]^3")), 2)
    assert form.canonical_text() == "x1^2 [x1,x2]"

def test_type2_requires_nonzero_exponents():
    with pytest.raises(PreconditionError):
        normalize_type2_partial(class2_signature(parse_word("[x1,x2]")), 3)

@pytest.mark.parametrize("text", ["x1^4 x2^6", "x1^2 [x1,x2]^3", "x1^3 x2^3 [x1,x2]^2", "x2^-2 x3^4 [x1,x3]"])
@pytest.mark.parametrize("name", ["q8", "heisenberg(3)"])
def test_type2_normal_form_preserves_distributions(name, text):
    """Unimodular substitutions permute G^k on every class-2 group."""
    G = catalog(name)
    w = parse_word(text)
    form = reduce_signature(class2_signature(w), 2)
    assert count_auto(G, w).counts == count_auto(G, form.canonical_word()).counts
