import json
import os
from fractions import Fraction
from itertools import product
from math import prod
from unittest.mock import patch

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from word_map_lab import (
    FiberDistribution,
    catalog,
    convolve_disjoint,
    count_abelian_power_product,
    count_auto,
    count_brute_force,
    count_central_quotient,
    parse_word,
)
from word_map_lab.catalog import CLASS2_SAMPLES
from word_map_lab.errors import BudgetExceededError, ConfigurationError, PreconditionError
from word_map_lab.fibers import count_fibers, pad_arity
from word_map_lab.groups import evaluate_word_many
from word_map_lab.signatures import class2_signature, signature_word
from word_map_lab.words import build_named_word
from conftest import WORD_CORPUS

ORACLE_GROUPS = [
    "cyclic(4)",
    "cyclic(6)",
    "q8",
    "d4",
    "heisenberg(3)",
    "extraspecial(3,1,-)",
    "modular16",
    "extraspecial(2,2,+)",
    "extraspecial(2,2,-)",
    "free_class2_exp_p(3,2)",
]

# --- Reference values ---

def test_q8_commutator_counts(q8):
    d = count_brute_force(q8, parse_word("[x1,x2]"))
    assert d.as_dict() == {0: 40, q8.generator(2): 24}
    assert d.total == 64
    assert d.method == "brute"
    assert d.evaluations == 64

def test_heisenberg_commutator_counts(heisenberg3):
    d = count_auto(heisenberg3, build_named_word("wk", 1))
    assert d.method == "central"
    assert d.as_dict() == {0: 297, 1: 216, 2: 216}

def test_w2_on_q8_three_ways(q8):
    w2 = build_named_word("wk", 2)
    auto = count_auto(q8, w2)
    brute = count_brute_force(q8, w2)
    assert auto.method == "convolve"
    assert auto.counts == brute.counts
    assert auto.as_dict() == {0: 2176, q8.generator(2): 1920}

def test_square_map_on_q8(q8):
    d = count_auto(q8, parse_word("x1^2"))
    assert d.as_dict() == {0: 2, q8.generator(2): 6}
    assert d.probability(0) == Fraction(1, 4)

def test_uniform_word_on_q8(q8):
    d = count_auto(q8, parse_word("x1 [x2,x3]"))
    assert set(d.counts) == {64}

def test_trivial_word_dispatch(q8):
    d = count_auto(q8, parse_word("x1 x1^-1 x2"))
    assert d.as_dict() == {g: 8 for g in range(8)}
    identity = count_auto(q8, parse_word("1", arity_hint=2))
    assert identity.method == "trivial"
    assert identity.as_dict() == {0: 64}

def test_point_distribution(q8):
    d = FiberDistribution.point(q8)
    assert d.arity == 0
    assert d.as_dict() == {0: 1}

# --- Independent algorithms agree ---

@pytest.mark.parametrize("name", ORACLE_GROUPS)
def test_central_quotient_matches_brute_force(name):
    G = catalog(name)
    for text in WORD_CORPUS:
        w = parse_word(text)
        assert count_central_quotient(G, w).counts == count_brute_force(G, w).counts, (name, text)

@pytest.mark.parametrize("name", CLASS2_SAMPLES)
def test_signature_evaluates_like_the_word_on_every_tuple(name):
    G = catalog(name)
    assert G.order <= 64
    for text in WORD_CORPUS:
        w = parse_word(text)
        grids = np.meshgrid(*[G.elements()] * w.arity, indexing="ij")
        columns = [grid.ravel() for grid in grids]
        direct = evaluate_word_many(G, w, columns)
        reduced = evaluate_word_many(G, signature_word(class2_signature(w)), columns)
        assert np.array_equal(direct, reduced), (name, text)

def test_convolution_matches_brute_force(s3):
    u = parse_word("x1^2 x2")
    v = parse_word("[x1,x2]")
    d = convolve_disjoint(count_brute_force(s3, u), count_brute_force(s3, v))
    assert d.arity == 4
    assert d.counts == count_brute_force(s3, parse_word("x1^2 x2 [x3,x4]")).counts

def test_d4_engines_share_fiber_multisets():
    polycyclic, table = catalog("d4"), catalog("dihedral(4)")
    for text in WORD_CORPUS:
        w = parse_word(text)
        assert sorted(count_auto(polycyclic, w).counts) == sorted(count_auto(table, w).counts), text

def test_workers_do_not_change_results(heisenberg3):
    w = parse_word("x1^2 [x1,x2] x3")
    single = count_brute_force(heisenberg3, w, workers=1, chunk=1000)
    parallel = count_brute_force(heisenberg3, w, workers=8, chunk=1000)
    assert single.counts == parallel.counts
    assert json.dumps(single.to_document()) == json.dumps(parallel.to_document())

# --- Abelian solver ---

def test_abelian_solver_reference_value():
    assert count_abelian_power_product([4], [2, 2], [0]) == 8
    assert count_abelian_power_product([4], [2, 2], [1]) == 0
    assert count_abelian_power_product([3, 3], [], [0, 0]) == 1
    assert count_abelian_power_product([3, 3], [], [0, 1]) == 0

def test_abelian_solver_rejects_bad_targets():
    with pytest.raises(PreconditionError):
        count_abelian_power_product([4], [1], [4])
    with pytest.raises(PreconditionError):
        count_abelian_power_product([4, 2], [1], [0])


def _exhaustive(invariants, a, target):
    total = 1
    for m, c in zip(invariants, target):
        solutions = sum(1 for z in product(range(m), repeat=len(a)) if sum(x * y for x, y in zip(a, z)) % m == c)
        total *= solutions
    return total


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_abelian_solver_matches_exhaustive_count(data):
    invariants = data.draw(st.lists(st.integers(2, 12), min_size=1, max_size=3).filter(lambda l: prod(l) <= 1000))
    a = data.draw(st.lists(st.integers(-20, 20), max_size=3))
    target = [data.draw(st.integers(0, m - 1)) for m in invariants]
    assert count_abelian_power_product(invariants, a, target) == _exhaustive(invariants, a, target)

# --- Budget, dispatch and export ---

def test_budget_is_enforced(q8):
    with pytest.raises(BudgetExceededError) as info:
        count_brute_force(q8, parse_word("[x1,x2]"), budget=63)
    assert info.value.required == 64

def test_budget_from_environment(q8):
    with patch.dict(os.environ, {"WORDLAB_BUDGET": "10"}):
        with pytest.raises(BudgetExceededError):
            count_brute_force(q8, parse_word("[x1,x2]"))
    with patch.dict(os.environ, {"WORDLAB_BUDGET": "-3"}):
        with pytest.raises(ConfigurationError):
            count_brute_force(q8, parse_word("[x1,x2]"))

def test_central_quotient_requires_class_2(s3):
    with pytest.raises(PreconditionError):
        count_central_quotient(s3, parse_word("[x1,x2]"))

def test_count_fibers_methods(q8):
    w = parse_word("[x1,x2][x3,x4]")
    assert count_fibers(q8, w, "convolve").counts == count_fibers(q8, w, "brute").counts
    with pytest.raises(PreconditionError):
        count_fibers(q8, parse_word("[x1,x2]"), "convolve")
    with pytest.raises(PreconditionError):
        count_fibers(q8, w, "guess")

def test_pad_arity(q8):
    d = pad_arity(count_auto(q8, parse_word("x1^2")), 2)
    assert d.arity == 3
    assert d.total == 8 ** 3

def test_convolve_rejects_mixed_groups(q8, s3):
    with pytest.raises(PreconditionError):
        convolve_disjoint(count_auto(q8, parse_word("x1")), count_auto(s3, parse_word("x1")))

def test_export_document(q8):
    document = count_brute_force(q8, parse_word("[x1,x2]")).to_document()
    assert document == {"group": "q8", "word": "x1^-1 x2^-1 x1 x2", "arity": 2, "counts": {"1": "40", "c": "24"}}

def test_distribution_array_is_exact(q8):
    d = count_auto(q8, build_named_word("wk", 3))
    assert isinstance(d.array()[0], int)
    assert int(np.sum(d.array())) == 8 ** 6
