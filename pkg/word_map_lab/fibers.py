"""
Exact fiber distributions N_w(g) = #{(g_1..g_k) : w(g_1..g_k) = g}.

Three independent counting strategies share one result type:

- brute force over G^k, partitioned into contiguous lexicographic chunks;
- the central-quotient method for class <= 2 (enumerate (G/Z)^k, solve the central part);
- convolution of words on disjoint variable blocks.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import WORDLAB_CHUNK, current_budget, default_workers
from .errors import BudgetExceededError, PreconditionError
from .groups import HANDLE_DTYPE, FiniteGroup, evaluate_word_many
from .runtime import tracked_executor
from .structure import abelian_invariants, center, coset_representatives, is_class_at_most_2
from .words import Word, concat_words, disjoint_blocks, render_word, shift_word

logger = logging.getLogger(__name__)

METHODS = ("auto", "brute", "central", "convolve")


@dataclass(frozen=True, eq=False)
class FiberDistribution:
    group: FiniteGroup = field(repr=False)
    word: Optional[Word]
    arity: int
    counts: Tuple[int, ...] = field(repr=False)
    method: str = "brute"
    evaluations: int = 0

    @classmethod
    def from_counts(cls, group: FiniteGroup, counts, arity: int, word: Optional[Word] = None,
                    method: str = "synthetic", evaluations: int = 0) -> "FiberDistribution":
        values = tuple(int(c) for c in counts)
        if len(values) != group.order:
            raise PreconditionError(f"{len(values)} counts for a group of order {group.order}")
        return cls(group, word, arity, values, method, evaluations)

    @classmethod
    def point(cls, group: FiniteGroup) -> "FiberDistribution":
        """The arity-0 distribution of the empty word: N(1) = 1."""
        counts = [0] * group.order
        counts[0] = 1
        return cls(group, Word.identity(0), 0, tuple(counts), "trivial", 0)

    def count(self, g: int) -> int:
        return self.counts[self.group.check_handle(g)]

    def __getitem__(self, g: int) -> int:
        return self.count(g)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def support(self) -> List[int]:
        """G_w, in handle order."""
        return [g for g, c in enumerate(self.counts) if c]

    def probability(self, g: int) -> Fraction:
        return Fraction(self.count(g), self.group.order ** self.arity)

    def as_dict(self) -> Dict[int, int]:
        return {g: c for g, c in enumerate(self.counts) if c}

    def array(self) -> np.ndarray:
        return np.array(self.counts, dtype=object)

    def same_counts(self, other: "FiberDistribution") -> bool:
        return self.group is other.group and self.arity == other.arity and self.counts == other.counts

    def word_text(self) -> str:
        return render_word(self.word) if self.word is not None else ""

    def to_document(self) -> dict:
        """Export form; counts are decimal strings keyed by element label, support only."""
        return {
            "group": self.group.name,
            "word": self.word_text(),
            "arity": self.arity,
            "counts": {self.group.label(g): str(c) for g, c in enumerate(self.counts) if c},
        }


def _check_budget(required: int, budget: Optional[int], what: str) -> int:
    budget = current_budget() if budget is None else int(budget)
    if required > budget:
        raise BudgetExceededError(required, budget, what)
    return budget


def _enumerate(G: FiniteGroup, w: Word, domain: np.ndarray, workers: int, chunk: int) -> np.ndarray:
    """Histogram of w over domain^k in lexicographic order, merged chunk by chunk."""
    k = w.arity
    size = domain.size
    total = size ** k
    radix = [size ** (k - 1 - i) for i in range(k)]

    def run(bounds: Tuple[int, int]) -> np.ndarray:
        start, stop = bounds
        index = np.arange(start, stop, dtype=HANDLE_DTYPE)
        columns = [domain[(index // r) % size] for r in radix]
        values = evaluate_word_many(G, w, columns)
        return np.bincount(values, minlength=G.order)

    partitions = [(start, min(start + chunk, total)) for start in range(0, total, chunk)]
    counts = np.zeros(G.order, dtype=object)
    if workers <= 1 or len(partitions) == 1:
        for bounds in partitions:
            counts += run(bounds).astype(object)
        return counts
    with tracked_executor(workers) as executor:
        for partial in executor.map(run, partitions):
            counts += partial.astype(object)
    logger.debug(f"Enumerated {total} tuples in {len(partitions)} partitions on {workers} workers")
    return counts


def count_brute_force(G: FiniteGroup, w: Word, *, budget: Optional[int] = None,
                      workers: Optional[int] = None, chunk: Optional[int] = None) -> FiberDistribution:
    """Counts every fiber by enumerating all of G^k."""
    required = G.order ** w.arity
    _check_budget(required, budget, f"brute force for {render_word(w)} on {G.name}")
    if w.arity == 0:
        return FiberDistribution(G, w, 0, FiberDistribution.point(G).counts, "brute", 1)
    counts = _enumerate(G, w, G.elements(), workers or default_workers(), chunk or WORDLAB_CHUNK)
    logger.info(f"brute force {render_word(w)} on {G.name}: {required} evaluations")
    return FiberDistribution.from_counts(G, counts, w.arity, w, "brute", required)


def count_abelian_power_product(invariants: Sequence[int], a: Sequence[int], target: Sequence[int]) -> int:
    """
    Number of (z_1..z_k) in Z_m1 x ... x Z_mt with sum_i a_i z_i = target, counted per cyclic factor:
    m^(k-1) * gcd(a_1..a_k, m) solutions when that gcd divides the target coordinate, else none.
    """
    if len(target) != len(invariants):
        raise PreconditionError(f"target has {len(target)} coordinates, the group has {len(invariants)} factors")
    for m, c in zip(invariants, target):
        if m < 1 or not 0 <= c < m:
            raise PreconditionError(f"target coordinate {c} outside Z_{m}")
    k = len(a)
    if k == 0:
        return int(not any(target))
    result = 1
    for m, c in zip(invariants, target):
        g = reduce(gcd, a, m)
        if c % g:
            return 0
        result *= m ** (k - 1) * g
    return result


def count_central_quotient(G: FiniteGroup, w: Word, *, budget: Optional[int] = None) -> FiberDistribution:
    """
    Class <= 2 acceleration: w(t_1 z_1, ..., t_k z_k) = w(t) * prod z_i^a_i for central z_i, so
    enumerating coset representatives t of G/Z and solving the central equation is exact.
    """
    if not is_class_at_most_2(G):
        raise PreconditionError(f"{G.name} has nilpotency class > 2; the central-quotient method does not apply")
    k = w.arity
    if k == 0:
        return FiberDistribution(G, w, 0, FiberDistribution.point(G).counts, "central", 1)
    Z = center(G)
    representatives, _ = coset_representatives(G, Z)
    required = representatives.size ** k
    _check_budget(required, budget, f"central quotient for {render_word(w)} on {G.name}")

    outer = _enumerate(G, w, representatives, 1, WORDLAB_CHUNK)
    invariants = abelian_invariants(G, Z)
    a = w.exponent_sums()
    z = Z.array()
    solutions = np.array(
        [count_abelian_power_product(invariants.orders, a, invariants.coordinates_of(c)) for c in z],
        dtype=object,
    )
    counts = np.zeros(G.order, dtype=object)
    for h in np.nonzero(outer)[0]:
        targets = G.multiply_many(np.full(z.size, h, dtype=HANDLE_DTYPE), z)
        counts[targets] += outer[h] * solutions
    logger.info(f"central quotient {render_word(w)} on {G.name}: {required} evaluations over |G/Z| = {representatives.size}")
    return FiberDistribution.from_counts(G, counts, k, w, "central", required)


def convolve_disjoint(d1: FiberDistribution, d2: FiberDistribution) -> FiberDistribution:
    """N_uv(g) = sum_h N_u(h) N_v(h^-1 g) for u, v on disjoint variables."""
    if d1.group is not d2.group:
        raise PreconditionError(f"cannot convolve distributions over {d1.group.name} and {d2.group.name}")
    G = d1.group
    right = d2.array()
    counts = np.zeros(G.order, dtype=object)
    elements = G.elements()
    for h, c in d1.as_dict().items():
        targets = G.multiply_many(np.full(G.order, h, dtype=HANDLE_DTYPE), elements)
        counts[targets] += c * right
    word = None
    if d1.word is not None and d2.word is not None:
        word = concat_words(d1.word.with_arity(d1.arity), shift_word(d2.word.with_arity(d2.arity), d1.arity))
        word = word.with_arity(d1.arity + d2.arity)
    return FiberDistribution.from_counts(G, counts, d1.arity + d2.arity, word, "convolve",
                                         d1.evaluations + d2.evaluations)


def pad_arity(d: FiberDistribution, extra: int, word: Optional[Word] = None) -> FiberDistribution:
    """Each unused variable multiplies every count by |G|."""
    factor = d.group.order ** extra
    return FiberDistribution(d.group, word if word is not None else d.word, d.arity + extra,
                             tuple(c * factor for c in d.counts), d.method, d.evaluations)


def count_auto(G: FiniteGroup, w: Word, *, budget: Optional[int] = None,
               workers: Optional[int] = None) -> FiberDistribution:
    """
    Dispatch: words splitting into disjoint variable blocks are convolved, class <= 2 groups use the
    central quotient, everything else is enumerated. Unused variables are padded afterwards.
    """
    blocks, unused = disjoint_blocks(w)
    if not blocks:
        counts = [0] * G.order
        counts[0] = G.order ** w.arity
        return FiberDistribution(G, w, w.arity, tuple(counts), "trivial", 0)
    if len(blocks) >= 2:
        logger.info(f"count_auto {render_word(w)} on {G.name}: convolving {len(blocks)} disjoint blocks")
        parts = [count_auto(G, block, budget=budget, workers=workers) for block, _ in blocks]
        result = reduce(convolve_disjoint, parts)
        result = FiberDistribution(G, result.word, result.arity, result.counts, "convolve", result.evaluations)
    else:
        core = blocks[0][0]
        if is_class_at_most_2(G):
            logger.info(f"count_auto {render_word(w)} on {G.name}: central quotient")
            result = count_central_quotient(G, core, budget=budget)
        else:
            logger.info(f"count_auto {render_word(w)} on {G.name}: brute force")
            result = count_brute_force(G, core, budget=budget, workers=workers)
    return pad_arity(result, unused, w)


def count_fibers(G: FiniteGroup, w: Word, method: str = "auto", *, budget: Optional[int] = None,
                 workers: Optional[int] = None) -> FiberDistribution:
    """Runs the named strategy; "convolve" requires a word with at least two disjoint blocks."""
    if method == "auto":
        return count_auto(G, w, budget=budget, workers=workers)
    if method == "brute":
        return count_brute_force(G, w, budget=budget, workers=workers)
    if method == "central":
        return count_central_quotient(G, w, budget=budget)
    if method == "convolve":
        blocks, unused = disjoint_blocks(w)
        if len(blocks) < 2:
            raise PreconditionError(f"{render_word(w)} does not split into disjoint variable blocks")
        parts = [count_brute_force(G, block, budget=budget, workers=workers) for block, _ in blocks]
        return pad_arity(reduce(convolve_disjoint, parts), unused, w)
    raise PreconditionError(f"unknown counting method {method!r}; expected one of {', '.join(METHODS)}")
