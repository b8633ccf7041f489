"""Word maps with some arguments frozen at fixed group elements."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import current_budget
from .errors import BudgetExceededError, WordError
from .groups import HANDLE_DTYPE, FiniteGroup, evaluate_word_many
from .structure import center
from .words import Word, render_word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DefinedWordMap:
    word: Word
    group: FiniteGroup = field(repr=False)
    fixed: Tuple[Tuple[int, int], ...]
    free: Tuple[int, ...]

    def _columns(self, free_columns: Sequence[np.ndarray]) -> List[np.ndarray]:
        size = len(free_columns[0]) if free_columns else 1
        columns: List[Optional[np.ndarray]] = [None] * self.word.arity
        for position, value in self.fixed:
            columns[position - 1] = np.full(size, value, dtype=HANDLE_DTYPE)
        for position, column in zip(self.free, free_columns):
            columns[position - 1] = np.asarray(column, dtype=HANDLE_DTYPE)
        return columns

    def evaluate_many(self, free_columns: Sequence[np.ndarray]) -> np.ndarray:
        if len(free_columns) != len(self.free):
            raise WordError(f"defined word map has {len(self.free)} free positions, got {len(free_columns)} columns")
        return evaluate_word_many(self.group, self.word, self._columns(free_columns))

    def evaluate(self, free_values: Sequence[int]) -> int:
        values = [self.group.check_handle(g) for g in free_values]
        return int(self.evaluate_many([np.array([v], dtype=HANDLE_DTYPE) for v in values])[0])


@dataclass(frozen=True)
class HomomorphismReport:
    is_homomorphism: bool
    image: Tuple[int, ...]
    image_in_center: bool
    counterexample: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None


def defined_word_map(w: Word, fixed: Mapping[int, int], G: FiniteGroup) -> DefinedWordMap:
    """Freezes positions (1-based) of w at the given group elements."""
    pinned: Dict[int, int] = {}
    for position, value in fixed.items():
        if not 1 <= int(position) <= w.arity:
            raise WordError(f"position {position} outside 1..{w.arity}")
        pinned[int(position)] = G.check_handle(value)
    free = tuple(i for i in range(1, w.arity + 1) if i not in pinned)
    return DefinedWordMap(w, G, tuple(sorted(pinned.items())), free)


def _free_tuples(G: FiniteGroup, count: int) -> List[np.ndarray]:
    total = G.order ** count
    index = np.arange(total, dtype=HANDLE_DTYPE)
    return [(index // G.order ** (count - 1 - i)) % G.order for i in range(count)]


def is_homomorphism(dwm: DefinedWordMap, *, budget: Optional[int] = None) -> HomomorphismReport:
    """
    Tests f(uv) = f(u) f(v) over all pairs of free tuples, and whether the image lies in Z(G).
    """
    G = dwm.group
    f = len(dwm.free)
    size = G.order ** f
    required = size * size
    budget = current_budget() if budget is None else budget
    if required > budget:
        raise BudgetExceededError(required, budget, f"homomorphism test of {render_word(dwm.word)} on {G.name}")

    columns = _free_tuples(G, f)
    values = dwm.evaluate_many(columns) if f else dwm.evaluate_many([])
    image = tuple(int(x) for x in np.unique(values))
    in_center = set(image) <= set(center(G).elements)

    counterexample = None
    weights = np.array([G.order ** (f - 1 - i) for i in range(f)], dtype=HANDLE_DTYPE)
    everything = np.arange(size, dtype=HANDLE_DTYPE)
    for u in range(size):
        # index of the componentwise product u*v for every v
        product = np.zeros(size, dtype=HANDLE_DTYPE)
        for i in range(f):
            product += G.multiply_many(np.full(size, columns[i][u], dtype=HANDLE_DTYPE), columns[i]) * weights[i]
        expected = G.multiply_many(np.full(size, values[u], dtype=HANDLE_DTYPE), values[everything])
        bad = np.nonzero(values[product] != expected)[0]
        if bad.size:
            v = int(bad[0])
            counterexample = (tuple(int(c[u]) for c in columns), tuple(int(c[v]) for c in columns))
            break
    result = HomomorphismReport(counterexample is None, image, in_center, counterexample)
    logger.info(f"defined word map {render_word(dwm.word)} on {G.name} (fixed {dict(dwm.fixed)}): "
                f"homomorphism={result.is_homomorphism}, image in center={in_center}")
    return result


def word_map_is_homomorphism(G: FiniteGroup, w: Word, *, budget: Optional[int] = None) -> bool:
    return is_homomorphism(defined_word_map(w, {}, G), budget=budget).is_homomorphism
