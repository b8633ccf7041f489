"""Structural subgroups, conjugacy data, power maps and Sylow / abelian decompositions."""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint

from .errors import OracleDisagreementError, PreconditionError
from .groups import HANDLE_DTYPE, DirectProductGroup, FiniteGroup, PcClass2Group

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup = field(repr=False)
    elements: Tuple[int, ...]

    @classmethod
    def from_mask(cls, group: FiniteGroup, mask: np.ndarray) -> "Subgroup":
        return cls(group, tuple(int(g) for g in np.nonzero(mask)[0]))

    @property
    def order(self) -> int:
        return len(self.elements)

    def mask(self) -> np.ndarray:
        result = np.zeros(self.group.order, dtype=bool)
        result[list(self.elements)] = True
        return result

    def array(self) -> np.ndarray:
        return np.array(self.elements, dtype=HANDLE_DTYPE)

    def __contains__(self, g) -> bool:
        return int(g) in set(self.elements)

    def issubset(self, other: "Subgroup") -> bool:
        return set(self.elements) <= set(other.elements)


@dataclass(frozen=True, eq=False)
class ConjugacyClasses:
    group: FiniteGroup = field(repr=False)
    representatives: Tuple[int, ...]
    sizes: Tuple[int, ...]
    class_of: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.representatives)

    def members(self, index: int) -> List[int]:
        return [int(g) for g in np.nonzero(self.class_of == index)[0]]


def closure(G: FiniteGroup, generators: Sequence[int], limit: Optional[int] = None) -> np.ndarray:
    """Boolean mask of the subgroup generated by `generators`; stops early once it exceeds `limit`."""
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    gens = np.unique(np.asarray(list(generators), dtype=HANDLE_DTYPE))
    if gens.size == 0:
        return mask
    frontier = np.array([0], dtype=HANDLE_DTYPE)
    while frontier.size:
        products = G.multiply_many(np.repeat(frontier, gens.size), np.tile(gens, frontier.size))
        products = np.unique(products)
        fresh = products[~mask[products]]
        mask[fresh] = True
        frontier = fresh
        if limit is not None and mask.sum() > limit:
            break
    return mask


def subgroup_generated(G: FiniteGroup, generators: Sequence[int]) -> Subgroup:
    return Subgroup.from_mask(G, closure(G, [G.check_handle(g) for g in generators]))


def generators(G: FiniteGroup) -> Tuple[int, ...]:
    """A small generating set; the polycyclic generators for presented groups."""
    return G.cached("generators", lambda: _generators(G))


def _generators(G: FiniteGroup) -> Tuple[int, ...]:
    if isinstance(G, PcClass2Group):
        return tuple(int(w) for w in G.weights)
    if isinstance(G, DirectProductGroup):
        left = [int(G.pair(h, 0)) for h in generators(G.left)]
        right = [int(G.pair(0, k)) for k in generators(G.right)]
        return tuple(left + right)
    chosen: List[int] = []
    mask = closure(G, chosen)
    while not mask.all():
        # the element of largest order outside the current span keeps the set short
        outside = np.nonzero(~mask)[0]
        orders = G.element_orders()[outside]
        candidate = int(outside[np.argmax(orders)])
        chosen.append(candidate)
        mask = closure(G, chosen)
    return tuple(chosen)


def commutators_many(G: FiniteGroup, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    inverse = G.inverses()
    return G.multiply_many(G.multiply_many(inverse[a], inverse[b]), G.multiply_many(a, b))


def center(G: FiniteGroup) -> Subgroup:
    return G.cached("center", lambda: _center(G))


def _center(G: FiniteGroup) -> Subgroup:
    elements = G.elements()
    mask = np.ones(G.order, dtype=bool)
    for s in generators(G):
        fixed = np.full(G.order, s, dtype=HANDLE_DTYPE)
        mask &= G.multiply_many(elements, fixed) == G.multiply_many(fixed, elements)
    return Subgroup.from_mask(G, mask)


def normal_closure(G: FiniteGroup, seeds: Sequence[int]) -> Subgroup:
    gens = generators(G)
    inverse = G.inverses()
    current = sorted({int(x) for x in seeds})
    while True:
        mask = closure(G, current)
        pool = np.array(current, dtype=HANDLE_DTYPE)
        fresh = set()
        for s in gens:
            conjugates = G.multiply_many(G.multiply_many(np.full(pool.size, inverse[s]), pool), np.full(pool.size, s))
            fresh.update(int(x) for x in conjugates[~mask[conjugates]])
        if not fresh:
            return Subgroup.from_mask(G, mask)
        current = sorted(set(current) | fresh)


def derived_subgroup(G: FiniteGroup) -> Subgroup:
    return G.cached("derived", lambda: _derived(G))


def _derived(G: FiniteGroup) -> Subgroup:
    gens = np.array(generators(G), dtype=HANDLE_DTYPE)
    a = np.repeat(gens, gens.size)
    b = np.tile(gens, gens.size)
    seeds = np.unique(commutators_many(G, a, b))
    return normal_closure(G, [int(x) for x in seeds if x != 0])


def is_abelian(G: FiniteGroup) -> bool:
    return derived_subgroup(G).order == 1


def is_class_at_most_2(G: FiniteGroup) -> bool:
    """G' contained in Z(G)."""
    return G.cached("class2", lambda: derived_subgroup(G).issubset(center(G)))


def conjugacy_classes(G: FiniteGroup) -> ConjugacyClasses:
    return G.cached("classes", lambda: _conjugacy_classes(G))


def _conjugacy_classes(G: FiniteGroup) -> ConjugacyClasses:
    elements = G.elements()
    inverse = G.inverses()
    permutations = []
    for s in generators(G):
        fixed = np.full(G.order, s, dtype=HANDLE_DTYPE)
        permutations.append(G.multiply_many(G.multiply_many(np.full(G.order, inverse[s]), elements), fixed))
    labels = elements.copy()
    # each class is labelled by its smallest handle
    while True:
        updated = labels
        for perm in permutations:
            updated = np.minimum(updated, updated[perm])
        updated = updated[updated]
        if np.array_equal(updated, labels):
            break
        labels = updated
    representatives, class_of, sizes = np.unique(labels, return_inverse=True, return_counts=True)
    logger.debug(f"{G.name}: {len(representatives)} conjugacy classes")
    return ConjugacyClasses(G, tuple(int(r) for r in representatives), tuple(int(s) for s in sizes), class_of)


def power_map(G: FiniteGroup, e: int) -> np.ndarray:
    """g -> g^e; checked to be a permutation whenever gcd(e, |G|) = 1."""
    result = G.power_map(e)
    if gcd(int(e), G.order) == 1 and np.unique(result).size != G.order:
        raise OracleDisagreementError(f"{G.name}: power map g -> g^{e} is not bijective although gcd({e}, {G.order}) = 1")
    return result


def coprime_exponents(G: FiniteGroup) -> List[int]:
    """Exponents e coprime to |G|, taken modulo the exponent of G."""
    exponent = G.exponent()
    return [e for e in range(1, exponent + 1) if gcd(e, G.order) == 1 and gcd(e, exponent) == 1] or [1]


def element_orders(G: FiniteGroup) -> np.ndarray:
    return G.element_orders()


def _prime_part_mask(G: FiniteGroup, p: int) -> np.ndarray:
    orders = G.element_orders()
    reduced = orders.copy()
    while True:
        divisible = reduced % p == 0
        if not divisible.any():
            break
        reduced[divisible] //= p
    return reduced == 1


def sylow_decomposition(G: FiniteGroup) -> List[Subgroup]:
    """The Sylow subgroups of a nilpotent G, one per prime divisor of |G| in increasing order."""
    return G.cached("sylow", lambda: _sylow(G))


def _sylow(G: FiniteGroup) -> List[Subgroup]:
    result = []
    for p, k in sorted(factorint(G.order).items()):
        candidate = _prime_part_mask(G, p)
        size = int(candidate.sum())
        if size != p ** k:
            raise PreconditionError(f"{G.name} is not nilpotent: {size} elements of {p}-power order, expected {p ** k}")
        span = closure(G, [], None)
        chosen: List[int] = []
        while span.sum() < size:
            outside = np.nonzero(candidate & ~span)[0]
            if outside.size == 0:
                break
            chosen.append(int(outside[0]))
            span = closure(G, chosen, limit=size)
            if not np.array_equal(span & candidate, span) or span.sum() > size:
                raise PreconditionError(f"{G.name} is not nilpotent: {p}-elements are not closed under multiplication")
        result.append(Subgroup.from_mask(G, candidate))
    if np.prod([s.order for s in result], dtype=object) != G.order:
        raise PreconditionError(f"{G.name}: Sylow orders do not multiply to |G|")
    return result


def is_nilpotent(G: FiniteGroup) -> bool:
    if is_class_at_most_2(G):
        return True
    try:
        sylow_decomposition(G)
    except PreconditionError:
        return False
    return True


def prime_base(G: FiniteGroup) -> Optional[int]:
    """p when |G| is a power of the prime p, otherwise None."""
    factors = factorint(G.order)
    if len(factors) == 1:
        return next(iter(factors))
    return None


@dataclass(frozen=True, eq=False)
class AbelianInvariants:
    """Cyclic prime-power decomposition of an abelian subgroup A with a coordinate map."""

    subgroup: Subgroup = field(repr=False)
    orders: Tuple[int, ...]
    basis: Tuple[int, ...]
    coordinates: np.ndarray = field(repr=False)

    def coordinates_of(self, g: int) -> Tuple[int, ...]:
        row = self.coordinates[int(g)]
        if (row < 0).any():
            raise PreconditionError(f"element {g} is not in the decomposed subgroup")
        return tuple(int(x) for x in row)


def _span_with_coordinates(G: FiniteGroup, basis: Sequence[int], orders: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    handles = np.zeros(1, dtype=HANDLE_DTYPE)
    coords = np.zeros((1, 0), dtype=HANDLE_DTYPE)
    for b, m in zip(basis, orders):
        column = [0]
        current = 0
        for _ in range(m - 1):
            current = G.multiply(current, b)
            column.append(current)
        powers = np.array(column, dtype=HANDLE_DTYPE)
        handles = G.multiply_many(np.repeat(handles, m), np.tile(powers, handles.size))
        coords = np.hstack([np.repeat(coords, m, axis=0), np.tile(np.arange(m), coords.shape[0])[:, None]])
    return handles, coords


def abelian_invariants(G: FiniteGroup, subgroup: Optional[Subgroup] = None) -> AbelianInvariants:
    """
    Greedy p-basis: repeatedly take the element of largest order modulo the current span,
    corrected so that its order equals that quotient order.
    """
    subgroup = subgroup if subgroup is not None else Subgroup(G, tuple(range(G.order)))
    key = ("invariants", subgroup.elements)
    return G.cached(key, lambda: _abelian_invariants(G, subgroup))


def _abelian_invariants(G: FiniteGroup, subgroup: Subgroup) -> AbelianInvariants:
    members = subgroup.array()
    a = np.repeat(members, members.size) if members.size <= 1024 else None
    if a is not None:
        b = np.tile(members, members.size)
        if not np.array_equal(G.multiply_many(a, b), G.multiply_many(b, a)):
            raise PreconditionError(f"{G.name}: subgroup of order {subgroup.order} is not abelian")
    in_subgroup = subgroup.mask()
    orders_out: List[int] = []
    basis_out: List[int] = []
    for p in sorted(factorint(subgroup.order)):
        p_mask = in_subgroup & _prime_part_mask(G, p)
        target = int(p_mask.sum())
        basis: List[int] = []
        orders: List[int] = []
        coord_of: Dict[int, Tuple[int, ...]] = {0: ()}
        span = np.zeros(G.order, dtype=bool)
        span[0] = True
        while span.sum() < target:
            candidates = np.nonzero(p_mask & ~span)[0]
            acc = candidates.copy()
            quotient = np.ones(candidates.size, dtype=HANDLE_DTYPE)
            pending = ~span[acc]
            while pending.any():
                acc[pending] = G.power_map(p)[acc[pending]]
                quotient[pending] *= p
                pending = ~span[acc]
            best = int(np.argmax(quotient))
            y, q = int(candidates[best]), int(quotient[best])
            z = coord_of[int(G.power_map(q)[y])]
            correction = 0
            for x, m, c in zip(basis, orders, z):
                if c % q:
                    raise OracleDisagreementError(f"{G.name}: p-basis correction failed ({c} not divisible by {q})")
                correction = G.multiply(correction, int(G.power_map(-(c // q))[x]))
            y = G.multiply(y, correction)
            basis.append(y)
            orders.append(q)
            handles, coords = _span_with_coordinates(G, basis, orders)
            if np.unique(handles).size != handles.size:
                raise OracleDisagreementError(f"{G.name}: p-basis elements are not independent")
            span[:] = False
            span[handles] = True
            coord_of = {int(h): tuple(int(x) for x in row) for h, row in zip(handles, coords)}
        basis_out += basis
        orders_out += orders

    handles, coords = _span_with_coordinates(G, basis_out, orders_out)
    if handles.size != subgroup.order or np.unique(handles).size != handles.size:
        raise OracleDisagreementError(f"{G.name}: invariant basis does not span the subgroup")
    coordinates = np.full((G.order, len(basis_out)), -1, dtype=HANDLE_DTYPE)
    coordinates[handles] = coords
    return AbelianInvariants(subgroup, tuple(orders_out), tuple(basis_out), coordinates)


def coset_representatives(G: FiniteGroup, normal: Subgroup) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimal handle of every coset gN, plus the array sending each g to its representative.
    """
    elements = G.elements()
    smallest = elements.copy()
    for n in normal.elements:
        smallest = np.minimum(smallest, G.multiply_many(elements, np.full(G.order, n, dtype=HANDLE_DTYPE)))
    return np.unique(smallest), smallest


def isomorphism_invariants(G: FiniteGroup) -> Tuple[Tuple[int, int], ...]:
    """Sorted multiset of (element order, class size)."""
    classes = conjugacy_classes(G)
    sizes = np.array(classes.sizes)[classes.class_of]
    pairs = zip(G.element_orders().tolist(), sizes.tolist())
    return tuple(sorted((int(o), int(s)) for o, s in pairs))
