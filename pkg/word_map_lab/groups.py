"""
Finite groups with integer element handles 0..|G|-1 (0 is the identity) and two engines:

- CayleyGroup: an explicit, validated multiplication table.
- PcClass2Group: a polycyclic presentation of nilpotency class <= 2, multiplied by collection.

Every engine exposes vectorized `multiply_many` over numpy handle arrays; word evaluation,
power maps and the counting engines are built on top of it.
"""

import json
import logging
import threading
from math import gcd, prod
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import (
    CAYLEY_ASSOCIATIVITY_EXHAUSTIVE,
    CAYLEY_ASSOCIATIVITY_SAMPLES,
    MAX_GROUP_ORDER,
    PC_ASSOCIATIVITY_EXHAUSTIVE,
    PC_ASSOCIATIVITY_SAMPLES,
    WORDLAB_CHUNK,
    WORDLAB_TABLE_LIMIT,
)
from .errors import GroupValidationError, PreconditionError, WordError
from .words import Word

logger = logging.getLogger(__name__)

CAYLEY_FORMAT = "cayley-v1"
PC_FORMAT = "pc2-v1"

HANDLE_DTYPE = np.int64


class FiniteGroup:
    """Interface for finite groups whose elements are the handles 0..order-1."""

    name: str
    order: int

    def __init__(self, name: str, order: int):
        self.name = str(name)
        self.order = int(order)
        self._cache: Dict[object, object] = {}
        self._cache_lock = threading.RLock()

    # engine primitives

    def multiply_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def label(self, g: int) -> str:
        return str(int(g))

    # derived operations

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=HANDLE_DTYPE)

    def cached(self, key, factory: Callable[[], object]):
        """Single-initialization memo for structure computations."""
        with self._cache_lock:
            if key not in self._cache:
                self._cache[key] = factory()
            return self._cache[key]

    def multiply(self, a: int, b: int) -> int:
        return int(self.multiply_many(np.array([a], dtype=HANDLE_DTYPE), np.array([b], dtype=HANDLE_DTYPE))[0])

    def inverses(self) -> np.ndarray:
        return self.cached("inverses", self._compute_inverses)

    def _compute_inverses(self) -> np.ndarray:
        # g^-1 = g^(ord(g) - 1)
        elements = self.elements()
        result = np.zeros(self.order, dtype=HANDLE_DTYPE)
        acc = elements.copy()
        previous = np.zeros(self.order, dtype=HANDLE_DTYPE)
        pending = np.ones(self.order, dtype=bool)
        while pending.any():
            done = pending & (acc == 0)
            result[done] = previous[done]
            pending &= ~done
            previous = acc
            acc = np.where(pending, self.multiply_many(acc, elements), acc)
        return result

    def inverse(self, g: int) -> int:
        return int(self.inverses()[int(g)])

    def power_map(self, e: int) -> np.ndarray:
        """Array sending each handle g to g^e; e is taken modulo the group exponent."""
        e = int(e) % self.exponent()
        return self.cached(("power", e), lambda: self._compute_power(e))

    def _compute_power(self, e: int) -> np.ndarray:
        if e == 0:
            return np.zeros(self.order, dtype=HANDLE_DTYPE)
        if e == 1:
            return self.elements()
        half = self.power_map(e // 2)
        squared = self.multiply_many(half, half)
        if e % 2:
            return self.multiply_many(squared, self.elements())
        return squared

    def element_orders(self) -> np.ndarray:
        return self.cached("orders", self._compute_orders)

    def _compute_orders(self) -> np.ndarray:
        elements = self.elements()
        orders = np.ones(self.order, dtype=HANDLE_DTYPE)
        acc = elements.copy()
        pending = acc != 0
        while pending.any():
            acc[pending] = self.multiply_many(acc[pending], elements[pending])
            orders[pending] += 1
            pending = acc != 0
        return orders

    def exponent(self) -> int:
        return self.cached("exponent", self._compute_exponent)

    def _compute_exponent(self) -> int:
        result = 1
        for value in np.unique(self.element_orders()):
            result = result * int(value) // gcd(result, int(value))
        return result

    def check_handle(self, g) -> int:
        if isinstance(g, (bool, np.bool_)) or not isinstance(g, (int, np.integer)):
            raise GroupValidationError(f"element handle {g!r} is not an integer")
        if not 0 <= int(g) < self.order:
            raise GroupValidationError(f"element handle {g} does not belong to {self.name} (order {self.order})")
        return int(g)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r}, order={self.order})"


def _check_associativity_table(table: np.ndarray, name: str, exhaustive: bool, samples: int):
    n = table.shape[0]
    if exhaustive:
        for a in range(n):
            left = table[table[a]]
            right = table[a][table]
            if not np.array_equal(left, right):
                b, c = np.argwhere(left != right)[0]
                raise GroupValidationError(f"{name}: associativity fails at ({a},{b},{c})")
        return
    logger.warning(f"{name}: associativity sampled on {samples} random triples (order {n})")
    rng = np.random.default_rng(0)
    a, b, c = rng.integers(0, n, size=(3, samples))
    bad = np.nonzero(table[table[a, b], c] != table[a, table[b, c]])[0]
    if bad.size:
        i = bad[0]
        raise GroupValidationError(f"{name}: associativity fails at ({a[i]},{b[i]},{c[i]})")


class CayleyGroup(FiniteGroup):
    """Group given by a validated multiplication table with identity 0."""

    def __init__(self, name: str, table, *, element_labels: Optional[Sequence[str]] = None, full_check: bool = False):
        try:
            table = np.asarray(table, dtype=HANDLE_DTYPE)
        except (TypeError, ValueError) as e:
            raise GroupValidationError(f"{name}: table is not an integer matrix ({e})")
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupValidationError(f"{name}: table must be a non-empty square matrix, got shape {table.shape}")
        super().__init__(name, table.shape[0])
        n = self.order
        if n > MAX_GROUP_ORDER:
            raise GroupValidationError(f"{name}: order {n} exceeds {MAX_GROUP_ORDER}")
        if table.min() < 0 or table.max() >= n:
            raise GroupValidationError(f"{name}: table entries must lie in 0..{n - 1}")
        expected = np.arange(n)
        rows_ok = np.all(np.sort(table, axis=1) == expected, axis=1)
        if not rows_ok.all():
            raise GroupValidationError(f"{name}: not a Latin square (row {int(np.argmin(rows_ok))} repeats an entry)")
        cols_ok = np.all(np.sort(table, axis=0) == expected[:, None], axis=0)
        if not cols_ok.all():
            raise GroupValidationError(f"{name}: not a Latin square (column {int(np.argmin(cols_ok))} repeats an entry)")
        if not (np.array_equal(table[0], expected) and np.array_equal(table[:, 0], expected)):
            raise GroupValidationError(f"{name}: element 0 is not the identity")
        inverse = np.argmin(table, axis=1)
        if not np.all(table[inverse, expected] == 0):
            raise GroupValidationError(f"{name}: left and right inverses differ")
        _check_associativity_table(table, name, full_check or n <= CAYLEY_ASSOCIATIVITY_EXHAUSTIVE, CAYLEY_ASSOCIATIVITY_SAMPLES)
        self.table = table
        self._cache["inverses"] = inverse.astype(HANDLE_DTYPE)
        if element_labels is not None and len(element_labels) != n:
            raise GroupValidationError(f"{name}: {len(element_labels)} labels for {n} elements")
        self.element_labels = [str(x) for x in element_labels] if element_labels is not None else None

    def multiply_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.table[a, b]

    def label(self, g: int) -> str:
        if self.element_labels is None:
            return str(int(g))
        return self.element_labels[int(g)]


class PcClass2Group(FiniteGroup):
    """
    Polycyclic group g_1^e_1 ... g_n^e_n, 0 <= e_i < r_i, of nilpotency class at most 2.

    Handles are the mixed-radix encoding of the exponent vector with the last generator varying
    fastest. Power and commutator relations must be supported on central generators, and the
    power relation of g_i only on generators after g_i.
    """

    def __init__(self, name: str, orders: Sequence[int], powers: Mapping[int, Sequence[int]] = None,
                 commutators: Mapping[Tuple[int, int], Sequence[int]] = None, *,
                 generator_names: Optional[Sequence[str]] = None, full_check: bool = False):
        orders = [int(r) for r in orders]
        if not orders or any(r < 2 for r in orders):
            raise GroupValidationError(f"{name}: relative orders must be integers >= 2, got {orders}")
        order = prod(orders)
        if order > MAX_GROUP_ORDER:
            raise GroupValidationError(f"{name}: order {order} exceeds {MAX_GROUP_ORDER}")
        super().__init__(name, order)
        n = len(orders)
        self.rank = n
        self.relative_orders = np.array(orders, dtype=HANDLE_DTYPE)
        weights = np.ones(n, dtype=HANDLE_DTYPE)
        for i in range(n - 2, -1, -1):
            weights[i] = weights[i + 1] * orders[i + 1]
        self.weights = weights
        self.generator_names = list(generator_names) if generator_names else [f"g{i + 1}" for i in range(n)]
        if len(self.generator_names) != n:
            raise GroupValidationError(f"{name}: {len(self.generator_names)} generator names for {n} generators")

        self.powers = np.zeros((n, n), dtype=HANDLE_DTYPE)
        for i, vector in (powers or {}).items():
            self.powers[self._index(i)] = self._vector(vector, f"power relation of g{i + 1}")
        self.commutators = np.zeros((n, n, n), dtype=HANDLE_DTYPE)
        for (i, j), vector in (commutators or {}).items():
            i, j = self._index(i), self._index(j)
            if not i < j:
                raise GroupValidationError(f"{name}: commutator key (g{i + 1},g{j + 1}) must have i < j")
            self.commutators[i, j] = self._vector(vector, f"commutator [g{i + 1},g{j + 1}]")

        self.central = np.array([
            not self.commutators[c, :].any() and not self.commutators[:, c].any() for c in range(n)
        ])
        for i in range(n):
            support = np.nonzero(self.powers[i])[0]
            if support.size and (support.min() <= i or not self.central[support].all()):
                raise GroupValidationError(f"{name}: power relation of g{i + 1} must be supported on later central generators")
            for j in range(i + 1, n):
                support = np.nonzero(self.commutators[i, j])[0]
                if support.size and not self.central[support].all():
                    labels = ", ".join(f"g{s + 1}" for s in support)
                    raise GroupValidationError(f"{name}: [g{i + 1},g{j + 1}] is supported on non-central generators {labels}")
        self._pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if self.commutators[i, j].any()]

        self._check_consistency(full_check)
        logger.debug(f"Built polycyclic group {name} of order {order} on {n} generators")

    def _index(self, i) -> int:
        i = int(i)
        if not 0 <= i < len(self.relative_orders):
            raise GroupValidationError(f"{self.name}: generator index {i + 1} out of range")
        return i

    def _vector(self, vector: Sequence[int], what: str) -> np.ndarray:
        values = np.array([int(x) for x in vector], dtype=HANDLE_DTYPE)
        if values.shape != self.relative_orders.shape:
            raise GroupValidationError(f"{self.name}: {what} needs {len(self.relative_orders)} exponents, got {len(values)}")
        if (values < 0).any() or (values >= self.relative_orders).any():
            raise GroupValidationError(f"{self.name}: {what} has exponents outside their relative orders")
        return values

    def exponents_many(self, handles: np.ndarray) -> np.ndarray:
        handles = np.asarray(handles, dtype=HANDLE_DTYPE)
        return (handles[..., None] // self.weights) % self.relative_orders

    def exponents(self, g: int) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.exponents_many(np.array([self.check_handle(g)]))[0])

    def from_exponents_many(self, vectors: np.ndarray) -> np.ndarray:
        return np.asarray(vectors, dtype=HANDLE_DTYPE) @ self.weights

    def from_exponents(self, vector: Sequence[int]) -> int:
        return int(self.from_exponents_many(self._vector(vector, "exponent vector")[None, :])[0])

    def generator(self, i: int) -> int:
        """Handle of g_{i+1}."""
        return int(self.weights[self._index(i)])

    def _collect(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        e = a + b
        # g_j^a_j sitting left of g_i^b_i (i < j) leaves [g_j, g_i]^(a_j b_i) = [g_i, g_j]^(-a_j b_i)
        for i, j in self._pairs:
            coefficient = b[:, i] * a[:, j]
            e -= coefficient[:, None] * self.commutators[i, j][None, :]
        for i in range(self.rank):
            carry, e[:, i] = np.divmod(e[:, i], self.relative_orders[i])
            if self.powers[i].any():
                e += carry[:, None] * self.powers[i][None, :]
        return e

    def _multiply_collect(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=HANDLE_DTYPE)
        b = np.asarray(b, dtype=HANDLE_DTYPE)
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        a, b = a.ravel(), b.ravel()
        result = np.empty(a.size, dtype=HANDLE_DTYPE)
        for start in range(0, a.size, WORDLAB_CHUNK):
            stop = start + WORDLAB_CHUNK
            product = self._collect(self.exponents_many(a[start:stop]), self.exponents_many(b[start:stop]))
            result[start:stop] = self.from_exponents_many(product)
        return result.reshape(shape)

    def table(self) -> Optional[np.ndarray]:
        """Materialized multiplication table, or None above WORDLAB_TABLE_LIMIT."""
        if self.order > WORDLAB_TABLE_LIMIT:
            return None
        return self.cached("table", self._build_table)

    def _build_table(self) -> np.ndarray:
        elements = self.elements()
        table = np.empty((self.order, self.order), dtype=HANDLE_DTYPE)
        for row in range(self.order):
            table[row] = self._multiply_collect(np.full(self.order, row, dtype=HANDLE_DTYPE), elements)
        return table

    def multiply_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        table = self.table()
        if table is not None:
            return table[a, b]
        return self._multiply_collect(a, b)

    def _check_consistency(self, full_check: bool):
        if full_check or self.order <= PC_ASSOCIATIVITY_EXHAUSTIVE:
            table = self.table() if self.order <= WORDLAB_TABLE_LIMIT else self._build_table()
            _check_associativity_table(table, self.name, True, 0)
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, self.order, size=(3, PC_ASSOCIATIVITY_SAMPLES))
            left = self.multiply_many(self.multiply_many(a, b), c)
            right = self.multiply_many(a, self.multiply_many(b, c))
            bad = np.nonzero(left != right)[0]
            if bad.size:
                i = bad[0]
                raise GroupValidationError(f"{self.name}: inconsistent presentation, associativity fails at ({a[i]},{b[i]},{c[i]})")
        gens = self.weights
        for c in np.nonzero(self.central)[0]:
            z = np.full(self.rank, gens[c], dtype=HANDLE_DTYPE)
            if not np.array_equal(self.multiply_many(gens, z), self.multiply_many(z, gens)):
                raise GroupValidationError(f"{self.name}: generator {self.generator_names[c]} is not central")

    def label(self, g: int) -> str:
        vector = self.exponents(g)
        parts = [name if e == 1 else f"{name}^{e}" for name, e in zip(self.generator_names, vector) if e]
        return "*".join(parts) if parts else "1"


class DirectProductGroup(FiniteGroup):
    """H x K with handle h * |K| + k."""

    def __init__(self, left: FiniteGroup, right: FiniteGroup, *, name: Optional[str] = None):
        order = left.order * right.order
        if order > MAX_GROUP_ORDER:
            raise PreconditionError(f"direct product of order {order} exceeds {MAX_GROUP_ORDER}")
        super().__init__(name or f"{left.name}x{right.name}", order)
        self.left = left
        self.right = right

    def split(self, g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return np.divmod(np.asarray(g, dtype=HANDLE_DTYPE), self.right.order)

    def pair(self, h, k):
        return np.asarray(h, dtype=HANDLE_DTYPE) * self.right.order + np.asarray(k, dtype=HANDLE_DTYPE)

    def multiply_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a1, a2 = self.split(a)
        b1, b2 = self.split(b)
        return self.pair(self.left.multiply_many(a1, b1), self.right.multiply_many(a2, b2))

    def label(self, g: int) -> str:
        h, k = divmod(int(g), self.right.order)
        return f"({self.left.label(h)},{self.right.label(k)})"


def direct_product(left: FiniteGroup, right: FiniteGroup) -> DirectProductGroup:
    return DirectProductGroup(left, right)


def multiplication_table(G: FiniteGroup) -> np.ndarray:
    if isinstance(G, CayleyGroup):
        return G.table
    if G.order > WORDLAB_TABLE_LIMIT:
        raise PreconditionError(f"{G.name}: order {G.order} is above the table limit {WORDLAB_TABLE_LIMIT}")
    elements = G.elements()
    return G.multiply_many(np.repeat(elements, G.order), np.tile(elements, G.order)).reshape(G.order, G.order)


def as_cayley(G: FiniteGroup) -> CayleyGroup:
    """Re-expresses any small group through its multiplication table, keeping handles and labels."""
    if isinstance(G, CayleyGroup):
        return G
    labels = [G.label(g) for g in range(G.order)]
    return CayleyGroup(f"{G.name}[table]", multiplication_table(G), element_labels=labels)


def load_cayley(document) -> CayleyGroup:
    """Builds a CayleyGroup from a cayley-v1 document (mapping or JSON text)."""
    document = _as_mapping(document)
    if document.get("format") != CAYLEY_FORMAT:
        raise GroupValidationError(f"expected format {CAYLEY_FORMAT!r}, got {document.get('format')!r}")
    name = document.get("name")
    order = document.get("order")
    table = document.get("table")
    if not isinstance(name, str) or not isinstance(order, int) or not isinstance(table, list):
        raise GroupValidationError("cayley document needs a string name, an integer order and a table")
    if len(table) != order or any(not isinstance(row, list) or len(row) != order for row in table):
        raise GroupValidationError(f"{name}: table must be {order}x{order}")
    if any(not isinstance(x, int) or isinstance(x, bool) for row in table for x in row):
        raise GroupValidationError(f"{name}: table entries must be integers")
    return CayleyGroup(name, table, element_labels=document.get("labels"))


def build_pc_class2(presentation) -> PcClass2Group:
    """Builds a PcClass2Group from a pc2-v1 document (mapping or JSON text); indices are 1-based."""
    document = _as_mapping(presentation)
    if document.get("format") != PC_FORMAT:
        raise GroupValidationError(f"expected format {PC_FORMAT!r}, got {document.get('format')!r}")
    name = document.get("name")
    orders = document.get("orders")
    if not isinstance(name, str) or not isinstance(orders, list) or not all(isinstance(r, int) for r in orders):
        raise GroupValidationError("pc document needs a string name and an integer list of orders")
    try:
        powers = {int(key) - 1: value for key, value in (document.get("powers") or {}).items()}
        commutators = {}
        for key, value in (document.get("commutators") or {}).items():
            i, j = (int(part) - 1 for part in key.split(","))
            commutators[(i, j)] = value
    except (ValueError, AttributeError) as e:
        raise GroupValidationError(f"{name}: malformed relation key ({e})")
    return PcClass2Group(name, orders, powers, commutators, generator_names=document.get("generators"))


def load_group_document(document) -> FiniteGroup:
    document = _as_mapping(document)
    if document.get("format") == PC_FORMAT:
        return build_pc_class2(document)
    return load_cayley(document)


def load_group_file(path: str) -> FiniteGroup:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise GroupValidationError(f"cannot read group file {path}: {e}")
    return load_group_document(text)


def _as_mapping(document) -> Mapping:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise GroupValidationError(f"malformed group document: {e}")
    if not isinstance(document, Mapping):
        raise GroupValidationError("group document must be a JSON object")
    return document


def group_document(G: FiniteGroup) -> dict:
    """Serializes G as pc2-v1 when it has a presentation, otherwise as cayley-v1."""
    if isinstance(G, PcClass2Group):
        n = G.rank
        return {
            "format": PC_FORMAT,
            "name": G.name,
            "orders": [int(r) for r in G.relative_orders],
            "generators": list(G.generator_names),
            "powers": {str(i + 1): [int(x) for x in G.powers[i]] for i in range(n) if G.powers[i].any()},
            "commutators": {f"{i + 1},{j + 1}": [int(x) for x in G.commutators[i, j]] for i, j in G._pairs},
        }
    table = multiplication_table(G)
    document = {"format": CAYLEY_FORMAT, "name": G.name, "order": G.order, "table": table.tolist()}
    if not isinstance(G, CayleyGroup) or G.element_labels is not None:
        document["labels"] = [G.label(g) for g in range(G.order)]
    return document


def evaluate_word_many(G: FiniteGroup, w: Word, columns: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluates w on many tuples at once; columns[i] holds the values of x_{i+1}."""
    if len(columns) != w.arity:
        raise WordError(f"word of arity {w.arity} evaluated on {len(columns)} columns")
    size = len(columns[0]) if columns else 1
    acc = np.zeros(size, dtype=HANDLE_DTYPE)
    for index, exponent in w.letters:
        acc = G.multiply_many(acc, G.power_map(exponent)[columns[index - 1]])
    return acc


def evaluate_word(G: FiniteGroup, w: Word, values: Sequence[int]) -> int:
    """Left-to-right product of the letter powers under x_i -> values[i-1]."""
    if len(values) != w.arity:
        raise WordError(f"word of arity {w.arity} needs {w.arity} values, got {len(values)}")
    handles = [G.check_handle(g) for g in values]
    columns = [np.array([h], dtype=HANDLE_DTYPE) for h in handles]
    return int(evaluate_word_many(G, w, columns)[0]) if columns else 0
