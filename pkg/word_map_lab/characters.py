"""
Complex character tables by class-matrix diagonalization, Fourier analysis of class functions and
the commutator-word closed forms.

Character values are double precision. Degrees and commutator-word counts are recovered by rounding
with an explicit residual check; Fourier coefficients are summed exactly over cyclotomic integers.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from sympy import ZZ, Poly, Symbol, cyclotomic_poly

from .config import (
    CHARACTER_TABLE_MAX_CLASSES,
    CHARACTER_TABLE_MAX_ORDER,
    COEFFICIENT_TOLERANCE,
    ORTHOGONALITY_TOLERANCE,
)
from .errors import CharacterTableError, FourierResidualError, OracleDisagreementError, PreconditionError
from .fibers import FiberDistribution
from .groups import HANDLE_DTYPE, FiniteGroup
from .structure import ConjugacyClasses, center, conjugacy_classes, coprime_exponents
from .words import build_named_word

logger = logging.getLogger(__name__)

EIGEN_ATTEMPTS = 6
SEPARATION_TOLERANCE = 1e-6


class ClassFunctionKind(str, Enum):
    CHARACTER = "character"
    GENERALIZED_CHARACTER = "generalized_character"
    NEITHER = "neither"


@dataclass(frozen=True, eq=False)
class CharacterTable:
    group: FiniteGroup = field(repr=False)
    classes: ConjugacyClasses = field(repr=False)
    degrees: Tuple[int, ...]
    values: np.ndarray = field(repr=False)
    residual: float = 0.0

    @property
    def degree_set(self) -> Tuple[int, ...]:
        """cd(G)."""
        return tuple(sorted(set(self.degrees)))

    @property
    def m(self) -> Optional[int]:
        """The larger degree when exactly two degrees occur."""
        degrees = self.degree_set
        return degrees[1] if len(degrees) == 2 else None

    def element_values(self, index: int) -> np.ndarray:
        """Values of the index-th character on every element."""
        return self.values[index][self.classes.class_of]

    def to_document(self) -> dict:
        def clean(x: float) -> float:
            x = round(float(x), 12)
            return 0.0 if x == 0 else x

        return {
            "group": self.group.name,
            "classes": [self.group.label(r) for r in self.classes.representatives],
            "sizes": list(self.classes.sizes),
            "degrees": list(self.degrees),
            "values": [[[clean(v.real), clean(v.imag)] for v in row] for row in self.values],
        }


def _structure_constants(G: FiniteGroup, classes: ConjugacyClasses) -> np.ndarray:
    """a[r, s, t] = #{(x, y) in C_r x C_s : xy = g_t} for a fixed g_t in C_t."""
    r = len(classes)
    class_of = np.asarray(classes.class_of, dtype=HANDLE_DTYPE)
    histogram = np.zeros(r * r * r, dtype=np.int64)
    elements = G.elements()
    rows = max(1, 2 ** 20 // G.order)
    for start in range(0, G.order, rows):
        x = np.repeat(elements[start:start + rows], G.order)
        y = np.tile(elements, min(rows, G.order - start))
        xy = G.multiply_many(x, y)
        key = (class_of[x] * r + class_of[y]) * r + class_of[xy]
        histogram += np.bincount(key, minlength=r ** 3)
    sizes = np.array(classes.sizes, dtype=np.float64)
    return histogram.reshape(r, r, r) / sizes[None, None, :]


def _central_characters(constants: np.ndarray, attempt: int) -> Optional[np.ndarray]:
    r = constants.shape[0]
    rng = np.random.default_rng(attempt)
    weights = rng.standard_normal(r)
    combined = np.tensordot(weights, constants, axes=1)
    eigenvalues, eigenvectors = np.linalg.eig(combined)
    gaps = np.abs(eigenvalues[:, None] - eigenvalues[None, :]) + np.eye(r) * np.inf
    if r > 1 and gaps.min() < SEPARATION_TOLERANCE * max(1.0, np.abs(eigenvalues).max()):
        logger.warning(f"eigenvalues not separated on attempt {attempt} (gap {gaps.min():.3e}); retrying")
        return None
    return (eigenvectors / eigenvectors[0, :]).T


def character_table(G: FiniteGroup) -> CharacterTable:
    """Irreducible characters, trivial character first, degrees ascending."""
    return G.cached("character_table", lambda: _character_table(G))


def _character_table(G: FiniteGroup) -> CharacterTable:
    if G.order > CHARACTER_TABLE_MAX_ORDER:
        raise CharacterTableError(f"{G.name}: order {G.order} exceeds {CHARACTER_TABLE_MAX_ORDER}")
    classes = conjugacy_classes(G)
    r = len(classes)
    if r > CHARACTER_TABLE_MAX_CLASSES:
        raise CharacterTableError(f"{G.name}: {r} classes exceed {CHARACTER_TABLE_MAX_CLASSES}")
    sizes = np.array(classes.sizes, dtype=np.float64)
    constants = _structure_constants(G, classes)

    omega = None
    for attempt in range(EIGEN_ATTEMPTS):
        omega = _central_characters(constants, attempt)
        if omega is not None:
            break
    if omega is None:
        raise CharacterTableError(f"{G.name}: class-matrix eigenvalues never separated after {EIGEN_ATTEMPTS} attempts")

    raw_degrees = np.sqrt(G.order / (np.abs(omega) ** 2 / sizes).sum(axis=1))
    degrees = np.rint(raw_degrees).astype(int)
    if np.abs(raw_degrees - degrees).max() > COEFFICIENT_TOLERANCE or (degrees < 1).any():
        raise CharacterTableError(f"{G.name}: degrees {raw_degrees} are not integral")
    if any(G.order % int(d) for d in degrees) or int((degrees ** 2).sum()) != G.order:
        raise CharacterTableError(f"{G.name}: degrees {degrees.tolist()} violate divisibility or sum of squares")
    values = omega * degrees[:, None] / sizes[None, :]

    def sort_key(i: int):
        row = np.round(values[i], 9)
        return (int(degrees[i]), [(-v.real, -v.imag) for v in row])

    order = sorted(range(r), key=sort_key)
    values = values[order]
    degrees = degrees[order]

    inner = (values * sizes[None, :]) @ values.conj().T / G.order
    row_residual = float(np.abs(inner - np.eye(r)).max())
    column = values.conj().T @ values
    column_residual = float(np.abs(column - np.diag(G.order / sizes)).max() / G.order)
    residual = max(row_residual, column_residual)
    if residual > ORTHOGONALITY_TOLERANCE:
        raise CharacterTableError(f"{G.name}: orthogonality residual {residual:.3e} above {ORTHOGONALITY_TOLERANCE}")
    if not np.allclose(values[0], 1.0, atol=ORTHOGONALITY_TOLERANCE):
        raise CharacterTableError(f"{G.name}: first character is not trivial")
    logger.info(f"Character table of {G.name}: {r} characters, degrees {sorted(set(degrees.tolist()))}, residual {residual:.1e}")
    return CharacterTable(G, classes, tuple(int(d) for d in degrees), values, residual)


@dataclass(frozen=True, eq=False)
class FourierDecomposition:
    table: CharacterTable = field(repr=False)
    coefficients: Tuple[Fraction, ...]
    residual: float
    distribution: Optional[FiberDistribution] = field(default=None, repr=False)


def _class_values(d: FiberDistribution, classes: ConjugacyClasses) -> List[int]:
    result = []
    for index, representative in enumerate(classes.representatives):
        value = d.counts[representative]
        if any(d.counts[g] != value for g in classes.members(index)):
            raise OracleDisagreementError(f"{d.group.name}: distribution is not constant on the class of {representative}")
        result.append(value)
    return result


def exact_character_values(t: CharacterTable) -> Tuple[Tuple[Tuple[Tuple[int, int], ...], ...], ...]:
    """
    Every value chi_i(g_c) as a sum of E-th roots of unity, E = exp(G): entry [i][c] lists pairs
    (s, m) meaning chi_i(g_c) = sum m * zeta_E^s. The multiplicities m are eigenvalue counts of
    the representation at g_c, recovered from chi_i on the powers of g_c.
    """
    return t.group.cached("exact_character_values", lambda: _exact_character_values(t))


def _exact_character_values(t: CharacterTable):
    G = t.group
    E = G.exponent()
    orders = G.element_orders()
    columns = []
    for representative in t.classes.representatives:
        o = int(orders[representative])
        powers = [0]
        for _ in range(o - 1):
            powers.append(G.multiply(powers[-1], representative))
        on_powers = t.values[:, t.classes.class_of[np.array(powers, dtype=HANDLE_DTYPE)]]
        # multiplicity of zeta_o^s is (1/o) sum_j chi(g^j) zeta_o^(-sj)
        spectrum = np.fft.fft(on_powers, axis=1) / o
        multiplicities = np.rint(spectrum.real)
        if np.abs(spectrum - multiplicities).max() > SEPARATION_TOLERANCE or (multiplicities < 0).any():
            raise CharacterTableError(f"{G.name}: eigenvalue multiplicities at {G.label(representative)} are not non-negative integers")
        if not np.array_equal(multiplicities.sum(axis=1), np.array(t.degrees, dtype=np.float64)):
            raise CharacterTableError(f"{G.name}: eigenvalue multiplicities at {G.label(representative)} do not add up to the degrees")
        step = E // o
        columns.append([tuple((s * step, int(m)) for s, m in enumerate(row) if m) for row in multiplicities])
    return tuple(tuple(column[i] for column in columns) for i in range(len(t.degrees)))


def _rational_integer(coefficients: List[int], modulus: Poly) -> Optional[int]:
    """The integer sum c_s zeta^s when it is rational, otherwise None; `modulus` is the minimal polynomial of zeta."""
    remainder = Poly(list(reversed(coefficients)), modulus.gen, domain=ZZ).rem(modulus)
    if remainder.degree() > 0:
        return None
    return int(remainder.coeff_monomial(1))


def fourier_coefficients(d: FiberDistribution, t: CharacterTable) -> FourierDecomposition:
    """
    N^chi = (1/|G|) sum_g N(g) conj(chi(g)). The numerators are summed exactly in Z[zeta_E] and
    reduced modulo the E-th cyclotomic polynomial; the floating table only serves as a cross-check.
    """
    if d.group is not t.group:
        raise PreconditionError(f"distribution over {d.group.name} analysed with the table of {t.group.name}")
    G = d.group
    E = G.exponent()
    exact = _class_values(d, t.classes)
    weights = [size * value for size, value in zip(t.classes.sizes, exact)]
    values = exact_character_values(t)
    x = Symbol("x")
    modulus = Poly(cyclotomic_poly(E, x), x, domain=ZZ)

    numerators = []
    for i, row in enumerate(values):
        acc = [0] * E
        for weight, terms in zip(weights, row):
            if weight:
                for s, m in terms:
                    acc[-s % E] += weight * m
        numerator = _rational_integer(acc, modulus)
        if numerator is None:
            raise FourierResidualError(f"{G.name}: coefficient on character {i} is irrational")
        numerators.append(numerator)

    # the floating sum must agree relative to the magnitude of its terms
    scale = max(1, max(abs(v) for v in exact))
    f = np.array([float(Fraction(w, scale)) for w in weights], dtype=np.float64)
    approximate = (t.values.conj() * f[None, :]).sum(axis=1)
    magnitude = float(np.abs(f).sum()) * max(t.degrees)
    residual = float(np.abs(approximate - np.array([float(Fraction(n, scale)) for n in numerators])).max()) / max(magnitude, 1e-300)
    if residual > COEFFICIENT_TOLERANCE:
        raise FourierResidualError(f"{G.name}: exact numerators disagree with the character table (residual {residual:.3e})")

    coefficients = tuple(Fraction(n, G.order) for n in numerators)
    if sum(c * degree for c, degree in zip(coefficients, t.degrees)) != d.counts[0]:
        raise FourierResidualError(f"{G.name}: coefficients do not reproduce N(1) = {d.counts[0]}")
    return FourierDecomposition(t, coefficients, residual, d)


def is_rational_distribution(d: FiberDistribution) -> bool:
    """N(g) = N(g^e) for every e coprime to |G|."""
    G = d.group
    counts = d.array()
    for e in coprime_exponents(G):
        if not np.array_equal(counts, counts[G.power_map(e)]):
            return False
    return True


def classify_class_function(f: FourierDecomposition) -> ClassFunctionKind:
    """
    character: non-negative integer coefficients, not all zero; generalized_character: integer
    coefficients; neither otherwise. For word distributions the verdict is cross-checked against
    the power-map criterion.
    """
    integral = all(c.denominator == 1 for c in f.coefficients)
    if integral and all(c >= 0 for c in f.coefficients) and any(f.coefficients):
        kind = ClassFunctionKind.CHARACTER
    elif integral:
        kind = ClassFunctionKind.GENERALIZED_CHARACTER
    else:
        kind = ClassFunctionKind.NEITHER
    source = f.distribution
    if source is not None and source.word is not None:
        rational = is_rational_distribution(source)
        if rational != integral:
            raise OracleDisagreementError(
                f"{source.group.name}, {source.word_text()}: integer coefficients={integral} but power-map invariance={rational}"
            )
    return kind


def closed_form_wk_two_degree(order: int, derived_size: int, m: int, k: int) -> Tuple[int, int]:
    """
    (N(1), N(g)) for g != 1 in G' when cd(G) = {1, m}:
    N(g) = |G|^2k / |G'| * (1 - 1/m^2k) and N(1) = |G|^2k - (|G'| - 1) N(g).
    """
    if m < 2 or k < 1 or derived_size < 1 or order < 1 or order % derived_size:
        raise PreconditionError(f"closed form needs m >= 2, k >= 1 and |G'| dividing |G|; got ({order}, {derived_size}, {m}, {k})")
    total = order ** (2 * k)
    other = Fraction(total, derived_size) * (1 - Fraction(1, m ** (2 * k)))
    if other.denominator != 1:
        raise PreconditionError(f"closed form is not integral for ({order}, {derived_size}, {m}, {k})")
    other = int(other)
    return total - (derived_size - 1) * other, other


def frobenius_count_wk(t: CharacterTable, k: int) -> FiberDistribution:
    """N_wk(g) = sum_chi (|G|/chi(1))^(2k-1) chi(g), summed exactly degree by degree."""
    if k < 1:
        raise PreconditionError(f"k must be positive, got {k}")
    G = t.group
    degrees = np.array(t.degrees)
    per_class = [0] * len(t.classes)
    for d in sorted(set(t.degrees)):
        summed = t.values[degrees == d].sum(axis=0)
        rounded = np.rint(summed.real)
        if np.abs(summed - rounded).max() > COEFFICIENT_TOLERANCE:
            raise FourierResidualError(f"{G.name}: degree-{d} character sum is not integral")
        weight = (G.order // d) ** (2 * k - 1)
        per_class = [acc + weight * int(v) for acc, v in zip(per_class, rounded)]
    counts = [per_class[c] for c in t.classes.class_of]
    if sum(counts) != G.order ** (2 * k) or min(counts) < 0:
        raise OracleDisagreementError(f"{G.name}: Frobenius sum does not give a distribution of mass |G|^{2 * k}")
    return FiberDistribution.from_counts(G, counts, 2 * k, build_named_word("wk", k), "frobenius", 0)


def is_central_type(t: CharacterTable) -> bool:
    """cd(G) = {1, m} with m^2 = |G : Z(G)|."""
    m = t.m
    return m is not None and t.degree_set[0] == 1 and m * m * center(t.group).order == t.group.order
