"""
Class-2 signatures of words and their reduction to the representative forms

    type (1):  [x1,x2]^(p^s1) ... [x_{2r-1},x_{2r}]^(p^sr),   s1 <= ... <= sr
    type (2):  x1^(p^s1) [x1,x2]^(p^s2) ...                    (partial normalization only)

A signature (a, B) stands for prod x_i^a_i * prod_{i<j} [x_i,x_j]^b_ij, the normal form of a word
in the free group of nilpotency class 2. All arithmetic is exact Python integers.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from sympy import isprime, multiplicity

from .errors import OracleDisagreementError, PreconditionError, WordError
from .words import Word, parse_word

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]


def _zeros(k: int) -> List[List[int]]:
    return [[0] * k for _ in range(k)]


def _freeze(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class Class2Signature:
    arity: int
    a: Tuple[int, ...]
    b: Matrix

    def __post_init__(self):
        if len(self.a) != self.arity or len(self.b) != self.arity or any(len(row) != self.arity for row in self.b):
            raise WordError(f"signature shape does not match arity {self.arity}")
        for i in range(self.arity):
            for j in range(i + 1):
                if self.b[i][j] != 0:
                    raise WordError("commutator matrix must be strictly upper triangular")

    @classmethod
    def identity(cls, arity: int) -> "Class2Signature":
        return cls(arity, (0,) * arity, _freeze(_zeros(arity)))

    @classmethod
    def from_entries(cls, arity: int, a: Optional[Sequence[int]] = None, b: Optional[dict] = None) -> "Class2Signature":
        """Builds a signature from an exponent vector and a {(i, j): b_ij} map with 1-based i < j."""
        rows = _zeros(arity)
        for (i, j), value in (b or {}).items():
            if not 1 <= i < j <= arity:
                raise WordError(f"commutator entry ({i},{j}) must satisfy 1 <= i < j <= {arity}")
            rows[i - 1][j - 1] = int(value)
        return cls(arity, tuple(a) if a is not None else (0,) * arity, _freeze(rows))

    @property
    def is_identity(self) -> bool:
        return not any(self.a) and not any(any(row) for row in self.b)

    def entries(self) -> dict:
        return {(i + 1, j + 1): self.b[i][j] for i in range(self.arity) for j in range(i + 1, self.arity) if self.b[i][j]}

    def alternating(self) -> List[List[int]]:
        """The antisymmetric completion B - B^T."""
        k = self.arity
        return [[self.b[i][j] - self.b[j][i] for j in range(k)] for i in range(k)]

    def _collect(self, letters: Sequence[Tuple[int, int]], b_extra: Optional[Matrix] = None) -> "Class2Signature":
        k = self.arity
        collected = list(self.a)
        rows = [list(row) for row in self.b]
        if b_extra is not None:
            for i in range(k):
                for j in range(i + 1, k):
                    rows[i][j] += b_extra[i][j]
        for index, exponent in letters:
            i = index - 1
            # moving x_i^e left past x_m^c_m (m > i) leaves [x_m, x_i]^(c_m e) = [x_i, x_m]^(-c_m e)
            for m in range(i + 1, k):
                if collected[m]:
                    rows[i][m] -= collected[m] * exponent
            collected[i] += exponent
        return Class2Signature(k, tuple(collected), _freeze(rows))

    def concat(self, other: "Class2Signature") -> "Class2Signature":
        """Signature of the product uv."""
        if other.arity != self.arity:
            raise WordError(f"cannot concatenate signatures of arity {self.arity} and {other.arity}")
        letters = [(i + 1, e) for i, e in enumerate(other.a) if e]
        return self._collect(letters, other.b)

    def power(self, n: int) -> "Class2Signature":
        k = self.arity
        pairs = n * (n - 1) // 2
        rows = _zeros(k)
        for i in range(k):
            for j in range(i + 1, k):
                rows[i][j] = n * self.b[i][j] - pairs * self.a[i] * self.a[j]
        return Class2Signature(k, tuple(n * x for x in self.a), _freeze(rows))

    def inverse(self) -> "Class2Signature":
        return self.power(-1)

    def padded(self, arity: int) -> "Class2Signature":
        if arity < self.arity:
            raise WordError(f"cannot shrink a signature from arity {self.arity} to {arity}")
        rows = _zeros(arity)
        for i in range(self.arity):
            for j in range(self.arity):
                rows[i][j] = self.b[i][j]
        return Class2Signature(arity, tuple(self.a) + (0,) * (arity - self.arity), _freeze(rows))


def commutator_signature(s: Class2Signature, t: Class2Signature) -> Class2Signature:
    return s.inverse().concat(t.inverse()).concat(s).concat(t)


def substitute(sig: Class2Signature, images: Sequence[Class2Signature]) -> Class2Signature:
    """
    Signature of w(phi(y)) where phi sends x_i to the element with signature images[i].
    """
    if len(images) != sig.arity:
        raise WordError(f"substitution needs {sig.arity} images, got {len(images)}")
    if not images:
        return sig
    target = images[0].arity
    result = Class2Signature.identity(target)
    for image, exponent in zip(images, sig.a):
        if exponent:
            result = result.concat(image.power(exponent))
    for (i, j), exponent in sorted(sig.entries().items()):
        result = result.concat(commutator_signature(images[i - 1], images[j - 1]).power(exponent))
    return result


def class2_signature(w: Word) -> Class2Signature:
    """Collects w into prod x_i^a_i * prod_{i<j} [x_i,x_j]^b_ij."""
    return Class2Signature.identity(w.arity)._collect(w.letters)


def signature_text(sig: Class2Signature) -> str:
    parts = [f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(sig.a) if e]
    parts += [f"[x{i},x{j}]" if e == 1 else f"[x{i},x{j}]^{e}" for (i, j), e in sorted(sig.entries().items())]
    return " ".join(parts) if parts else "1"


def signature_word(sig: Class2Signature) -> Word:
    """The word prod x_i^a_i * prod [x_i,x_j]^b_ij, with brackets expanded."""
    return parse_word(signature_text(sig), arity_hint=max(sig.arity, 1))


def _unit(k: int, i: int, scale: int = 1) -> Class2Signature:
    a = [0] * k
    a[i] = scale
    return Class2Signature(k, tuple(a), _freeze(_zeros(k)))


def _images_from_columns(u: Sequence[Sequence[int]], central: Optional[List[Matrix]] = None) -> Tuple[Class2Signature, ...]:
    # x_i -> prod_j y_j^(U_ji): the substitution matrix is U^T
    k = len(u)
    images = []
    for i in range(k):
        b = central[i] if central is not None else _freeze(_zeros(k))
        images.append(Class2Signature(k, tuple(u[j][i] for j in range(k)), b))
    return tuple(images)


@dataclass(frozen=True)
class NormalForm:
    kind: str
    prime: int
    exponents: Tuple[int, ...]
    divisors: Tuple[int, ...]
    source: Class2Signature
    transformed: Class2Signature
    witness: Matrix
    images: Tuple[Class2Signature, ...] = field(repr=False)

    def canonical_signature(self) -> Class2Signature:
        if self.kind == "type1":
            entries = {(2 * i + 1, 2 * i + 2): self.prime ** s for i, s in enumerate(self.exponents)}
            return Class2Signature.from_entries(self.source.arity, b=entries)
        return self.transformed

    def canonical_text(self) -> str:
        return signature_text(self.canonical_signature())

    def canonical_word(self) -> Word:
        return signature_word(self.canonical_signature())


def _alternating_form(matrix: List[List[int]]) -> Tuple[List[int], List[List[int]], List[List[int]]]:
    """
    Unimodular congruence U A U^T = diag([[0,e1],[-e1,0]], [[0,e2],[-e2,0]], ..., 0)
    with e1 | e2 | ... and e_i > 0. Returns (blocks, U, reduced A).
    """
    n = len(matrix)
    a = [row[:] for row in matrix]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for row in a:
            row[i], row[j] = row[j], row[i]

    def add(i, j, c):
        # row_i += c row_j and col_i += c col_j
        if c == 0:
            return
        for col in range(n):
            a[i][col] += c * a[j][col]
            u[i][col] += c * u[j][col]
        for row in a:
            row[i] += c * row[j]

    def negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for row in a:
            row[i] = -row[i]

    blocks = []
    k = 0
    while k < n - 1:
        entries = [(abs(a[i][j]), i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap(k, i)
        swap(k + 1, j)
        if a[k][k + 1] < 0:
            negate(k + 1)
        e = a[k][k + 1]
        changed = False
        for col in range(k + 2, n):
            add(col, k + 1, -(a[k][col] // e))
            add(col, k, a[k + 1][col] // e)
            if a[k][col] or a[k + 1][col]:
                changed = True
        if changed:
            continue
        offender = next(((r, c) for r in range(k + 2, n) for c in range(r + 1, n) if a[r][c] % e), None)
        if offender is not None:
            add(k, offender[0], 1)
            continue
        blocks.append(e)
        k += 2
    return blocks, u, a


def _require_prime(p: int):
    if not isinstance(p, int) or not isprime(p):
        raise PreconditionError(f"{p!r} is not a prime")


def reduce_type1(sig: Class2Signature, p: int) -> NormalForm:
    """
    Reduces a signature with zero exponent vector to [x1,x2]^(p^s1) ... [x_{2r-1},x_{2r}]^(p^sr).

    The paired elementary divisors e1 | e2 | ... of B - B^T come from a unimodular congruence
    U (B - B^T) U^T; the prime-to-p parts are dropped, which preserves fiber distributions on
    p-groups of class at most 2.
    """
    _require_prime(p)
    if any(sig.a):
        raise PreconditionError(f"type (1) reduction needs a zero exponent vector, got {list(sig.a)}")
    if sig.is_identity:
        raise PreconditionError("type (1) reduction needs a nonzero commutator matrix")

    original = sig.alternating()
    blocks, u, reduced = _alternating_form(original)
    k = sig.arity
    check = [[sum(u[i][r] * original[r][c] * u[j][c] for r in range(k) for c in range(k)) for j in range(k)] for i in range(k)]
    if check != reduced:
        raise OracleDisagreementError("congruence witness does not reproduce the block form")

    images = _images_from_columns(u)
    transformed = substitute(sig, images)
    expected = Class2Signature.from_entries(k, b={(2 * i + 1, 2 * i + 2): e for i, e in enumerate(blocks)})
    if transformed != expected:
        raise OracleDisagreementError(f"substitution gives {signature_text(transformed)}, expected {signature_text(expected)}")

    exponents = tuple(multiplicity(p, e) for e in blocks)
    logger.debug(f"type (1) reduction at p={p}: divisors {blocks} -> s={exponents}")
    return NormalForm("type1", p, exponents, tuple(blocks), sig, transformed, _freeze(u), images)


def normalize_type2_partial(sig: Class2Signature, p: int) -> NormalForm:
    """
    Moves a nonzero exponent vector to (d, 0, ..., 0), d = gcd(a), by unimodular substitutions, then
    reduces every commutator exponent modulo d through x1 -> x1 * (central element).

    Only s1 = v_p(d) is canonical; the residual commutator matrix is reported as is.
    """
    _require_prime(p)
    if not any(sig.a):
        raise PreconditionError("type (2) normalization needs a nonzero exponent vector")

    k = sig.arity
    current = sig
    # columns of u are the exponent vectors of the images of x_1..x_k
    u = [[int(i == j) for j in range(k)] for i in range(k)]

    def apply(images_rows):
        nonlocal current, u
        images = tuple(Class2Signature(k, tuple(row), _freeze(_zeros(k))) for row in images_rows)
        current = substitute(current, images)
        # new column i = sum_l old column l * row_i[l]
        u = [[sum(u[r][l] * images_rows[c][l] for l in range(k)) for c in range(k)] for r in range(k)]

    def identity_rows():
        return [[int(i == j) for j in range(k)] for i in range(k)]

    while sum(1 for x in current.a if x) > 1:
        pivot = min((abs(x), i) for i, x in enumerate(current.a) if x)[1]
        rows = identity_rows()
        for j, x in enumerate(current.a):
            if j != pivot and x:
                rows[pivot][j] -= x // current.a[pivot]
        apply(rows)
    pivot = next(i for i, x in enumerate(current.a) if x)
    if pivot != 0:
        rows = identity_rows()
        rows[0], rows[pivot] = rows[pivot], rows[0]
        apply(rows)
    if current.a[0] < 0:
        rows = identity_rows()
        rows[0][0] = -1
        apply(rows)

    d = current.a[0]
    shift = _zeros(k)
    for (i, j), value in current.entries().items():
        shift[i - 1][j - 1] = -(value // d)
    central = [_freeze(_zeros(k)) for _ in range(k)]
    central[0] = _freeze(shift)
    adjust = tuple(Class2Signature(k, _unit(k, i).a, central[i]) for i in range(k))
    current = substitute(current, adjust)

    # composite images: x_i -> y^(U column i) * (y1's central factor)^(U_0i)
    images = tuple(
        Class2Signature(k, tuple(u[j][i] for j in range(k)),
                        _freeze([[u[0][i] * shift[r][c] for c in range(k)] for r in range(k)]))
        for i in range(k)
    )
    if substitute(sig, images) != current:
        raise OracleDisagreementError("type (2) witness does not reproduce the transformed signature")

    s1 = multiplicity(p, d)
    logger.debug(f"type (2) partial normalization at p={p}: d={d}, s1={s1}")
    return NormalForm("type2_partial", p, (s1,), (d,), sig, current, _freeze(u), images)


def reduce_signature(sig: Class2Signature, p: int) -> NormalForm:
    """Dispatches to the type (1) reduction or the partial type (2) normalization."""
    if any(sig.a):
        return normalize_type2_partial(sig, p)
    return reduce_type1(sig, p)
