"""
Named groups. Names follow `name(comma-separated params)`, e.g. "heisenberg(3)" or
"extraspecial(2,1,-)".

Presentations used for the extraspecial family (generators x1, y1, ..., xn, yn, z with
[x_i, y_i] = z central):

- p odd, "+": exponent p.             p odd, "-": x1^p = z.
- p = 2,  "+": y_i^2 = z (n copies of D4 amalgamated over z).
- p = 2,  "-": as "+" with additionally x1^2 = z (one D4 replaced by Q8).
"""

import re
import logging
from functools import lru_cache
from itertools import permutations
from typing import Dict, List, Tuple

import numpy as np
from sympy import isprime

from .config import MAX_GROUP_ORDER
from .errors import CatalogError, GroupValidationError
from .groups import CayleyGroup, FiniteGroup, PcClass2Group, load_group_file

logger = logging.getLogger(__name__)

_SPEC_RE = re.compile(r"^\s*([a-z][a-z0-9_]*)\s*(?:\((.*)\))?\s*$")

CATALOG_ENTRIES: Dict[str, str] = {
    "cyclic(n)": "cyclic group of order n",
    "q8": "quaternion group of order 8",
    "d4": "dihedral group of order 8 (polycyclic)",
    "heisenberg(p)": "Heisenberg group of order p^3 (unitriangular 3x3 over F_p)",
    "extraspecial(p,n,+|-)": "extraspecial group of order p^(2n+1)",
    "modular16": "modular group M16 = <a,b | a^8, b^2, bab = a^5>",
    "free_class2_exp_p(d,p)": "free class-2 group on d generators of order p, order p^(d + d(d-1)/2)",
    "symmetric(n)": "symmetric group on n <= 6 points (Cayley table)",
    "dihedral(n)": "dihedral group of order 2n (Cayley table)",
}

# Groups swept by the class-2 sweeps in tests and the CLI.
CLASS2_SAMPLES = (
    "cyclic(4)",
    "cyclic(6)",
    "q8",
    "d4",
    "heisenberg(3)",
    "extraspecial(2,2,+)",
    "extraspecial(2,2,-)",
    "extraspecial(3,1,-)",
    "modular16",
    "free_class2_exp_p(3,2)",
)


def parse_catalog_spec(spec: str) -> Tuple[str, Tuple[object, ...]]:
    match = _SPEC_RE.match(spec or "")
    if not match:
        raise CatalogError(f"malformed catalog name {spec!r}")
    name, raw = match.group(1), match.group(2)
    params: List[object] = []
    if raw is not None and raw.strip():
        for part in raw.split(","):
            part = part.strip()
            if part in ("+", "-"):
                params.append(part)
            elif re.fullmatch(r"-?[0-9]+", part):
                params.append(int(part))
            else:
                raise CatalogError(f"bad parameter {part!r} in {spec!r}")
    return name, tuple(params)


def catalog(name: str, *params) -> FiniteGroup:
    """
    Returns a catalog group, e.g. catalog("heisenberg", 3) or catalog("heisenberg(3)").
    """
    if not params and "(" in name:
        name, params = parse_catalog_spec(name)
    else:
        name = name.strip()
    return _build(name, tuple(params))


def _matches(value, kind: str) -> bool:
    if kind == "s":
        return value in ("+", "-")
    return isinstance(value, int) and not isinstance(value, bool)


def _expect(name: str, params: tuple, kinds: str):
    if len(params) != len(kinds) or not all(_matches(v, k) for v, k in zip(params, kinds)):
        shape = ",".join("int" if k == "i" else "+|-" for k in kinds)
        raise CatalogError(f"{name} expects parameters ({shape}), got {params}")


def _prime(name: str, p: int):
    if not isprime(p):
        raise CatalogError(f"{name}: {p} is not a prime")


def _size(name: str, order: int):
    if order > MAX_GROUP_ORDER:
        raise CatalogError(f"{name}: order {order} exceeds the supported size {MAX_GROUP_ORDER}")


def _unit(n: int, *indices: int) -> List[int]:
    vector = [0] * n
    for i in indices:
        vector[i] = 1
    return vector


@lru_cache(maxsize=None)
def _build(name: str, params: tuple) -> FiniteGroup:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise CatalogError(f"unknown catalog group {name!r}; known: {', '.join(CATALOG_ENTRIES)}")
    try:
        group = builder(params)
    except GroupValidationError as e:
        raise CatalogError(f"{name}{params}: {e}")
    logger.info(f"Built catalog group {group.name} of order {group.order}")
    return group


def _cyclic(params) -> FiniteGroup:
    _expect("cyclic", params, "i")
    n = params[0]
    if n < 1:
        raise CatalogError(f"cyclic: order must be positive, got {n}")
    _size("cyclic", n)
    if n == 1:
        return CayleyGroup("cyclic(1)", [[0]])
    return PcClass2Group(f"cyclic({n})", [n], generator_names=["a"])


def _q8(params) -> FiniteGroup:
    _expect("q8", params, "")
    return PcClass2Group("q8", [2, 2, 2], {0: [0, 0, 1], 1: [0, 0, 1]}, {(0, 1): [0, 0, 1]},
                         generator_names=["a", "b", "c"])


def _d4(params) -> FiniteGroup:
    _expect("d4", params, "")
    return PcClass2Group("d4", [2, 2, 2], {1: [0, 0, 1]}, {(0, 1): [0, 0, 1]},
                         generator_names=["s", "r", "c"])


def _heisenberg(params) -> FiniteGroup:
    _expect("heisenberg", params, "i")
    p = params[0]
    _prime("heisenberg", p)
    _size("heisenberg", p ** 3)
    return PcClass2Group(f"heisenberg({p})", [p, p, p], {}, {(0, 1): [0, 0, 1]}, generator_names=["x", "y", "z"])


def _extraspecial(params) -> FiniteGroup:
    _expect("extraspecial", params, "iis")
    p, n, sign = params
    _prime("extraspecial", p)
    if n < 1:
        raise CatalogError(f"extraspecial: n must be positive, got {n}")
    _size("extraspecial", p ** (2 * n + 1))
    rank = 2 * n + 1
    z = rank - 1
    powers: Dict[int, List[int]] = {}
    if p == 2:
        for i in range(n):
            powers[2 * i + 1] = _unit(rank, z)
    if sign == "-":
        powers[0] = _unit(rank, z)
    commutators = {(2 * i, 2 * i + 1): _unit(rank, z) for i in range(n)}
    names = [f"{letter}{i + 1}" for i in range(n) for letter in ("x", "y")] + ["z"]
    return PcClass2Group(f"extraspecial({p},{n},{sign})", [p] * rank, powers, commutators, generator_names=names)


def _modular16(params) -> FiniteGroup:
    _expect("modular16", params, "")
    # generators b, a, a^2, a^4
    return PcClass2Group("modular16", [2, 2, 2, 2], {1: [0, 0, 1, 0], 2: [0, 0, 0, 1]}, {(0, 1): [0, 0, 0, 1]},
                         generator_names=["b", "a", "a2", "a4"])


def _free_class2(params) -> FiniteGroup:
    _expect("free_class2_exp_p", params, "ii")
    d, p = params
    _prime("free_class2_exp_p", p)
    if d < 1:
        raise CatalogError(f"free_class2_exp_p: d must be positive, got {d}")
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    rank = d + len(pairs)
    _size("free_class2_exp_p", p ** rank)
    commutators = {(i, j): _unit(rank, d + k) for k, (i, j) in enumerate(pairs)}
    names = [f"x{i + 1}" for i in range(d)] + [f"c{i + 1}{j + 1}" for i, j in pairs]
    return PcClass2Group(f"free_class2_exp_p({d},{p})", [p] * rank, {}, commutators, generator_names=names)


def _symmetric(params) -> FiniteGroup:
    _expect("symmetric", params, "i")
    n = params[0]
    if not 1 <= n <= 6:
        raise CatalogError(f"symmetric: n must lie in 1..6, got {n}")
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    # (gh)(x) = h(g(x))
    composed = np.take_along_axis(perms[None, :, :].repeat(len(perms), axis=0),
                                  perms[:, None, :].repeat(len(perms), axis=1), axis=2)
    codes = perms @ (n ** np.arange(n - 1, -1, -1))
    table = np.searchsorted(codes, composed @ (n ** np.arange(n - 1, -1, -1)))
    labels = ["".join(str(x + 1) for x in perm) for perm in perms]
    return CayleyGroup(f"symmetric({n})", table, element_labels=labels)


def _dihedral(params) -> FiniteGroup:
    _expect("dihedral", params, "i")
    n = params[0]
    if n < 1:
        raise CatalogError(f"dihedral: n must be positive, got {n}")
    _size("dihedral", 2 * n)
    # handle i + n*j stands for r^i s^j; (r^a s^b)(r^c s^d) = r^(a + (-1)^b c) s^(b+d)
    handles = np.arange(2 * n)
    a, b = handles % n, handles // n
    rot = (a[:, None] + np.where(b[:, None] == 1, -1, 1) * a[None, :]) % n
    ref = (b[:, None] + b[None, :]) % 2
    labels = [" ".join(filter(None, [f"r^{i}" if i else "", "s" if j else ""])) or "1" for j in range(2) for i in range(n)]
    return CayleyGroup(f"dihedral({n})", rot + n * ref, element_labels=labels)


_BUILDERS = {
    "cyclic": _cyclic,
    "q8": _q8,
    "d4": _d4,
    "heisenberg": _heisenberg,
    "extraspecial": _extraspecial,
    "modular16": _modular16,
    "free_class2_exp_p": _free_class2,
    "symmetric": _symmetric,
    "dihedral": _dihedral,
}


def resolve_group(source: str) -> FiniteGroup:
    """Resolves "catalog:NAME(args)" or "file:PATH"; a bare name is looked up in the catalog."""
    kind, sep, rest = source.partition(":")
    if sep and kind == "file":
        return load_group_file(rest)
    if sep and kind == "catalog":
        return catalog(rest)
    if not sep:
        return catalog(source)
    raise CatalogError(f"group source must be catalog:NAME or file:PATH, got {source!r}")
