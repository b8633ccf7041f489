"""
Machine-checkable verdicts for (group, word) pairs.

Conjectures (amit, generalized_amit) may fail; the report then carries a replayable
counterexample. Proven statements whose hypotheses hold act as oracles: a failure raises
TheoremViolationError instead of producing a report line.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Union

import numpy as np
from sympy import isprime

from .characters import (
    ClassFunctionKind,
    character_table,
    classify_class_function,
    closed_form_wk_two_degree,
    fourier_coefficients,
    frobenius_count_wk,
    is_central_type,
)
from .errors import CharacterTableError, OracleDisagreementError, PreconditionError, TheoremViolationError
from .fibers import FiberDistribution, count_auto
from .groups import FiniteGroup, direct_product, group_document
from .signatures import class2_signature
from .structure import (
    center,
    coprime_exponents,
    derived_subgroup,
    is_class_at_most_2,
    is_nilpotent,
    prime_base,
)
from .words import Word, build_named_word, render_word

logger = logging.getLogger(__name__)

BOUND_MODES = ("amit", "generalized_amit", "thmA", "thmB", "solomon")
CONJECTURE_MODES = ("amit", "generalized_amit")

Bound = Union[int, Fraction]


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


@dataclass
class VerificationReport:
    claim: str
    group: str
    word: str
    verdict: Verdict
    margins: List[Dict[str, str]] = field(default_factory=list)
    counterexample: Optional[Dict[str, object]] = None
    method: str = ""
    budget: int = 0
    hypothesis: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict != Verdict.FAILS

    def to_dict(self) -> dict:
        data = asdict(self)
        data["verdict"] = self.verdict.value
        return data

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, separators=(",", ":"))


def _margin(G: FiniteGroup, g: int, count: int, bound: Bound) -> Dict[str, str]:
    return {"element": G.label(g), "count": str(count), "bound": str(bound)}


def _counterexample(G: FiniteGroup, w: Word, g: int, count: int, bound: Bound, **extra) -> Dict[str, object]:
    data = {
        "element": G.label(g),
        "handle": int(g),
        "count": str(count),
        "bound": str(bound),
        "word": render_word(w),
        "group_document": group_document(G),
    }
    data.update(extra)
    return data


def _not_applicable(claim: str, G: FiniteGroup, word: str, hypothesis: str) -> VerificationReport:
    logger.info(f"{claim} on {G.name} / {word}: not applicable ({hypothesis})")
    return VerificationReport(claim, G.name, word, Verdict.NOT_APPLICABLE, hypothesis=hypothesis)


def _finish(report: VerificationReport, theorem: bool) -> VerificationReport:
    logger.info(f"{report.claim} on {report.group} / {report.word}: {report.verdict.value}")
    if theorem and report.verdict == Verdict.FAILS:
        raise TheoremViolationError(f"{report.claim} violated on {report.group} for {report.word}", report)
    return report


def _pad(w: Word, arity: int) -> Word:
    return w.with_arity(max(w.arity, arity))


def _center_forces_bound(G: FiniteGroup, w: Word) -> bool:
    """p-group of class <= 2, exponent sums all zero and |Z|^2 <= |G|."""
    if prime_base(G) is None or not is_class_at_most_2(G) or w.is_identity:
        return False
    if any(class2_signature(w).a):
        return False
    return center(G).order ** 2 <= G.order


def verify_bounds(G: FiniteGroup, w: Word, mode: str, *, budget: Optional[int] = None,
                  workers: Optional[int] = None) -> VerificationReport:
    """
    amit: N(1) >= |G|^(k-1); generalized_amit: N(g) >= |G|^(k-1) on G_w (nilpotent G);
    thmA: N(g) >= |G| on G_w (class <= 2, two variables); thmB: N(g) >= |G|^(k-2) on G_w
    (class <= 2, odd order); solomon: N(g) >= |G| on Z(G) cap G_w (nilpotent, two variables).
    """
    if mode not in BOUND_MODES:
        raise PreconditionError(f"unknown bound mode {mode!r}; expected one of {', '.join(BOUND_MODES)}")
    text = render_word(w)
    notes: List[str] = []
    if mode in ("amit", "generalized_amit", "solomon") and not is_nilpotent(G):
        return _not_applicable(mode, G, text, "G is not nilpotent")
    if mode in ("thmA", "thmB") and not is_class_at_most_2(G):
        return _not_applicable(mode, G, text, "G has nilpotency class > 2")
    if mode in ("thmA", "solomon"):
        if w.arity > 2:
            return _not_applicable(mode, G, text, f"word has {w.arity} variables, the bound is for two")
        if w.arity < 2:
            notes.append(f"arity padded from {w.arity} to 2")
            w = _pad(w, 2)
    if mode == "thmB" and G.order % 2 == 0:
        return _not_applicable(mode, G, text, f"|G| = {G.order} is even")

    d = count_auto(G, w, budget=budget, workers=workers)
    k = w.arity
    if mode in ("amit", "generalized_amit"):
        bound: Bound = G.order ** (k - 1) if k >= 1 else Fraction(1, G.order)
    elif mode == "thmB":
        bound = Fraction(G.order) ** (k - 2)
        bound = int(bound) if bound.denominator == 1 else bound
    else:
        bound = G.order

    if mode == "amit":
        checked = [0]
    elif mode == "solomon":
        z = set(center(G).elements)
        checked = [g for g in d.support() if g in z]
    else:
        checked = d.support()

    theorem = mode not in CONJECTURE_MODES
    if mode in CONJECTURE_MODES and _center_forces_bound(G, w):
        notes.append("exponent sums vanish and |Z|^2 <= |G|: the generalized bound is forced")
        theorem = True
    elif mode in CONJECTURE_MODES and not w.is_identity and not any(class2_signature(w).a) and is_class_at_most_2(G):
        if prime_base(G) is None:
            notes.append("G is not a p-group: sufficient condition not met")
        else:
            notes.append(f"|Z|^2 = {center(G).order ** 2} > |G| = {G.order}: sufficient condition not met")

    report = VerificationReport(mode, G.name, text, Verdict.HOLDS, method=d.method, budget=d.evaluations, notes=notes)
    for g in checked:
        count = d.counts[g]
        report.margins.append(_margin(G, g, count, bound))
        if count < bound and report.counterexample is None:
            report.verdict = Verdict.FAILS
            report.counterexample = _counterexample(G, w, g, count, bound)
    return _finish(report, theorem)


def verify_theorem_C(G: FiniteGroup, k: int, *, budget: Optional[int] = None,
                     workers: Optional[int] = None) -> VerificationReport:
    """
    For p-groups with exactly two character degrees: G_wk = G', exactly two fiber sizes on G'
    with N(1) the larger, and every fiber on G' at least |G|^(2k-1). Cross-checked against the
    Frobenius sum and the closed form.
    """
    w = build_named_word("wk", k)
    text = render_word(w)
    claim = "thmC"
    if prime_base(G) is None:
        return _not_applicable(claim, G, text, f"|G| = {G.order} is not a prime power")
    try:
        table = character_table(G)
    except CharacterTableError as e:
        return _not_applicable(claim, G, text, f"character table unavailable: {e}")
    if len(table.degree_set) != 2:
        return _not_applicable(claim, G, text, f"cd(G) = {set(table.degree_set)} does not have two elements")

    d = count_auto(G, w, budget=budget, workers=workers)
    frobenius = frobenius_count_wk(table, k)
    if frobenius.counts != d.counts:
        raise OracleDisagreementError(f"{G.name}: Frobenius sum and {d.method} count disagree for {text}")
    derived = derived_subgroup(G)
    n_one, n_other = closed_form_wk_two_degree(G.order, derived.order, table.m, k)
    nontrivial = [g for g in derived.elements if g != 0]
    if d.counts[0] != n_one or any(d.counts[g] != n_other for g in nontrivial):
        raise OracleDisagreementError(f"{G.name}: closed form ({n_one}, {n_other}) disagrees with the counted fibers")

    bound = G.order ** (2 * k - 1)
    report = VerificationReport(claim, G.name, text, Verdict.HOLDS, method=f"{d.method}+frobenius+closed_form",
                                budget=d.evaluations)
    report.notes.append(f"cd(G) = {list(table.degree_set)}, |G'| = {derived.order}")
    if d.support() != list(derived.elements):
        report.verdict = Verdict.FAILS
        outside = next(g for g in d.support() if g not in set(derived.elements))
        report.counterexample = _counterexample(G, w, outside, d.counts[outside], bound, reason="support differs from G'")
    sizes = {d.counts[g] for g in derived.elements}
    if len(sizes) != 2 or d.counts[0] != max(sizes):
        report.verdict = Verdict.FAILS
        report.counterexample = report.counterexample or _counterexample(
            G, w, 0, d.counts[0], bound, reason=f"fiber sizes on G' are {sorted(sizes)}")
    for g in derived.elements:
        report.margins.append(_margin(G, g, d.counts[g], bound))
        if d.counts[g] < bound and report.counterexample is None:
            report.verdict = Verdict.FAILS
            report.counterexample = _counterexample(G, w, g, d.counts[g], bound)
    return _finish(report, theorem=True)


def verify_corollary_D(G: FiniteGroup, k: int, *, budget: Optional[int] = None,
                       workers: Optional[int] = None) -> VerificationReport:
    """Class-2 groups with |G'| = p: N_wk(g) >= |G|^(2k-1) for every g in G'."""
    w = build_named_word("wk", k)
    text = render_word(w)
    claim = "corD"
    if not is_class_at_most_2(G):
        return _not_applicable(claim, G, text, "G has nilpotency class > 2")
    derived = derived_subgroup(G)
    if not isprime(derived.order):
        return _not_applicable(claim, G, text, f"|G'| = {derived.order} is not a prime")
    d = count_auto(G, w, budget=budget, workers=workers)
    bound = G.order ** (2 * k - 1)
    report = VerificationReport(claim, G.name, text, Verdict.HOLDS, method=d.method, budget=d.evaluations)
    try:
        report.notes.append(f"central type: {is_central_type(character_table(G))}")
    except CharacterTableError as e:
        report.notes.append(f"central type not checked: {e}")
    for g in derived.elements:
        report.margins.append(_margin(G, g, d.counts[g], bound))
        if d.counts[g] < bound and report.counterexample is None:
            report.verdict = Verdict.FAILS
            report.counterexample = _counterexample(G, w, g, d.counts[g], bound)
    return _finish(report, theorem=True)


def _power_map_failure(d: FiberDistribution):
    G = d.group
    counts = d.array()
    for e in coprime_exponents(G):
        image = G.power_map(e)
        bad = np.nonzero(counts != counts[image])[0]
        if bad.size:
            return int(bad[0]), e
    return None


def check_rationality(G: FiniteGroup, w: Word, *, budget: Optional[int] = None,
                      workers: Optional[int] = None) -> VerificationReport:
    """N(g) = N(g^e) for all e coprime to |G|, with e taken modulo the exponent of G."""
    d = count_auto(G, w, budget=budget, workers=workers)
    exponents = coprime_exponents(G)
    report = VerificationReport("rational", G.name, render_word(w), Verdict.HOLDS, method=d.method,
                                budget=d.evaluations, notes=[f"exponents tested: {exponents}"])
    failure = _power_map_failure(d)
    if failure is not None:
        g, e = failure
        image = int(G.power_map(e)[g])
        report.verdict = Verdict.FAILS
        report.counterexample = _counterexample(G, w, g, d.counts[g], d.counts[image], exponent=e,
                                                power=G.label(image))
    return _finish(report, theorem=is_class_at_most_2(G))


def is_weakly_rational(d: FiberDistribution) -> bool:
    """G_w closed under every coprime power map."""
    support = np.array(d.counts, dtype=object) != 0
    return all(support[d.group.power_map(e)][support].all() for e in coprime_exponents(d.group))


def check_chirality(G: FiniteGroup, w: Word, *, budget: Optional[int] = None,
                    workers: Optional[int] = None) -> VerificationReport:
    """Claim "achiral": G_w = G_w^-1. Also reports weak rationality."""
    d = count_auto(G, w, budget=budget, workers=workers)
    support = set(d.support())
    inverses = G.inverses()
    report = VerificationReport("achiral", G.name, render_word(w), Verdict.HOLDS, method=d.method, budget=d.evaluations)
    report.notes.append(f"weakly rational: {is_weakly_rational(d)}")
    for g in sorted(support):
        if int(inverses[g]) not in support:
            report.verdict = Verdict.FAILS
            report.counterexample = _counterexample(G, w, g, d.counts[g], 0, inverse=G.label(int(inverses[g])))
            break
    return _finish(report, theorem=is_class_at_most_2(G))


def check_product_multiplicativity(H: FiniteGroup, K: FiniteGroup, w: Word, *, budget: Optional[int] = None,
                                   workers: Optional[int] = None) -> VerificationReport:
    """N_{w,HxK}((h,k)) = N_{w,H}(h) N_{w,K}(k)."""
    G = direct_product(H, K)
    dG = count_auto(G, w, budget=budget, workers=workers)
    dH = count_auto(H, w, budget=budget, workers=workers)
    dK = count_auto(K, w, budget=budget, workers=workers)
    report = VerificationReport("product", G.name, render_word(w), Verdict.HOLDS, method=dG.method,
                                budget=dG.evaluations + dH.evaluations + dK.evaluations)
    for g in range(G.order):
        h, k = divmod(g, K.order)
        expected = dH.counts[h] * dK.counts[k]
        if dG.counts[g]:
            report.margins.append({"element": G.label(g), "count": str(dG.counts[g]), "bound": str(expected)})
        if dG.counts[g] != expected and report.counterexample is None:
            report.verdict = Verdict.FAILS
            report.counterexample = _counterexample(G, w, g, dG.counts[g], expected)
    return _finish(report, theorem=True)


def check_uniformity_surjective(G: FiniteGroup, w: Word, *, budget: Optional[int] = None,
                                workers: Optional[int] = None) -> VerificationReport:
    """A surjective word map on a nilpotent group has every fiber of size |G|^(k-1)."""
    text = render_word(w)
    if not is_nilpotent(G):
        return _not_applicable("uniform", G, text, "G is not nilpotent")
    d = count_auto(G, w, budget=budget, workers=workers)
    if len(d.support()) != G.order:
        report = _not_applicable("uniform", G, text, f"word map is not surjective (|G_w| = {len(d.support())})")
        report.method, report.budget = d.method, d.evaluations
        return report
    expected = G.order ** (w.arity - 1)
    report = VerificationReport("uniform", G.name, text, Verdict.HOLDS, method=d.method, budget=d.evaluations)
    report.notes.append(f"uniform count {expected}")
    for g, count in enumerate(d.counts):
        if count != expected:
            report.verdict = Verdict.FAILS
            report.counterexample = _counterexample(G, w, g, count, expected)
            break
    return _finish(report, theorem=True)


def verify_character_property(G: FiniteGroup, w: Word, *, budget: Optional[int] = None,
                              workers: Optional[int] = None) -> VerificationReport:
    """
    On class-2 p-groups N_w is a generalized character, and a character when p is odd.
    """
    text = render_word(w)
    p = prime_base(G)
    if p is None or not is_class_at_most_2(G):
        return _not_applicable("gchar", G, text, "G is not a p-group of class <= 2")
    d = count_auto(G, w, budget=budget, workers=workers)
    decomposition = fourier_coefficients(d, character_table(G))
    kind = classify_class_function(decomposition)
    report = VerificationReport("gchar", G.name, text, Verdict.HOLDS, method=d.method, budget=d.evaluations)
    report.notes.append(f"kind: {kind.value}")
    report.margins = [{"element": f"chi{i}", "count": str(c), "bound": "integer"}
                      for i, c in enumerate(decomposition.coefficients)]
    required = ClassFunctionKind.CHARACTER if p != 2 else ClassFunctionKind.GENERALIZED_CHARACTER
    acceptable = {ClassFunctionKind.CHARACTER} if p != 2 else {ClassFunctionKind.CHARACTER, ClassFunctionKind.GENERALIZED_CHARACTER}
    if kind not in acceptable:
        report.verdict = Verdict.FAILS
        index = next(i for i, c in enumerate(decomposition.coefficients) if c.denominator != 1 or c < 0)
        report.counterexample = {"character": index, "coefficient": str(decomposition.coefficients[index]),
                                 "required": required.value, "word": text, "group_document": group_document(G)}
    return _finish(report, theorem=True)


CLAIMS: Dict[str, str] = {
    "amit": "N_w(1) >= |G|^(k-1) on nilpotent groups",
    "gamit": "N_w(g) >= |G|^(k-1) on G_w for nilpotent groups",
    "thmA": "two-variable words on class-2 groups: N_w(g) >= |G| on G_w",
    "thmB": "class-2 groups of odd order: N_w(g) >= |G|^(k-2) on G_w",
    "thmC": "two-degree p-groups: w_k has exactly two fiber sizes on G' = G_wk, all >= |G|^(2k-1)",
    "rational": "N_w(g) = N_w(g^e) for e coprime to |G|",
    "chiral": "G_w = G_w^-1 (achirality), with weak rationality",
    "product": "N_w is multiplicative over direct products",
    "uniform": "surjective word maps on nilpotent groups are uniform",
    "solomon": "two-variable words on nilpotent groups: N_w(g) >= |G| on Z(G) cap G_w",
    "corD": "class-2 groups with |G'| = p: N_wk(g) >= |G|^(2k-1) on G'",
    "gchar": "class-2 p-groups: N_w is a generalized character (a character for odd p)",
}

_BOUND_CLAIMS = {"amit": "amit", "gamit": "generalized_amit", "thmA": "thmA", "thmB": "thmB", "solomon": "solomon"}


def verify_claim(claim: str, G: FiniteGroup, w: Optional[Word] = None, *, k: Optional[int] = None,
                 other: Optional[FiniteGroup] = None, budget: Optional[int] = None,
                 workers: Optional[int] = None) -> VerificationReport:
    """Dispatches a claim name to its verifier."""
    options = {"budget": budget, "workers": workers}
    if claim in ("thmC", "corD"):
        if k is None:
            raise PreconditionError(f"{claim} needs k")
        verifier = verify_theorem_C if claim == "thmC" else verify_corollary_D
        return verifier(G, k, **options)
    if claim not in CLAIMS:
        raise PreconditionError(f"unknown claim {claim!r}; expected one of {', '.join(CLAIMS)}")
    if w is None:
        if k is None:
            raise PreconditionError(f"{claim} needs a word")
        w = build_named_word("wk", k)
    if claim in _BOUND_CLAIMS:
        return verify_bounds(G, w, _BOUND_CLAIMS[claim], **options)
    if claim == "product":
        if other is None:
            raise PreconditionError("product needs a second group")
        return check_product_multiplicativity(G, other, w, **options)
    checks: Dict[str, Callable[..., VerificationReport]] = {
        "rational": check_rationality,
        "chiral": check_chirality,
        "uniform": check_uniformity_surjective,
        "gchar": verify_character_property,
    }
    return checks[claim](G, w, **options)
