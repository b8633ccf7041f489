"""
Free-group words: the flattened letter representation, the text grammar and the named words.

Grammar (whitespace ignored between tokens):

    word   := factor*
    factor := base ("^" "-"? digits)?
    base   := "x" digits | "(" word ")" | "[" word "," word "]"

Empty input or "1" is the identity word. Commutators follow [u,v] = u^-1 v^-1 u v.
"""

import re
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import WordError, WordSyntaxError

logger = logging.getLogger(__name__)

Letter = Tuple[int, int]

# Composite bases raised to huge powers are expanded letter by letter.
MAX_WORD_LETTERS = 10 ** 6
# Brackets and parentheses nest at most this deep.
MAX_NESTING_DEPTH = 100

NAMED_WORD_KINDS = ("wk", "left_normed", "vn")

_TOKEN_RE = re.compile(r"\s*(?:(x)([0-9]+)|(\^)(-?)([0-9]+)|([\[\](),])|(\S))", re.ASCII)


@dataclass(frozen=True)
class Word:
    arity: int
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.arity < 0:
            raise WordError(f"arity must be non-negative, got {self.arity}")
        if self.letters and self.arity == 0:
            raise WordError("only the identity word may have arity 0")
        previous = None
        for index, exponent in self.letters:
            if not 1 <= index <= self.arity:
                raise WordError(f"generator index {index} outside 1..{self.arity}")
            if exponent == 0:
                raise WordError(f"zero exponent on x{index}")
            if index == previous:
                raise WordError(f"adjacent letters share generator x{index}; word is not freely reduced")
            previous = index

    @classmethod
    def from_letters(cls, arity: int, letters: Iterable[Letter]) -> "Word":
        """Freely reduces an arbitrary letter sequence."""
        return cls(arity, tuple(free_reduce(letters)))

    @classmethod
    def identity(cls, arity: int = 1) -> "Word":
        return cls(arity, ())

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def variables(self) -> List[int]:
        return sorted({index for index, _ in self.letters})

    def exponent_sums(self) -> List[int]:
        sums = [0] * self.arity
        for index, exponent in self.letters:
            sums[index - 1] += exponent
        return sums

    def with_arity(self, arity: int) -> "Word":
        used = max((index for index, _ in self.letters), default=0)
        if arity < used:
            raise WordError(f"arity {arity} is smaller than used generator index {used}")
        return Word(arity, self.letters)

    def __str__(self) -> str:
        return render_word(self)


def free_reduce(letters: Iterable[Letter]) -> List[Letter]:
    stack: List[Letter] = []
    for index, exponent in letters:
        if exponent == 0:
            continue
        if stack and stack[-1][0] == index:
            merged = stack[-1][1] + exponent
            stack.pop()
            if merged != 0:
                stack.append((index, merged))
        else:
            stack.append((index, exponent))
    return stack


def _inverse_letters(letters: Sequence[Letter]) -> List[Letter]:
    return [(index, -exponent) for index, exponent in reversed(letters)]


def _power_letters(letters: Sequence[Letter], exponent: int) -> List[Letter]:
    if len(letters) == 1:
        return [(letters[0][0], letters[0][1] * exponent)]
    block = list(letters) if exponent > 0 else _inverse_letters(letters)
    if len(block) * abs(exponent) > MAX_WORD_LETTERS:
        raise WordError(f"expanding a power of a {len(block)}-letter base to exponent {exponent} exceeds {MAX_WORD_LETTERS} letters")
    return free_reduce(block * abs(exponent))


def _commutator_letters(u: Sequence[Letter], v: Sequence[Letter]) -> List[Letter]:
    return free_reduce(_inverse_letters(u) + _inverse_letters(v) + list(u) + list(v))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        position = 0
        while position < len(text):
            if text[position:].strip() == "":
                break
            match = _TOKEN_RE.match(text, position)
            start = position + (len(match.group(0)) - len(match.group(0).lstrip()))
            if match.group(1):
                self.tokens.append(("gen", int(match.group(2)), start))
            elif match.group(3):
                self.tokens.append(("pow", (match.group(4), match.group(5)), start))
            elif match.group(6):
                self.tokens.append((match.group(6), None, start))
            elif match.group(7) == "^":
                raise WordSyntaxError("malformed exponent", start)
            else:
                raise WordSyntaxError(f"unexpected character {match.group(7)!r}", start)
            position = match.end()
        self.index = 0
        self.depth = 0

    def _peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _expect(self, kind: str):
        token = self._peek()
        if token is None:
            raise WordSyntaxError(f"expected {kind!r} but input ended", len(self.text))
        if token[0] != kind:
            raise WordSyntaxError(f"expected {kind!r}", token[2])
        self.index += 1
        return token

    def parse(self) -> List[Letter]:
        letters = self.word()
        token = self._peek()
        if token is not None:
            raise WordSyntaxError(f"unexpected {token[0]!r}", token[2])
        return letters

    def word(self) -> List[Letter]:
        letters: List[Letter] = []
        while True:
            token = self._peek()
            if token is None or token[0] not in ("gen", "(", "["):
                if token is not None and token[0] == "pow":
                    raise WordSyntaxError("exponent without a base", token[2])
                return letters
            letters = free_reduce(letters + self.factor())

    def factor(self) -> List[Letter]:
        base = self.base()
        token = self._peek()
        if token is not None and token[0] == "pow":
            self.index += 1
            sign, digits = token[1]
            exponent = int(digits)
            if exponent == 0:
                raise WordSyntaxError("zero exponent", token[2])
            if sign:
                exponent = -exponent
            if not base:
                return []
            return _power_letters(base, exponent)
        return base

    def base(self) -> List[Letter]:
        token = self._peek()
        if token[0] == "gen":
            self.index += 1
            if token[1] == 0:
                raise WordSyntaxError("generator indices start at x1", token[2])
            return [(token[1], 1)]
        if self.depth >= MAX_NESTING_DEPTH:
            raise WordSyntaxError(f"brackets nest deeper than {MAX_NESTING_DEPTH} levels", token[2])
        self.depth += 1
        try:
            return self._bracketed(token)
        finally:
            self.depth -= 1

    def _bracketed(self, token) -> List[Letter]:
        if token[0] == "(":
            self.index += 1
            inner = self.word()
            self._expect(")")
            return inner
        self._expect("[")
        left = self.word()
        self._expect(",")
        right = self.word()
        self._expect("]")
        return _commutator_letters(left, right)


def parse_word(text: str, arity_hint: Optional[int] = None) -> Word:
    """
    Parses the word grammar into a freely reduced Word.

    The arity is the largest generator index mentioned (even inside cancelled letters) or
    `arity_hint` when that is larger.
    """
    stripped = text.strip()
    mentioned = [int(m) for m in re.findall(r"x([0-9]+)", stripped)]
    if stripped in ("", "1"):
        letters: List[Letter] = []
    else:
        letters = _Parser(text).parse()
    used = max(mentioned, default=0)
    if arity_hint is not None:
        if arity_hint < 1:
            raise WordError(f"arity_hint must be positive, got {arity_hint}")
        if arity_hint < used:
            raise WordError(f"arity_hint {arity_hint} is smaller than used generator index {used}")
    arity = max(used, arity_hint or 0, 1)
    return Word(arity, tuple(letters))


def render_word(w: Word) -> str:
    if w.is_identity:
        return "1"
    return " ".join(f"x{index}" if exponent == 1 else f"x{index}^{exponent}" for index, exponent in w.letters)


def invert_word(w: Word) -> Word:
    return Word(w.arity, tuple(_inverse_letters(w.letters)))


def concat_words(u: Word, v: Word) -> Word:
    return Word.from_letters(max(u.arity, v.arity), list(u.letters) + list(v.letters))


def shift_word(w: Word, offset: int) -> Word:
    """Renames x_i to x_{i+offset}."""
    return Word(w.arity + offset, tuple((index + offset, exponent) for index, exponent in w.letters))


def build_named_word(kind: str, n: int) -> Word:
    """
    Builds w_k = [x1,x2]...[x_{2n-1},x_{2n}] ("wk"), the left-normed commutator [x1,...,xn]
    ("left_normed") or v_n = x1...xn x1^-1...xn^-1 ("vn").
    """
    if kind not in NAMED_WORD_KINDS:
        raise WordError(f"unknown named word {kind!r}; expected one of {', '.join(NAMED_WORD_KINDS)}")
    if n < 1:
        raise WordError(f"named word {kind} needs n >= 1, got {n}")
    if kind == "wk":
        letters: List[Letter] = []
        for i in range(n):
            letters += _commutator_letters([(2 * i + 1, 1)], [(2 * i + 2, 1)])
        return Word.from_letters(2 * n, letters)
    if kind == "left_normed":
        letters = [(1, 1)]
        for i in range(2, n + 1):
            letters = _commutator_letters(letters, [(i, 1)])
        return Word.from_letters(n, letters)
    forward = [(i, 1) for i in range(1, n + 1)]
    return Word.from_letters(n, forward + [(i, -1) for i in range(1, n + 1)])


def parse_named_word(spec: str) -> Word:
    """Parses "wk:2", "left_normed:3" or "vn:4"."""
    kind, _, count = spec.partition(":")
    if not count.strip().isdigit():
        raise WordError(f"named word spec must look like kind:n, got {spec!r}")
    return build_named_word(kind.strip(), int(count))


def disjoint_blocks(w: Word) -> Tuple[List[Tuple[Word, List[int]]], int]:
    """
    Splits w = u_1 u_2 ... into consecutive factors on pairwise disjoint variable sets.

    Returns the factors, each renumbered to x1..x_m together with the original indices it uses,
    and the number of declared variables no letter mentions.
    """
    letters = w.letters
    blocks: List[Tuple[Word, List[int]]] = []
    last_seen = {}
    for position, (index, _) in enumerate(letters):
        last_seen[index] = position
    start = 0
    reach = -1
    for position, (index, _) in enumerate(letters):
        reach = max(reach, last_seen[index])
        if reach == position:
            segment = letters[start:position + 1]
            used = sorted({i for i, _ in segment})
            renumber = {old: new for new, old in enumerate(used, start=1)}
            blocks.append((Word(len(used), tuple((renumber[i], e) for i, e in segment)), used))
            start = position + 1
    unused = w.arity - len({index for index, _ in letters})
    return blocks, unused
