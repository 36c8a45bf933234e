#!/usr/bin/env python3
"""
Code Alphabet Component
Six code letters, their edge incidences, the two letter digraphs and the
word-level symmetries (bar, rotation, complement, Z statistic, letter swap F)

Positions are 1-based in messages; position 1 is the top row and the most
significant bit of a binary word's integer index.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, NamedTuple, Optional, Tuple, Union

from core.errors import InvalidArgumentError, InvalidWordError

# Bumped whenever the letter/edge table changes; part of the matrix cache key
LETTER_TABLE_VERSION = "1"


class ColumnKind(Enum):
    """Whether a column induces a path (linear) or a cycle (circular)"""

    LINEAR = "linear"
    CIRCULAR = "circular"

    @classmethod
    def parse(cls, value: Union[str, "ColumnKind"]) -> "ColumnKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidArgumentError(f"Unknown column kind: {value!r} (expected linear or circular)")


class Incidence(NamedTuple):
    up: bool
    down: bool
    left: bool
    right: bool


_INCIDENCE = {
    "a": Incidence(up=False, down=True, left=False, right=True),
    "b": Incidence(up=True, down=True, left=False, right=False),
    "c": Incidence(up=True, down=False, left=False, right=True),
    "d": Incidence(up=False, down=True, left=True, right=False),
    "e": Incidence(up=False, down=False, left=True, right=True),
    "f": Incidence(up=True, down=False, left=True, right=False),
}

_BAR_SYMBOL = {"a": "c", "b": "b", "c": "a", "d": "f", "e": "e", "f": "d"}
_SWAP_SYMBOL = {"a": "f", "b": "e", "c": "d", "d": "c", "e": "b", "f": "a"}


class CodeLetter(Enum):
    """
    Code letter of a vertex: which two of its four grid edges lie in the 2-factor
    """

    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"

    @property
    def symbol(self) -> str:
        return self.value

    @property
    def incidence(self) -> Incidence:
        return _INCIDENCE[self.value]

    @property
    def up(self) -> bool:
        return _INCIDENCE[self.value].up

    @property
    def down(self) -> bool:
        return _INCIDENCE[self.value].down

    @property
    def left(self) -> bool:
        return _INCIDENCE[self.value].left

    @property
    def right(self) -> bool:
        return _INCIDENCE[self.value].right

    @classmethod
    def from_symbol(cls, symbol: str) -> "CodeLetter":
        try:
            return cls(symbol)
        except ValueError:
            raise InvalidWordError(f"Unknown code letter: {symbol!r} (expected one of a-f)")

    @classmethod
    def from_incidence(cls, up: bool, down: bool, left: bool, right: bool) -> "CodeLetter":
        """
        Look up the letter for an edge arrangement

        Raises:
            InvalidWordError: unless exactly two of the four edges are present
        """
        wanted = Incidence(bool(up), bool(down), bool(left), bool(right))
        for symbol, incidence in _INCIDENCE.items():
            if incidence == wanted:
                return cls(symbol)
        raise InvalidWordError(f"No code letter has incidence {tuple(int(x) for x in wanted)}")

    def __str__(self) -> str:
        return self.value


LETTERS: Tuple[CodeLetter, ...] = tuple(CodeLetter)

LetterLike = Union[CodeLetter, str]


def _as_letter(value: LetterLike) -> CodeLetter:
    if isinstance(value, CodeLetter):
        return value
    return CodeLetter.from_symbol(value)


def letter_incidence(letter: LetterLike) -> Incidence:
    """Return the (up, down, left, right) incidence of a code letter"""
    return _as_letter(letter).incidence


def ud_arc(x: LetterLike, y: LetterLike) -> bool:
    """True iff y may sit directly below x in a column"""
    return _as_letter(x).down == _as_letter(y).up


def lr_arc(x: LetterLike, y: LetterLike) -> bool:
    """True iff y may sit directly right of x in a row"""
    return _as_letter(x).right == _as_letter(y).left


def ud_arcs() -> List[Tuple[CodeLetter, CodeLetter]]:
    return [(x, y) for x in LETTERS for y in LETTERS if ud_arc(x, y)]


def lr_arcs() -> List[Tuple[CodeLetter, CodeLetter]]:
    return [(x, y) for x in LETTERS for y in LETTERS if lr_arc(x, y)]


def bar_letter(x: LetterLike) -> CodeLetter:
    """Reflect a letter in the horizontal axis (a<->c, d<->f)"""
    return CodeLetter(_BAR_SYMBOL[_as_letter(x).value])


def f_letter(x: LetterLike) -> CodeLetter:
    """Swap present and absent edges (a<->f, b<->e, c<->d)"""
    return CodeLetter(_SWAP_SYMBOL[_as_letter(x).value])


@dataclass(frozen=True, order=True)
class BinaryWord:
    """
    Outlet/inlet word; bits[0] is position 1 (the top row)
    """

    bits: Tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise InvalidWordError("Binary words must have length at least 1")
        if any(bit not in (0, 1) for bit in self.bits):
            raise InvalidWordError(f"Binary word has non-binary entries: {self.bits}")

    @classmethod
    def parse(cls, text: str) -> "BinaryWord":
        if not text or any(ch not in "01" for ch in text):
            raise InvalidWordError(f"Not a binary word: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_index(cls, index: int, m: int) -> "BinaryWord":
        if m < 1 or not 0 <= index < (1 << m):
            raise InvalidWordError(f"Index {index} is not a word of length {m}")
        return cls(tuple((index >> (m - 1 - k)) & 1 for k in range(m)))

    @classmethod
    def zeros(cls, m: int) -> "BinaryWord":
        return cls((0,) * m)

    @classmethod
    def ones(cls, m: int) -> "BinaryWord":
        return cls((1,) * m)

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        value = 0
        for bit in self.bits:
            value = (value << 1) | bit
        return value

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(bit) for bit in self.bits)


BinaryLike = Union[BinaryWord, str]


def as_binary(value: BinaryLike) -> BinaryWord:
    """Accept a BinaryWord or its bitstring"""
    if isinstance(value, BinaryWord):
        return value
    return BinaryWord.parse(value)


def column_violation(letters: Iterable[LetterLike], kind: ColumnKind) -> Optional[str]:
    """
    Check the column conditions for a sequence of letters

    Args:
        letters: Letters from top row to bottom row
        kind: Linear columns need an up-free top and down-free bottom letter;
            circular columns also chain the bottom letter back to the top one

    Returns:
        None if the column is valid, otherwise a message naming the first violation
    """
    word = [_as_letter(x) for x in letters]
    m = len(word)
    if m == 0:
        return "column is empty"
    for i in range(m - 1):
        if not ud_arc(word[i], word[i + 1]):
            return f"rows {i + 1},{i + 2}: '{word[i]}' cannot sit above '{word[i + 1]}'"
    if kind is ColumnKind.LINEAR:
        if word[0].up:
            return f"row 1: '{word[0]}' uses an up edge in a linear column"
        if word[-1].down:
            return f"row {m}: '{word[-1]}' uses a down edge in a linear column"
    elif not ud_arc(word[-1], word[0]):
        return f"rows {m},1: '{word[-1]}' cannot sit above '{word[0]}' across the wrap"
    return None


@dataclass(frozen=True)
class AlphaWord:
    """A valid column of a code matrix, read top to bottom"""

    letters: Tuple[CodeLetter, ...]
    kind: ColumnKind

    @classmethod
    def parse(cls, text: str, kind: Union[str, ColumnKind]) -> "AlphaWord":
        """
        Parse and validate a column word such as "bfdb"

        Raises:
            InvalidWordError: on unknown letters or violated column conditions
        """
        kind = ColumnKind.parse(kind)
        letters = tuple(CodeLetter.from_symbol(ch) for ch in text)
        problem = column_violation(letters, kind)
        if problem is not None:
            raise InvalidWordError(f"'{text}' is not a {kind.value} column: {problem}")
        return cls(letters, kind)

    @property
    def symbols(self) -> str:
        return "".join(letter.value for letter in self.letters)

    @property
    def m(self) -> int:
        return len(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.symbols


def is_valid_column(letters: Iterable[LetterLike], kind: Union[str, ColumnKind]) -> bool:
    return column_violation(letters, ColumnKind.parse(kind)) is None


def outlet(word: AlphaWord) -> BinaryWord:
    """Bit j is 1 iff the row-j vertex uses its right edge"""
    return BinaryWord(tuple(int(letter.right) for letter in word.letters))


def inlet(word: AlphaWord) -> BinaryWord:
    """Bit j is 1 iff the row-j vertex uses its left edge"""
    return BinaryWord(tuple(int(letter.left) for letter in word.letters))


def bar_alpha(word: AlphaWord) -> AlphaWord:
    return AlphaWord(tuple(bar_letter(x) for x in reversed(word.letters)), word.kind)


def bar_binary(v: BinaryLike) -> BinaryWord:
    return BinaryWord(tuple(reversed(as_binary(v).bits)))


def rho(v: BinaryLike, p: int = 1) -> BinaryWord:
    """Left cyclic shift applied p times: b1 b2 ... bm -> b2 ... bm b1"""
    bits = as_binary(v).bits
    p %= len(bits)
    return BinaryWord(bits[p:] + bits[:p])


def complement(v: BinaryLike) -> BinaryWord:
    return BinaryWord(tuple(1 - bit for bit in as_binary(v).bits))


def rotate_letters(word: AlphaWord, j: int) -> AlphaWord:
    """Rotate a circular column so that row j+1 becomes the top row"""
    if word.kind is not ColumnKind.CIRCULAR:
        raise InvalidWordError("Only circular columns can be rotated")
    j %= word.m
    return AlphaWord(word.letters[j:] + word.letters[:j], word.kind)


def f_automorphism(word: AlphaWord) -> AlphaWord:
    """
    Apply the letter swap F to every row

    F preserves both letter digraphs, so circular columns map to circular
    columns. It does not preserve the linear boundary letters, so the image of
    a linear column is returned as the circular column it also is.
    """
    return AlphaWord(tuple(f_letter(x) for x in word.letters), ColumnKind.CIRCULAR)


def z_value(v: BinaryLike) -> int:
    """Zeros at odd positions minus zeros at even positions (1-based)"""
    bits = as_binary(v).bits
    odd = sum(1 for k in range(0, len(bits), 2) if bits[k] == 0)
    even = sum(1 for k in range(1, len(bits), 2) if bits[k] == 0)
    return odd - even


class WordColor(Enum):
    RED = "red"
    GREEN = "green"
    NEUTRAL = "neutral"


class Classification(NamedTuple):
    s: int
    color: WordColor


def classify(v: BinaryLike) -> Classification:
    z = z_value(v)
    if z > 0:
        return Classification(z, WordColor.RED)
    if z < 0:
        return Classification(-z, WordColor.GREEN)
    return Classification(0, WordColor.NEUTRAL)


# Integer-index forms of the binary symmetries, used on hot paths.

def rho_index(x: int, m: int, p: int = 1) -> int:
    p %= m
    if p == 0:
        return x
    mask = (1 << m) - 1
    return ((x << p) & mask) | (x >> (m - p))


def reverse_index(x: int, m: int) -> int:
    result = 0
    for _ in range(m):
        result = (result << 1) | (x & 1)
        x >>= 1
    return result


def complement_index(x: int, m: int) -> int:
    return x ^ ((1 << m) - 1)


def z_value_index(x: int, m: int) -> int:
    return z_value(BinaryWord.from_index(x, m))
