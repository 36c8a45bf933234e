#!/usr/bin/env python3
"""
Transfer Matrix Component
Enumerates valid column words and builds the quotient transfer matrix whose
(v, w) entry counts the columns with inlet word v and outlet word w.

Binary words index the matrix as integers with position 1 as the most
significant bit, so 0^m is index 0.
"""

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from types import MappingProxyType
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from core.alphabet import (
    LETTERS,
    AlphaWord,
    BinaryLike,
    BinaryWord,
    CodeLetter,
    ColumnKind,
    as_binary,
    ud_arc,
)
from core.errors import InvalidArgumentError, InvalidWordError, ResourceLimitError

DEFAULT_WIDTH_CAP = 14
SERIAL_ORDER = "msb-first-position-1"

_LETTERS_BY_UP = {
    False: [letter for letter in LETTERS if not letter.up],
    True: [letter for letter in LETTERS if letter.up],
}

IndexLike = Union[int, BinaryLike]


def expected_column_count(m: int, kind: Union[str, ColumnKind]) -> int:
    """Closed form for the number of valid column words: 3^m + (-1)^m, halved for linear"""
    total = 3 ** m + (-1) ** m
    return total if ColumnKind.parse(kind) is ColumnKind.CIRCULAR else total // 2


def excluded_linear_word(m: int) -> Optional[BinaryWord]:
    """The word (01)^k 0 that no linear column reaches when m = 2k + 1"""
    if m % 2 == 0:
        return None
    return BinaryWord.parse("01" * (m // 2) + "0")


def check_width(m: int, width_cap: Optional[int] = DEFAULT_WIDTH_CAP) -> None:
    if m < 1:
        raise InvalidArgumentError(f"Width must be at least 1, got {m}")
    if width_cap is not None and m > width_cap:
        raise ResourceLimitError(
            f"Width {m} exceeds the configured cap {width_cap}: "
            f"column words grow as 3^m ({3 ** m:,} at this width)"
        )


def enumerate_columns(m: int, kind: Union[str, ColumnKind]) -> Iterator[AlphaWord]:
    """
    Yield every valid column word once, in lexicographic letter order (a < ... < f)

    Args:
        m: Column height (width of the grid)
        kind: linear or circular

    Raises:
        InvalidArgumentError: for m < 1
    """
    kind = ColumnKind.parse(kind)
    if m < 1:
        raise InvalidArgumentError(f"Width must be at least 1, got {m}")
    linear = kind is ColumnKind.LINEAR
    letters: List[CodeLetter] = []

    def extend() -> Iterator[AlphaWord]:
        if len(letters) == m:
            closes = not letters[-1].down if linear else ud_arc(letters[-1], letters[0])
            if closes:
                yield AlphaWord(tuple(letters), kind)
            return
        for letter in LETTERS:
            if not letters:
                if linear and letter.up:
                    continue
            elif not ud_arc(letters[-1], letter):
                continue
            letters.append(letter)
            yield from extend()
            letters.pop()

    return extend()


class TransferMatrix:
    """
    Sparse, immutable multiplicity matrix over all 2^m binary words
    """

    def __init__(self, m: int, kind: Union[str, ColumnKind], rows: Mapping[int, Mapping[int, int]]):
        self._m = m
        self._kind = ColumnKind.parse(kind)
        frozen = {}
        for row in sorted(rows):
            cols = {col: mult for col, mult in sorted(rows[row].items()) if mult}
            if cols:
                frozen[row] = MappingProxyType(cols)
        self._rows = MappingProxyType(frozen)

    @property
    def m(self) -> int:
        return self._m

    @property
    def kind(self) -> ColumnKind:
        return self._kind

    @property
    def dim(self) -> int:
        return 1 << self._m

    @property
    def rows(self) -> Mapping[int, Mapping[int, int]]:
        return self._rows

    def index_of(self, word: IndexLike) -> int:
        if isinstance(word, int):
            if not 0 <= word < self.dim:
                raise InvalidWordError(f"Index {word} out of range for width {self._m}")
            return word
        word = as_binary(word)
        if word.m != self._m:
            raise InvalidWordError(f"Word {word} has length {word.m}, matrix width is {self._m}")
        return word.index

    def word_at(self, index: int) -> BinaryWord:
        return BinaryWord.from_index(index, self._m)

    def entry(self, v: IndexLike, w: IndexLike) -> int:
        row = self._rows.get(self.index_of(v))
        if row is None:
            return 0
        return row.get(self.index_of(w), 0)

    def row(self, v: IndexLike) -> Mapping[int, int]:
        return self._rows.get(self.index_of(v), MappingProxyType({}))

    def entries(self) -> Iterator[Tuple[int, int, int]]:
        """Nonzero entries as (row, col, multiplicity), sorted by (row, col)"""
        for row, cols in self._rows.items():
            for col, mult in cols.items():
                yield row, col, mult

    @property
    def nnz(self) -> int:
        return sum(len(cols) for cols in self._rows.values())

    def total_mass(self) -> int:
        return sum(mult for _, _, mult in self.entries())

    def max_row_sum(self) -> int:
        return max((sum(cols.values()) for cols in self._rows.values()), default=0)

    def support(self) -> List[int]:
        """Indices with a nonzero entry in their row or column"""
        touched = set(self._rows)
        for cols in self._rows.values():
            touched.update(cols)
        return sorted(touched)

    def isolated(self) -> List[int]:
        touched = set(self.support())
        return [v for v in range(self.dim) if v not in touched]

    def is_symmetric(self) -> bool:
        return all(self.entry(col, row) == mult for row, col, mult in self.entries())

    def dense(self, dim_cap: Optional[int] = 1024, dtype=object) -> np.ndarray:
        """
        Materialize the matrix as a numpy array

        Args:
            dim_cap: Refuse dimensions above this (None disables the check)
            dtype: object keeps exact Python integers; int64 is used on the fast path
        """
        if dim_cap is not None and self.dim > dim_cap:
            raise ResourceLimitError(f"Dense view of dimension {self.dim} exceeds the cap {dim_cap}")
        array = np.zeros((self.dim, self.dim), dtype=dtype)
        for row, col, mult in self.entries():
            array[row, col] = mult
        return array

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransferMatrix):
            return NotImplemented
        return (
            self._m == other._m
            and self._kind is other._kind
            and list(self.entries()) == list(other.entries())
        )

    def __repr__(self) -> str:
        return f"TransferMatrix(m={self._m}, kind={self._kind.value}, nnz={self.nnz})"


def _counts_for_first_letter(m: int, kind: ColumnKind, first: CodeLetter) -> Dict[Tuple[int, int], int]:
    """Inlet/outlet pair counts over all valid columns whose top letter is `first`"""
    if kind is ColumnKind.LINEAR and first.up:
        return {}
    # state: (down edge of the last letter, inlet prefix, outlet prefix)
    states: Dict[Tuple[bool, int, int], int] = {(first.down, int(first.left), int(first.right)): 1}
    for _ in range(1, m):
        extended: Dict[Tuple[bool, int, int], int] = defaultdict(int)
        for (down, v, w), count in states.items():
            for letter in _LETTERS_BY_UP[down]:
                extended[(letter.down, (v << 1) | letter.left, (w << 1) | letter.right)] += count
        states = extended
    closing_down = False if kind is ColumnKind.LINEAR else first.up
    counts: Dict[Tuple[int, int], int] = defaultdict(int)
    for (down, v, w), count in states.items():
        if down == closing_down:
            counts[(v, w)] += count
    return counts


def build_matrix(
    m: int,
    kind: Union[str, ColumnKind],
    width_cap: Optional[int] = DEFAULT_WIDTH_CAP,
    threads: int = 1,
) -> TransferMatrix:
    """
    Build the quotient transfer matrix for width m

    The enumeration is partitioned by top letter; partial maps are merged in
    letter order, so the result does not depend on the thread count.

    Raises:
        InvalidArgumentError: for m < 1
        ResourceLimitError: when m exceeds width_cap
    """
    kind = ColumnKind.parse(kind)
    check_width(m, width_cap)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda first: _counts_for_first_letter(m, kind, first), LETTERS))
    else:
        partials = [_counts_for_first_letter(m, kind, first) for first in LETTERS]

    rows: Dict[int, Dict[int, int]] = defaultdict(dict)
    for partial in partials:
        for (v, w), count in partial.items():
            rows[v][w] = rows[v].get(w, 0) + count
    return TransferMatrix(m, kind, rows)


def _count_chains(options: Sequence[Sequence[Tuple[int, int]]], first_up: int, last_down: int) -> int:
    ways = {first_up: 1}
    for choices in options:
        nxt: Dict[int, int] = defaultdict(int)
        for needed_up, count in ways.items():
            for up, down in choices:
                if up == needed_up:
                    nxt[down] += count
        ways = nxt
    return ways.get(last_down, 0)


def multiplicity(v: BinaryLike, w: BinaryLike, kind: Union[str, ColumnKind]) -> int:
    """
    Recompute one matrix entry by propagating up/down edges instead of enumerating

    A row with inlet/outlet bits (0,0) must hold b, (1,1) must hold e; any other
    row holds one of two letters whose down edge is the negation of its up edge.
    The entry counts up-edge assignments that agree between neighbouring rows.

    Raises:
        InvalidWordError: if v and w differ in length
    """
    v, w = as_binary(v), as_binary(w)
    kind = ColumnKind.parse(kind)
    if v.m != w.m:
        raise InvalidWordError(f"Inlet {v} and outlet {w} have different lengths")
    options = []
    for in_bit, out_bit in zip(v.bits, w.bits):
        if in_bit == 0 and out_bit == 0:
            options.append(((1, 1),))
        elif in_bit == 1 and out_bit == 1:
            options.append(((0, 0),))
        else:
            options.append(((0, 1), (1, 0)))
    if kind is ColumnKind.LINEAR:
        return _count_chains(options, 0, 0)
    return _count_chains(options, 0, 0) + _count_chains(options, 1, 1)


def column_counts(m: int) -> Tuple[int, int]:
    """(linear, circular) numbers of valid column words of height m, counted by enumeration"""
    linear = sum(1 for _ in enumerate_columns(m, ColumnKind.LINEAR))
    circular = sum(1 for _ in enumerate_columns(m, ColumnKind.CIRCULAR))
    return linear, circular


def linear_embeds_in_circular(linear: TransferMatrix, circular: TransferMatrix) -> Optional[Tuple[int, int]]:
    """
    Every linear column is a circular column too, so each linear entry is at
    most the circular entry at the same position

    Returns:
        None if that holds, otherwise the first offending (row, col) pair
    """
    if linear.m != circular.m or linear.kind is not ColumnKind.LINEAR or circular.kind is not ColumnKind.CIRCULAR:
        raise InvalidArgumentError("Expected a linear and a circular matrix of the same width")
    for v, w, mult in linear.entries():
        if circular.entry(v, w) < mult:
            return v, w
    return None
