"""
Tests for the code alphabet: letter table, arcs, column words and word symmetries
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.alphabet import (
    LETTERS,
    AlphaWord,
    BinaryWord,
    CodeLetter,
    ColumnKind,
    WordColor,
    bar_alpha,
    bar_binary,
    bar_letter,
    classify,
    column_violation,
    complement,
    complement_index,
    f_automorphism,
    f_letter,
    inlet,
    is_valid_column,
    letter_incidence,
    lr_arc,
    lr_arcs,
    outlet,
    reverse_index,
    rho,
    rho_index,
    rotate_letters,
    ud_arc,
    ud_arcs,
    z_value,
    z_value_index,
)
from core.errors import InvalidArgumentError, InvalidWordError
from core.transfer import enumerate_columns

binary_words = st.lists(st.integers(0, 1), min_size=1, max_size=12).map(lambda bits: BinaryWord(tuple(bits)))
even_words = st.integers(1, 6).flatmap(
    lambda k: st.lists(st.integers(0, 1), min_size=2 * k, max_size=2 * k)
).map(lambda bits: BinaryWord(tuple(bits)))
odd_words = st.integers(0, 5).flatmap(
    lambda k: st.lists(st.integers(0, 1), min_size=2 * k + 1, max_size=2 * k + 1)
).map(lambda bits: BinaryWord(tuple(bits)))
letters = st.sampled_from(LETTERS)
circular_columns = st.sampled_from(list(enumerate_columns(4, ColumnKind.CIRCULAR)))
any_circular_columns = st.sampled_from(
    [word for m in range(1, 7) for word in enumerate_columns(m, ColumnKind.CIRCULAR)]
)
linear_columns = st.sampled_from([word for m in range(1, 7) for word in enumerate_columns(m, ColumnKind.LINEAR)])


def test_letter_table():
    table = {letter.symbol: tuple(int(x) for x in letter_incidence(letter)) for letter in LETTERS}
    assert table == {
        "a": (0, 1, 0, 1),
        "b": (1, 1, 0, 0),
        "c": (1, 0, 0, 1),
        "d": (0, 1, 1, 0),
        "e": (0, 0, 1, 1),
        "f": (1, 0, 1, 0),
    }


def test_every_letter_uses_two_edges():
    assert all(sum(letter.incidence) == 2 for letter in LETTERS)


def test_from_incidence():
    assert CodeLetter.from_incidence(False, True, True, False) is CodeLetter.D
    with pytest.raises(InvalidWordError):
        CodeLetter.from_incidence(True, True, True, False)


def test_unknown_symbol():
    with pytest.raises(InvalidWordError):
        CodeLetter.from_symbol("g")


def test_arc_counts():
    assert len(ud_arcs()) == 18
    assert len(lr_arcs()) == 18
    assert ud_arc("a", "b") and not ud_arc("a", "a")
    assert lr_arc("a", "d") and not lr_arc("a", "a")


def test_letter_maps():
    assert [bar_letter(x).symbol for x in "abcdef"] == list("cbafed")
    assert [f_letter(x).symbol for x in "abcdef"] == list("fedcba")


@given(letters, letters)
@settings(max_examples=50)
def test_maps_respect_arcs(x, y):
    assert ud_arc(f_letter(x), f_letter(y)) == ud_arc(x, y)
    assert lr_arc(f_letter(x), f_letter(y)) == lr_arc(x, y)
    assert ud_arc(bar_letter(y), bar_letter(x)) == ud_arc(x, y)
    assert lr_arc(bar_letter(x), bar_letter(y)) == lr_arc(x, y)


def test_column_kind_parse():
    assert ColumnKind.parse("LINEAR") is ColumnKind.LINEAR
    with pytest.raises(InvalidArgumentError):
        ColumnKind.parse("diagonal")


def test_column_conditions():
    assert is_valid_column("bfdb", "circular")
    assert is_valid_column("ee", "linear")
    assert not is_valid_column("bfdb", "linear")
    assert "wrap" in column_violation([CodeLetter.A, CodeLetter.C, CodeLetter.A], ColumnKind.CIRCULAR)
    with pytest.raises(InvalidWordError):
        AlphaWord.parse("ab", "linear")


def test_inlet_and_outlet():
    word = AlphaWord.parse("bfdb", "circular")
    assert str(inlet(word)) == "0110"
    assert str(outlet(word)) == "0000"
    assert str(outlet(AlphaWord.parse("dfac", "circular"))) == "0011"


def test_bar_alpha():
    assert bar_alpha(AlphaWord.parse("cabb", "circular")).symbols == "bbca"


@given(circular_columns)
@settings(max_examples=50)
def test_bar_alpha_reverses_ports(word):
    mirrored = bar_alpha(word)
    assert is_valid_column(mirrored.letters, ColumnKind.CIRCULAR)
    assert inlet(mirrored) == bar_binary(inlet(word))
    assert outlet(mirrored) == bar_binary(outlet(word))


def test_rotate_letters():
    word = AlphaWord.parse("bfdb", "circular")
    assert rotate_letters(word, 1).symbols == "fdbb"
    assert rotate_letters(word, 4) == word
    with pytest.raises(InvalidWordError):
        rotate_letters(AlphaWord.parse("ee", "linear"), 1)


def test_f_automorphism_of_linear_column_is_circular():
    image = f_automorphism(AlphaWord.parse("ee", "linear"))
    assert image.symbols == "bb"
    assert image.kind is ColumnKind.CIRCULAR
    assert is_valid_column(image.letters, ColumnKind.CIRCULAR)


def test_binary_word_parsing():
    assert BinaryWord.from_index(5, 3) == BinaryWord.parse("101")
    assert BinaryWord.parse("0110").index == 6
    with pytest.raises(InvalidWordError):
        BinaryWord.parse("012")
    with pytest.raises(InvalidWordError):
        BinaryWord.from_index(8, 3)


def test_rho_and_z_examples():
    assert str(rho("0110", 1)) == "1100"
    assert z_value("0") == 1
    assert z_value("1") == 0
    assert z_value("0101") == 2
    assert classify("0101") == (2, WordColor.RED)
    assert classify("1010") == (2, WordColor.GREEN)
    assert classify("0000").color is WordColor.NEUTRAL


@pytest.mark.property_based
@given(binary_words, st.integers(0, 30), st.integers(0, 30))
@settings(max_examples=100)
def test_word_maps_compose(v, p, q):
    assert bar_binary(bar_binary(v)) == v
    assert complement(complement(v)) == v
    assert rho(rho(v, p), q) == rho(v, p + q)
    assert rho(v, v.m) == v


@pytest.mark.property_based
@given(binary_words, st.integers(0, 30))
@settings(max_examples=100)
def test_index_forms_agree(v, p):
    m = v.m
    assert rho_index(v.index, m, p) == rho(v, p).index
    assert reverse_index(v.index, m) == bar_binary(v).index
    assert complement_index(v.index, m) == complement(v).index
    assert z_value_index(v.index, m) == z_value(v)


@pytest.mark.property_based
@given(even_words)
@settings(max_examples=100)
def test_z_flips_sign_for_even_width(v):
    assert z_value(bar_binary(v)) == -z_value(v)
    assert z_value(complement(v)) == -z_value(v)
    assert z_value(rho(v)) == -z_value(v)


@pytest.mark.property_based
@given(odd_words)
@settings(max_examples=100)
def test_z_for_odd_width(v):
    assert z_value(bar_binary(v)) == z_value(v)
    assert z_value(complement(v)) == 1 - z_value(v)
    assert z_value(rho(v)) % 2 == z_value(v) % 2


@pytest.mark.property_based
@given(any_circular_columns, st.integers(0, 12))
@settings(max_examples=150)
def test_rotation_shifts_ports(word, j):
    turned = rotate_letters(word, j)
    assert is_valid_column(turned.letters, ColumnKind.CIRCULAR)
    assert inlet(turned) == rho(inlet(word), j)
    assert outlet(turned) == rho(outlet(word), j)


@pytest.mark.property_based
@given(any_circular_columns)
@settings(max_examples=150)
def test_f_automorphism_complements_ports(word):
    image = f_automorphism(word)
    assert is_valid_column(image.letters, ColumnKind.CIRCULAR)
    assert outlet(image) == complement(outlet(word))
    assert inlet(image) == complement(inlet(word))
    assert f_automorphism(image) == word


@pytest.mark.property_based
@given(linear_columns)
@settings(max_examples=100)
def test_f_automorphism_complements_linear_ports(word):
    image = f_automorphism(word)
    assert outlet(image) == complement(outlet(word))
    assert inlet(image) == complement(inlet(word))
