"""Buckwalter conversion: table integrity, examples with independently
derived codepoints, passthrough warnings, and round trips."""

from __future__ import annotations

import random

import pytest

from morphedit.errors import SchemaError
from morphedit.translit import (
    TranslitTable,
    ar_to_bw,
    bw_to_ar,
    default_table,
    load_table,
)

# Character-by-character oracle, transcribed independently from the published
# scheme (letter name -> codepoint), not read from the package data file.
ORACLE = {
    "'": "ء",  # hamza
    "|": "آ",  # alef with madda
    ">": "أ",  # alef with hamza above
    "&": "ؤ",  # waw with hamza
    "<": "إ",  # alef with hamza below
    "}": "ئ",  # yeh with hamza
    "A": "ا",  # alef
    "b": "ب",  # beh
    "p": "ة",  # teh marbuta
    "t": "ت",  # teh
    "v": "ث",  # theh
    "j": "ج",  # jeem
    "H": "ح",  # hah
    "x": "خ",  # khah
    "d": "د",  # dal
    "*": "ذ",  # thal
    "r": "ر",  # reh
    "z": "ز",  # zain
    "s": "س",  # seen
    "$": "ش",  # sheen
    "S": "ص",  # sad
    "D": "ض",  # dad
    "T": "ط",  # tah
    "Z": "ظ",  # zah
    "E": "ع",  # ain
    "g": "غ",  # ghain
    "_": "ـ",  # tatweel
    "f": "ف",  # feh
    "q": "ق",  # qaf
    "k": "ك",  # kaf
    "l": "ل",  # lam
    "m": "م",  # meem
    "n": "ن",  # noon
    "h": "ه",  # heh
    "w": "و",  # waw
    "Y": "ى",  # alef maksura
    "y": "ي",  # yeh
    "F": "ً",  # fathatan
    "N": "ٌ",  # dammatan
    "K": "ٍ",  # kasratan
    "a": "َ",  # fatha
    "u": "ُ",  # damma
    "i": "ِ",  # kasra
    "~": "ّ",  # shadda
    "o": "ْ",  # sukun
    "`": "ٰ",  # superscript alef
    "{": "ٱ",  # alef wasla
    "P": "پ",  # peh
    "J": "چ",  # tcheh
    "V": "ڤ",  # veh
    "G": "گ",  # gaf
    ",": "،",  # arabic comma
    ";": "؛",  # arabic semicolon
    "?": "؟",  # arabic question mark
}

DIACRITICS = "FNKauio~"


class TestTable:
    def test_matches_published_scheme(self):
        table = default_table()
        assert table.bw_to_ar == ORACLE

    def test_bijective(self):
        table = default_table()
        assert len(table.bw_to_ar) == len(table.ar_to_bw)
        for bw, ar in table.bw_to_ar.items():
            assert table.ar_to_bw[ar] == bw

    def test_covers_eight_primary_diacritics(self):
        table = default_table()
        assert all(mark in table.bw_to_ar for mark in DIACRITICS)
        assert len(DIACRITICS) == 8

    def test_duplicate_symbol_rejected(self):
        with pytest.raises(SchemaError):
            TranslitTable.from_pairs([("A", "ا"), ("A", "ب")])
        with pytest.raises(SchemaError):
            TranslitTable.from_pairs([("A", "ا"), ("b", "ا")])

    def test_table_file_loads(self, tmp_path):
        path = tmp_path / "table.tsv"
        path.write_text("# comment\nA\tا\n\nb\tب\n", encoding="utf-8")
        table = load_table(path)
        assert table.bw_to_ar == {"A": "ا", "b": "ب"}

    def test_bad_row_rejected(self, tmp_path):
        path = tmp_path / "table.tsv"
        path.write_text("AB\tا\n", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_table(path)


class TestBwToAr:
    def test_empty(self):
        result = bw_to_ar("")
        assert result.text == ""
        assert result.warnings == ()

    def test_worked_word_character_by_character(self):
        expected = "".join(ORACLE[ch] for ch in "jAbwhA")
        result = bw_to_ar("jAbwhA")
        assert result.text == expected
        assert len(result.text) == 6
        assert result.warnings == ()

    def test_two_word_phrase_keeps_space_silently(self):
        result = bw_to_ar("wjAbwhA Alxlyj")
        expected = "".join(ORACLE.get(ch, ch) for ch in "wjAbwhA Alxlyj")
        assert result.text == expected
        assert result.text.count(" ") == 1
        assert result.warnings == ()

    def test_unmapped_characters_pass_through_with_warning(self):
        result = bw_to_ar("ktb123")
        assert result.text.endswith("123")
        assert len(result.warnings) == 3

    def test_warning_per_distinct_character(self):
        result = bw_to_ar("k11e1e")
        assert len(result.warnings) == 2


class TestArToBw:
    def test_empty(self):
        assert ar_to_bw("").text == ""

    def test_inverse_of_bw_to_ar(self):
        for text in ("jAbwhA", "wjAbwhA Alxlyj", "Alxlyj", "ktb"):
            assert ar_to_bw(bw_to_ar(text).text).text == text

    def test_digits_pass_with_warning(self):
        arabic = bw_to_ar("ktb").text + "12"
        result = ar_to_bw(arabic)
        assert result.text == "ktb12"
        assert len(result.warnings) == 2


class TestRoundTripProperty:
    def test_random_domain_strings_round_trip_both_ways(self):
        table = default_table()
        symbols = list(table.bw_to_ar)
        letters = list(table.ar_to_bw)
        rng = random.Random(1234)
        for _ in range(500):
            bw = "".join(rng.choice(symbols) for _ in range(rng.randint(0, 30)))
            there = bw_to_ar(bw)
            assert there.warnings == ()
            assert ar_to_bw(there.text).text == bw
            ar = "".join(rng.choice(letters) for _ in range(rng.randint(0, 30)))
            back = ar_to_bw(ar)
            assert back.warnings == ()
            assert bw_to_ar(back.text).text == ar

    def test_length_preserved(self):
        table = default_table()
        rng = random.Random(99)
        symbols = list(table.bw_to_ar)
        for _ in range(100):
            bw = "".join(rng.choice(symbols) for _ in range(rng.randint(0, 40)))
            assert len(bw_to_ar(bw).text) == len(bw)
